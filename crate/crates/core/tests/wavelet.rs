use std::f64::consts::PI;

use hsf_core::quadrature::{GaussLegendre, Rule};
use hsf_core::wavelet::{
    atom_quasi_norm, band_interval, inner_product, meyer_hat, nu, psi_hat_alpha, MeyerProfile,
    WaveletAtom, LAMBDA_HI, LAMBDA_LO,
};
use hsf_core::Error;
use proptest::prelude::*;

proptest! {
    #[test]
    fn dyadic_partition_of_unity(lambda in 0.1f64..50.0) {
        let s: f64 = (-10..=10)
            .map(|j| MeyerProfile.modulus((-j as f64).exp2() * lambda).powi(2))
            .sum();
        prop_assert!((s - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn profile_vanishes_off_support(lambda in -100.0f64..100.0) {
        let a = lambda.abs();
        if !(LAMBDA_LO..=LAMBDA_HI).contains(&a) {
            prop_assert_eq!(meyer_hat(lambda).norm(), 0.0);
        }
    }

    #[test]
    fn profile_is_conjugate_symmetric(lambda in -10.0f64..10.0) {
        let z = meyer_hat(lambda);
        let w = meyer_hat(-lambda).conj();
        prop_assert!((z - w).norm() <= 1e-15);
    }

    #[test]
    fn smooth_step_is_monotone_and_symmetric(x in -0.5f64..1.5, dx in 0.0f64..0.1) {
        prop_assert!(nu(x + dx) >= nu(x));
        prop_assert!((nu(x) + nu(1.0 - x) - 1.0).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&nu(x)));
    }

    #[test]
    fn atom_is_scaled_profile(j in -4i32..4, k in -6i64..6, xi in -60.0f64..60.0, alpha in 0.3f64..2.0) {
        let got = psi_hat_alpha(alpha, &[j], &[k], &[xi]).unwrap();
        let lambda = (-j as f64).exp2() * xi;
        let phase = hsf_core::Complex64::from_polar(1.0, -(k as f64) * lambda);
        let want = meyer_hat(lambda) * phase * (-(j as f64) / alpha).exp2();
        prop_assert!((got - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }
}

#[test]
fn profile_reference_values() {
    assert_eq!(meyer_hat(0.0).norm(), 0.0);
    assert_eq!(meyer_hat(3.0 * PI).norm(), 0.0);
    // π and 2π = 2·π are partners in the dyadic partition.
    let s = meyer_hat(PI).norm_sqr() + meyer_hat(2.0 * PI).norm_sqr();
    assert!((s - 1.0).abs() <= 1e-14);
    // Plateau at 4π/3.
    assert!((MeyerProfile.modulus(4.0 * PI / 3.0) - 1.0).abs() <= 1e-15);
}

#[test]
fn profile_has_unit_l2_norm_over_two_pi() {
    let gl = GaussLegendre::new(32);
    let r = Rule::composite(LAMBDA_LO, LAMBDA_HI, 64, &gl);
    let half = r.integrate(|l| MeyerProfile.modulus(l).powi(2));
    assert!((2.0 * half - 2.0 * PI).abs() <= 1e-11);
}

#[test]
fn band_supports() {
    assert_eq!(band_interval(0), [2.0 * PI / 3.0, 8.0 * PI / 3.0]);
    let [lo, hi] = band_interval(2);
    assert!((lo - 8.0 * PI / 3.0).abs() < 1e-14 && (hi - 32.0 * PI / 3.0).abs() < 1e-13);
    let [lo, hi] = band_interval(-1);
    assert!((lo - PI / 3.0).abs() < 1e-15 && (hi - 4.0 * PI / 3.0).abs() < 1e-15);
    let atom = WaveletAtom::new(vec![2, -1], vec![0, 3]).unwrap();
    assert_eq!(atom.support(), vec![band_interval(2), band_interval(-1)]);
}

#[test]
fn quasi_norm_matches_independent_quadrature() {
    // L² case: ‖ψ̂¹‖₂ = √(2π), and the d-fold product norm is its d-th power.
    let n1 = atom_quasi_norm(2.0, 1).unwrap();
    assert!((n1 - (2.0 * PI).sqrt()).abs() <= 1e-10);
    let n2 = atom_quasi_norm(2.0, 2).unwrap();
    assert!((n2 - 2.0 * PI).abs() <= 1e-9);
    // α = 0.5 against a plain midpoint rule on a fine grid.
    let n = 2_000_000;
    let h = (LAMBDA_HI - LAMBDA_LO) / n as f64;
    let s: f64 = (0..n)
        .map(|i| MeyerProfile.modulus(LAMBDA_LO + (i as f64 + 0.5) * h).sqrt())
        .sum::<f64>()
        * h
        * 2.0;
    let oracle = s.powi(2);
    let got = atom_quasi_norm(0.5, 1).unwrap();
    assert!((got / oracle - 1.0).abs() <= 1e-8, "{got} vs {oracle}");
}

#[test]
fn inner_products_are_kronecker() {
    let pairs = [
        ((vec![0], vec![0]), (vec![0], vec![0])),
        ((vec![0], vec![0]), (vec![0], vec![1])),
        ((vec![0], vec![2]), (vec![1], vec![4])),
        ((vec![-2], vec![-3]), (vec![-1], vec![-1])),
        ((vec![1, -1], vec![2, 0]), (vec![1, -1], vec![2, 0])),
        ((vec![1, -1], vec![2, 0]), (vec![0, -1], vec![1, 0])),
    ];
    for ((j, k), (jp, kp)) in pairs {
        let same = j == jp && k == kp;
        let a = WaveletAtom::new(j, k).unwrap();
        let b = WaveletAtom::new(jp, kp).unwrap();
        let z = inner_product(&a, &b).unwrap();
        let target = if same { 1.0 } else { 0.0 };
        assert!((z.re - target).abs() <= 1e-10 && z.im.abs() <= 1e-10, "{a:?} {b:?} {z}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(atom_quasi_norm(0.0, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(atom_quasi_norm(2.5, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(atom_quasi_norm(1.0, 4), Err(Error::InvalidParameter(_))));
    assert!(matches!(
        WaveletAtom::new(vec![0, 0], vec![0]),
        Err(Error::DimensionMismatch { expected: 2, got: 1 })
    ));
    let a = WaveletAtom::new(vec![0], vec![0]).unwrap();
    let b = WaveletAtom::new(vec![0, 0], vec![0, 0]).unwrap();
    assert!(inner_product(&a, &b).is_err());
}
