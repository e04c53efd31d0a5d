use std::f64::consts::PI;

use hsf_core::lepage::{
    envelope, envelope_check, gaussian_epsilon, gaussian_scale, lepage_constant,
    CoefficientSource, GaussianCoefficients, LePageParams, LePageSampler, Remainder,
};
use hsf_core::quadrature::{GaussLegendre, Rule};
use proptest::prelude::*;

fn sampler(alpha: f64, terms: usize, remainder: Remainder) -> LePageSampler {
    let mut p = LePageParams::new(alpha, 1).unwrap();
    p.terms = terms;
    p.remainder = remainder;
    LePageSampler::new(p).unwrap()
}

#[test]
fn constant_reference_values() {
    assert!((lepage_constant(1.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    // Γ(1/2) cos(π/4) = √(π/2), so a(1/2) = 2/π as well.
    assert!((lepage_constant(0.5).unwrap() - 2.0 / PI).abs() < 1e-14);
    for h in [1e-4, -1e-4] {
        assert!((lepage_constant(1.0 + h).unwrap() - 2.0 / PI).abs() < 1e-3);
    }
    assert!(lepage_constant(2.0).is_err());
    assert!(lepage_constant(0.0).is_err());
}

#[test]
fn gaussian_multiplier_has_unit_absolute_moment() {
    // ∫ |σ z|^α φ(z) dz over z > 0, doubled, with a graded mesh near 0.
    let gl = GaussLegendre::new(20);
    for alpha in [0.3, 0.7, 1.0, 1.5, 1.9] {
        let s = gaussian_scale(alpha);
        let g = |z: f64| (s * z).powf(alpha) * (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        let mut r = Rule::composite(1e-12, 1e-8, 1, &gl);
        let mut a = 1e-8;
        while a < 1.0 {
            r.push_composite(a, 4.0 * a, 1, &gl);
            a *= 4.0;
        }
        r.push_composite(a, 14.0, 40, &gl);
        let m = 2.0 * r.integrate(g);
        assert!((m - 1.0).abs() <= 1e-8, "alpha {alpha}: {m}");
    }
}

#[test]
fn streams_are_deterministic_and_seed_sensitive() {
    let s = sampler(1.2, 20_000, Remainder::Gaussian);
    let a = s.sample_stream(9);
    let b = s.sample_stream(9);
    let c = s.sample_stream(10);
    for (j, k) in [(0, 0), (3, -7), (-2, 5)] {
        let x = a.epsilon(&[j], &[k]).unwrap().value;
        assert_eq!(x.to_bits(), b.epsilon(&[j], &[k]).unwrap().value.to_bits());
        assert_ne!(x, c.epsilon(&[j], &[k]).unwrap().value);
    }
    assert_eq!(a.gamma_last().to_bits(), b.gamma_last().to_bits());
    assert_eq!(a.seed(), 9);
}

#[test]
fn boxes_agree_with_single_queries() {
    let s = sampler(0.8, 10_000, Remainder::Gaussian);
    let st = s.sample_stream(3);
    for j in [-3, 0, 4] {
        let block = st.coefficient_box(&[j], &[-40], &[45]).unwrap();
        for (i, v) in block.iter().enumerate() {
            let single = st.epsilon(&[j], &[i as i64 - 40]).unwrap().value;
            assert_eq!(v.to_bits(), single.to_bits());
        }
    }
    let g = GaussianCoefficients { seed: 4, d: 2 };
    let block = g.coefficient_box(&[1, -1], &[-2, 3], &[2, 6]).unwrap();
    let mut i = 0;
    for k0 in -2..=2 {
        for k1 in 3..=6 {
            assert_eq!(block[i], gaussian_epsilon(4, &[1, -1], &[k0, k1]).unwrap());
            i += 1;
        }
    }
    assert!(g.coefficient_box(&[0, 0], &[1, 0], &[0, 0]).is_err());
}

#[test]
fn arrival_times_grow_linearly() {
    let m = 100_000;
    let st = sampler(1.5, m, Remainder::Truncate).sample_stream(21);
    let r = st.gamma_last() / m as f64 - 1.0;
    assert!(r.abs() <= 5.0 / (m as f64).sqrt(), "{r}");
}

#[test]
fn frequency_marks_follow_their_law() {
    // |log|κ|| has distribution function 1 - (1+y)^{-ε}.
    let eps = 0.5;
    let st = sampler(1.2, 50_000, Remainder::Truncate).sample_stream(8);
    let mut y: Vec<f64> = st.kappa().iter().map(|x| x.abs().ln().abs()).collect();
    y.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = y.len() as f64;
    let mut dist = 0.0f64;
    // Marks beyond the f64 exponent range are stored as 0 or ±∞; they sort
    // last and are skipped as evaluation points.
    for (i, &v) in y.iter().enumerate().filter(|(_, v)| v.is_finite()) {
        let f = 1.0 - (1.0 + v).powf(-eps);
        dist = dist.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    assert!(dist <= 0.02, "KS distance {dist}");
    let positive = st.kappa().iter().filter(|x| **x > 0.0).count() as f64 / n;
    assert!((positive - 0.5).abs() < 0.02);
}

#[test]
fn gaussian_coefficients_have_the_pinned_variance() {
    for d in [1usize, 2] {
        let n = 100_000;
        let target = 2.0 * (2.0 * PI).powi(d as i32);
        let draws: Vec<(f64, f64)> = (0..n as i64)
            .map(|i| {
                let j = vec![(i % 7) as i32 - 3; d];
                let mut k = vec![0i64; d];
                k[0] = i / 7;
                let a = gaussian_epsilon(5, &j, &k).unwrap();
                k[0] += 100_000;
                (a, gaussian_epsilon(5, &j, &k).unwrap())
            })
            .collect();
        let var = draws.iter().map(|p| p.0 * p.0).sum::<f64>() / n as f64;
        let cross = draws.iter().map(|p| p.0 * p.1).sum::<f64>() / n as f64 / target;
        assert!((var / target - 1.0).abs() <= 0.03, "d={d}: {var} vs {target}");
        assert!(cross.abs() <= 0.02, "d={d}: correlation {cross}");
    }
}

#[test]
fn truncation_tail_is_reported() {
    let g = sampler(1.2, 5000, Remainder::Gaussian).sample_stream(1);
    let t = sampler(1.2, 5000, Remainder::Truncate).sample_stream(1);
    let cg = g.epsilon(&[0], &[0]).unwrap();
    let ct = t.epsilon(&[0], &[0]).unwrap();
    assert!(cg.truncation_std > 0.0 && cg.truncation_std.is_finite());
    assert_eq!(cg.truncation_std, ct.truncation_std);
    assert_ne!(cg.value, ct.value);
    let longer = sampler(1.2, 50_000, Remainder::Gaussian).sample_stream(1);
    assert!(longer.epsilon(&[0], &[0]).unwrap().truncation_std < cg.truncation_std);
    assert!(t.epsilon(&[41], &[0]).is_err());
}

proptest! {
    #[test]
    fn envelope_grows_with_delta(alpha in 0.2f64..2.0, d1 in 0.0f64..1.0, dd in 0.0f64..1.0,
                                 j in -30i32..30, k in -1000i64..1000) {
        let lo = envelope(alpha, d1, &[j], &[k]);
        let hi = envelope(alpha, d1 + dd, &[j], &[k]);
        prop_assert!(lo <= hi && lo >= 1.0);
    }
}

#[test]
fn envelope_supremum_is_stable() {
    let st = sampler(1.2, 20_000, Remainder::Gaussian).sample_stream(2);
    let r = envelope_check(&st, 0.1, 4, 64).unwrap();
    assert!(r.stable, "{r:?}");
    assert!(r.samples.1 >= 4 * r.samples.0);
    let g = GaussianCoefficients { seed: 2, d: 1 };
    assert!(envelope_check(&g, 0.1, 4, 64).unwrap().stable);
}
