use hsf_core::lattice::Lattice;
use hsf_core::regularity::{
    delta_axis, delta_b, delta_diag, delta_diag_by_axes, delta_n, directional_scan,
    infinity_normalizer, infinity_scan, n0, rate_l, rate_ltilde, rectangular_scan,
    trend_verdict, IncrementScan, InfinityScan, LatticeFunction, ScanKind, Verdict,
};
use hsf_core::synth::{FieldRealization, RealizationMeta, TailReport, TruncationPlan};
use hsf_core::Error;
use proptest::prelude::*;

fn integer_function(lat: &Lattice, seed: u64) -> LatticeFunction {
    // Small integers keep every difference exact.
    let values = (0..lat.len() as u64)
        .map(|i| ((i.wrapping_mul(2654435761).wrapping_add(seed * 97)) % 201) as f64 - 100.0)
        .collect();
    LatticeFunction::new(lat.clone(), values).unwrap()
}

fn realization(lat: &Lattice, g: impl Fn(&[f64]) -> f64) -> FieldRealization {
    let f = LatticeFunction::sample(lat.clone(), g);
    FieldRealization {
        lattice: f.lattice,
        values: f.values,
        meta: RealizationMeta {
            alpha: 2.0,
            band: None,
            b: vec![0; lat.dim()],
            plan: TruncationPlan::default_for(lat.dim()),
            tail: TailReport::default(),
        },
    }
}

fn bits(f: &LatticeFunction) -> Vec<u64> {
    f.values.iter().map(|v| v.to_bits()).collect()
}

proptest! {
    #[test]
    fn differences_are_linear(s1 in 1u64..1000, s2 in 1u64..1000, b0 in 0u32..3, b1 in 0u32..3,
                              h0 in 1usize..4, h1 in 1usize..4) {
        let lat = Lattice::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![13, 11]).unwrap();
        let f = integer_function(&lat, s1);
        let g = integer_function(&lat, s2);
        let sum = LatticeFunction::new(
            lat.clone(),
            f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect(),
        ).unwrap();
        let b = [b0, b1];
        let sh = [h0, h1];
        let lhs = delta_b(&sum, &b, &sh).unwrap();
        let df = delta_b(&f, &b, &sh).unwrap();
        let dg = delta_b(&g, &b, &sh).unwrap();
        prop_assert_eq!(&lhs.lattice, &df.lattice);
        let rhs: Vec<f64> = df.values.iter().zip(&dg.values).map(|(a, b)| a + b).collect();
        prop_assert_eq!(lhs.values, rhs);
    }

    #[test]
    fn axis_differences_commute(s in 1u64..1000, h0 in 1usize..4, h1 in 1usize..4) {
        let lat = Lattice::new(vec![-1.0, 2.0], vec![0.5, 0.25], vec![9, 10]).unwrap();
        let f = integer_function(&lat, s);
        let a = delta_axis(&delta_axis(&f, 0, h0).unwrap(), 1, h1).unwrap();
        let b = delta_axis(&delta_axis(&f, 1, h1).unwrap(), 0, h0).unwrap();
        prop_assert_eq!(&a.lattice, &b.lattice);
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn diagonal_difference_telescopes(s in 1u64..1000, h0 in 0usize..4, h1 in 0usize..4,
                                      h2 in 1usize..3) {
        let lat = Lattice::new(vec![0.0; 3], vec![1.0; 3], vec![6, 7, 5]).unwrap();
        let f = integer_function(&lat, s);
        let sh = [h0, h1, h2];
        let a = delta_diag(&f, &sh).unwrap();
        let b = delta_diag_by_axes(&f, &sh).unwrap();
        prop_assert_eq!(&a.lattice, &b.lattice);
        prop_assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn zero_order_is_identity() {
    let lat = Lattice::symmetric(2, 1.0, 4).unwrap();
    let f = integer_function(&lat, 5);
    assert_eq!(delta_b(&f, &[0, 0], &[1, 2]).unwrap(), f);
}

#[test]
fn differences_of_polynomials() {
    // Dyadic steps keep the arithmetic exact.
    let lat = Lattice::new(vec![-2.0], vec![0.125], vec![33]).unwrap();
    let lin = LatticeFunction::sample(lat.clone(), |x| 3.0 * x[0] + 1.0);
    let d = delta_axis(&lin, 0, 2).unwrap();
    assert_eq!(d.lattice.counts, vec![31]);
    assert!(d.values.iter().all(|&v| v == 0.75));
    let sq = LatticeFunction::sample(lat.clone(), |x| x[0] * x[0]);
    let h = 3.0 * 0.125;
    let d2 = delta_b(&sq, &[2], &[3]).unwrap();
    assert_eq!(d2.lattice.counts, vec![27]);
    assert!(d2.values.iter().all(|&v| v == 2.0 * h * h));
    let d3 = delta_n(&sq, 3, &[1]).unwrap();
    assert!(d3.values.iter().all(|&v| v == 0.0));
}

#[test]
fn translation_reads_shifted_values() {
    let lat = Lattice::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![5, 4]).unwrap();
    let f = LatticeFunction::sample(lat, |x| 10.0 * x[0] + x[1]);
    let t = f.translate(&[2, 1]).unwrap();
    assert_eq!(t.lattice.origin, vec![0.0, 0.0]);
    assert_eq!(t.lattice.counts, vec![3, 3]);
    assert_eq!(t.values[0], 21.0);
    assert_eq!(t.values[t.lattice.flat_index(&[2, 2])], 43.0);
    let w = f.window(&[1, 1], &[2, 2]).unwrap();
    assert_eq!(w.lattice.origin, vec![1.0, 1.0]);
    assert_eq!(w.values, vec![11.0, 12.0, 21.0, 22.0]);
    assert_eq!(f.sup_on_cube(1.0), 11.0);
}

#[test]
fn operator_errors() {
    let lat = Lattice::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![4, 4]).unwrap();
    let f = integer_function(&lat, 1);
    assert!(matches!(delta_axis(&f, 0, 0), Err(Error::InvalidParameter(_))));
    assert!(matches!(delta_axis(&f, 0, 4), Err(Error::Lattice(_))));
    assert!(delta_axis(&f, 2, 1).is_err());
    assert!(matches!(delta_diag(&f, &[0, 0]), Err(Error::InvalidParameter(_))));
    assert!(matches!(delta_n(&f, 0, &[1, 1]), Err(Error::InvalidParameter(_))));
    assert!(matches!(delta_b(&f, &[1], &[1, 1]), Err(Error::DimensionMismatch { .. })));
    assert!(f.window(&[3, 0], &[2, 1]).is_err());
    assert!(LatticeFunction::new(lat, vec![0.0; 3]).is_err());
}

#[test]
fn directional_rates() {
    let d = 0.1;
    // α = 2: 0 below, 3/2 on and 1/2 above the diagonal b = a.
    assert_eq!(rate_l(2.0, 1.0, 0.0, d), 0.0);
    assert_eq!(rate_l(2.0, 1.0, 1.0, d), 1.5);
    assert_eq!(rate_l(2.0, 0.5, 1.0, d), 0.5);
    for alpha in [0.3, 0.5, 0.99] {
        assert_eq!(rate_l(alpha, 2.0, 1.0, d), 0.0);
        assert!((rate_l(alpha, 1.0, 1.0, d) - (1.0 / alpha + 1.0 + d)).abs() < 1e-15);
        assert!((rate_l(alpha, 0.5, 1.0, d) - (1.0 / alpha + d)).abs() < 1e-15);
    }
    for alpha in [1.0, 1.2, 1.99] {
        assert_eq!(rate_l(alpha, 2.0, 1.0, d), 0.0);
        assert!((rate_l(alpha, 1.0, 1.0, d) - (1.0 / alpha + 1.5 + d)).abs() < 1e-15);
        assert!((rate_l(alpha, 0.5, 1.0, d) - (1.0 / alpha + 0.5 + d)).abs() < 1e-15);
    }
    for alpha in [0.0, -1.0, 2.5, f64::NAN] {
        assert!(rate_l(alpha, 1.0, 1.0, d).is_nan());
        assert!(rate_ltilde(alpha, 1.0, d).is_nan());
    }
}

#[test]
fn rectangular_rates() {
    let d = 0.2;
    assert_eq!(rate_ltilde(2.0, 0.5, d), 0.5);
    assert_eq!(rate_ltilde(2.0, 1.0, d), 1.5);
    assert_eq!(rate_ltilde(2.0, 2.0, d), 1.5);
    assert_eq!(rate_ltilde(2.0, 1.5, d), 0.5);
    assert!((rate_ltilde(0.5, 0.7, d) - (2.0 + d)).abs() < 1e-15);
    assert!((rate_ltilde(0.5, 3.0, d) - (3.0 + d)).abs() < 1e-15);
    assert!((rate_ltilde(1.25, 0.7, d) - (0.8 + 0.5 + d)).abs() < 1e-15);
    assert!((rate_ltilde(1.25, 1.0, d) - (0.8 + 1.5 + d)).abs() < 1e-15);
}

#[test]
fn minimal_rectangular_order() {
    assert_eq!(n0(&[0.5]), 1);
    assert_eq!(n0(&[1.0]), 1);
    assert_eq!(n0(&[1.5]), 2);
    assert_eq!(n0(&[0.7, 1.5]), 2);
    assert_eq!(n0(&[0.2, 0.2, 0.2]), 1);
    assert_eq!(n0(&[2.5, 2.5]), 5);
}

#[test]
fn verdict_rule() {
    assert_eq!(trend_verdict(&[], 0.1), Verdict::BoundedTrend);
    assert_eq!(trend_verdict(&[1.0, 2.0], 0.1), Verdict::BoundedTrend);
    assert_eq!(trend_verdict(&[1.0, 2.0, 4.0], 0.1), Verdict::Diverging);
    // Non-consecutive increases do not count.
    assert_eq!(trend_verdict(&[1.0, 2.0, 2.0, 4.0, 4.0, 8.0], 0.1), Verdict::BoundedTrend);
    // Increases of at most the tolerance do not count.
    assert_eq!(trend_verdict(&[1.0, 1.05, 1.1, 1.15, 1.2], 0.1), Verdict::BoundedTrend);
    assert_eq!(trend_verdict(&[8.0, 4.0, 2.0, 1.0], 0.1), Verdict::BoundedTrend);
    assert_eq!(Verdict::Diverging.name(), "diverging");
    assert_eq!(Verdict::BoundedTrend.name(), "bounded-trend");
}

#[test]
fn directional_scan_separates_smooth_and_rough_paths() {
    let lat = Lattice::symmetric(1, 1.0, 256).unwrap();
    let mut opts = IncrementScan::new(0.5, vec![0.5], 2.0);
    opts.levels = 6;
    let smooth = [realization(&lat, |x| x[0])];
    let r = directional_scan(&smooth, &[1], &opts).unwrap();
    assert_eq!(r.kind, ScanKind::Directional);
    assert_eq!(r.rows.len(), 6);
    assert_eq!(r.verdict, Verdict::BoundedTrend);
    // |Δ_h t| = h against h^{1/2} (log(3 + 1/h))^{1/2}.
    for row in &r.rows {
        let h = row.scale;
        let want = h / (h.sqrt() * (3.0 + 1.0 / h).ln().sqrt());
        assert!((row.median - want).abs() <= 1e-12 * want, "{row:?}");
    }
    let rough = [realization(&lat, |x| x[0].abs().powf(0.1))];
    assert_eq!(directional_scan(&rough, &[1], &opts).unwrap().verdict, Verdict::Diverging);
}

#[test]
fn ratios_scale_with_the_field() {
    let lat = Lattice::symmetric(1, 1.0, 128).unwrap();
    let mut opts = IncrementScan::new(0.5, vec![0.3], 1.5);
    opts.levels = 5;
    let base = |x: &[f64]| (7.0 * x[0]).sin() + x[0].abs().sqrt();
    let one: Vec<_> = (1..=3).map(|c| realization(&lat, move |x| c as f64 * base(x))).collect();
    let two: Vec<_> = (1..=3).map(|c| realization(&lat, move |x| 2.0 * c as f64 * base(x))).collect();
    for (a, b) in [
        (directional_scan(&one, &[1], &opts).unwrap(), directional_scan(&two, &[1], &opts).unwrap()),
        (rectangular_scan(&one, 1, &opts).unwrap(), rectangular_scan(&two, 1, &opts).unwrap()),
    ] {
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(2.0 * ra.median, rb.median);
            assert_eq!(2.0 * ra.mean, rb.mean);
            assert_eq!(2.0 * ra.max, rb.max);
            // The median of c = 1, 2, 3 is the middle realisation.
            assert!((ra.median - 2.0 * ra.max / 3.0).abs() <= 1e-12 * ra.max);
        }
    }
}

#[test]
fn scan_preconditions() {
    let lat = Lattice::symmetric(1, 1.0, 128).unwrap();
    let reals = [realization(&lat, |x| x[0])];
    let mut opts = IncrementScan::new(0.5, vec![1.5], 2.0);
    opts.levels = 3;
    assert!(matches!(rectangular_scan(&reals, 1, &opts), Err(Error::Precondition(_))));
    assert!(rectangular_scan(&reals, 2, &opts).is_ok());
    // Reach T(1 + n/2) exceeds the lattice.
    assert!(matches!(rectangular_scan(&reals, 3, &opts), Err(Error::Lattice(_))));
    // Increments that are not multiples of the step.
    let coarse = [realization(&Lattice::symmetric(1, 1.0, 3).unwrap(), |x| x[0])];
    assert!(matches!(directional_scan(&coarse, &[1], &opts), Err(Error::Lattice(_))));
    assert!(directional_scan(&[], &[1], &opts).is_err());
    assert!(directional_scan(&reals, &[1, 1], &opts).is_err());
}

#[test]
fn growth_normalisers() {
    let t = 50.0f64;
    let s = infinity_normalizer(2.0, 0.1, 0.4, None, &[0], t);
    assert!((s - t.powf(0.4) * (3.0 + t).ln().ln().sqrt()).abs() <= 1e-12 * s);
    let s = infinity_normalizer(1.5, 0.1, 0.4, Some(&[0]), &[0], t);
    assert!((s - t.powf(0.4) * (3.0 + t).ln().powf(1.0 / 1.5 + 0.1)).abs() <= 1e-12 * s);
    assert_eq!(infinity_normalizer(0.8, 0.1, 0.4, Some(&[1]), &[0], t), 1.0);
    assert_eq!(infinity_normalizer(0.8, 0.1, 0.4, None, &[1], t), 1.0);
    let s = infinity_normalizer(1.5, 0.1, 0.4, Some(&[1]), &[0], t);
    assert!((s - (3.0 + t).ln().sqrt()).abs() <= 1e-12 * s);
}

#[test]
fn infinity_scan_tracks_growth() {
    let lat = Lattice::symmetric(1, 128.0, 256).unwrap();
    let opts = InfinityScan::new(0.4, 2.0);
    let tame = [realization(&lat, |x| x[0].abs().powf(0.4))];
    let r = infinity_scan(&tame, &opts).unwrap();
    assert_eq!(r.kind, ScanKind::Infinity);
    assert_eq!(r.rows.len(), 7);
    assert_eq!(r.verdict, Verdict::BoundedTrend);
    assert!(r.warnings.is_empty());
    let wild = [realization(&lat, |x| x[0].abs().powf(0.9))];
    assert_eq!(infinity_scan(&wild, &opts).unwrap().verdict, Verdict::Diverging);

    let mut capped = opts.clone();
    capped.shells = 8;
    let r = infinity_scan(&tame, &capped).unwrap();
    assert_eq!(r.rows.len(), 7);
    assert_eq!(r.warnings.len(), 1);
    let small = [realization(&Lattice::symmetric(1, 16.0, 32).unwrap(), |x| x[0])];
    assert!(matches!(infinity_scan(&small, &opts), Err(Error::Lattice(_))));
}
