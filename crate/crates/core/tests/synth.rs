use hsf_core::density::BuiltinDensity;
use hsf_core::lattice::Lattice;
use hsf_core::lepage::{GaussianCoefficients, LePageParams, LePageSampler};
use hsf_core::synth::{FrequencyBand, KernelBank, Synthesizer, TruncationPlan};
use hsf_core::Error;

fn plan(j: i32) -> TruncationPlan {
    TruncationPlan { j_abs_max: j, k_margin: 12 }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn bands_split_the_scales() {
    let low = FrequencyBand::new(vec![0]).unwrap();
    let high = FrequencyBand::new(vec![1]).unwrap();
    assert!(low.is_low() && !high.is_low());
    let lj = low.levels(5);
    let hj = high.levels(5);
    assert!(lj.iter().all(|j| j[0] <= 0) && hj.iter().all(|j| j[0] >= 1));
    assert_eq!(lj.len() + hj.len(), 11);
    let all = FrequencyBand::all(2);
    assert_eq!(all.len(), 4);
    let mut total = 0;
    for b in &all {
        let levels = b.levels(3);
        assert!(levels.iter().all(|j| FrequencyBand::of(j) == *b && b.contains(j)));
        total += levels.len();
    }
    assert_eq!(total, 49);
    assert!(FrequencyBand::new(vec![2]).is_err());
}

#[test]
fn field_identities_in_one_dimension() {
    let f = BuiltinDensity::new(1.2, 0.3, vec![0.2]).unwrap();
    let p = plan(5);
    let bank = KernelBank::for_plan(&f, 1.2, &[0], &p).unwrap();
    let mut params = LePageParams::new(1.2, 1).unwrap();
    params.terms = 20_000;
    let src = LePageSampler::new(params).unwrap().sample_stream(17);
    let s = Synthesizer::new(&bank, &src, p.clone()).unwrap();
    let lat = Lattice::symmetric(1, 3.0, 96).unwrap();
    let full = s.synthesize_full(&lat).unwrap();
    assert_eq!(full.values[96], 0.0);
    let scale = max_abs(&full.values);
    assert!(scale > 0.0);

    let mut sum = vec![0.0; lat.len()];
    for band in FrequencyBand::all(1) {
        let part = s.synthesize_band(&band, &lat).unwrap();
        assert_eq!(part.values[96], 0.0);
        assert_eq!(part.meta.band.as_deref(), Some(band.eta()));
        for (a, b) in sum.iter_mut().zip(&part.values) {
            *a += b;
        }
    }
    assert!(max_diff(&full.values, &sum) <= 1e-12 * scale);

    let direct = s.synthesize_direct(&lat).unwrap();
    assert!(max_diff(&full.values, &direct) <= 1e-12 * scale);

    // Zero-order "derivative" is the field itself.
    let again = s.derivative_field(None, &lat).unwrap();
    assert_eq!(again.values, full.values);

    assert_eq!(full.meta.alpha, 1.2);
    assert_eq!(full.meta.plan, p);
    assert_eq!(full.meta.tail.per_level.len(), 11);
    assert!(full.meta.tail.level_tail.is_finite());
}

#[test]
fn field_identities_in_two_dimensions() {
    let f = BuiltinDensity::new(2.0, 0.3, vec![1.0, 1.0]).unwrap();
    let p = plan(2);
    let bank = KernelBank::for_plan(&f, 2.0, &[0, 0], &p).unwrap();
    let src = GaussianCoefficients { seed: 3, d: 2 };
    let s = Synthesizer::new(&bank, &src, p).unwrap();
    let lat = Lattice::symmetric(2, 1.0, 8).unwrap();
    let full = s.synthesize_full(&lat).unwrap();
    let centre = lat.flat_index(&[8, 8]);
    assert_eq!(full.values[centre], 0.0);
    let mut sum = vec![0.0; lat.len()];
    for band in FrequencyBand::all(2) {
        let part = s.synthesize_band(&band, &lat).unwrap();
        for (a, b) in sum.iter_mut().zip(&part.values) {
            *a += b;
        }
    }
    let scale = max_abs(&full.values);
    assert!(max_diff(&full.values, &sum) <= 1e-12 * scale);
    assert!(max_diff(&full.values, &s.synthesize_direct(&lat).unwrap()) <= 1e-12 * scale);
}

#[test]
fn derivative_matches_difference_quotient() {
    let f = BuiltinDensity::new(2.0, 0.3, vec![1.0]).unwrap();
    let p = plan(3);
    let bank0 = KernelBank::for_plan(&f, 2.0, &[0], &p).unwrap();
    let bank1 = KernelBank::for_plan(&f, 2.0, &[1], &p).unwrap();
    let src = GaussianCoefficients { seed: 11, d: 1 };
    let h = (-12f64).exp2();
    let lat = Lattice::new(vec![-1.0], vec![h], vec![(2.0 / h) as usize + 1]).unwrap();
    let x = Synthesizer::new(&bank0, &src, p.clone()).unwrap().synthesize_full(&lat).unwrap();
    let dx = Synthesizer::new(&bank1, &src, p).unwrap().derivative_field(None, &lat).unwrap();
    let scale = max_abs(&dx.values);
    let mut worst = 0.0f64;
    for i in 1..lat.len() - 1 {
        let fd = (x.values[i + 1] - x.values[i - 1]) / (2.0 * h);
        worst = worst.max((fd - dx.values[i]).abs());
    }
    assert!(worst <= 1e-3 * scale, "{worst} vs {scale}");
}

#[test]
fn rough_derivatives_are_refused() {
    // a = 0.5 < b = 1: only the low-frequency part is differentiable.
    let f = BuiltinDensity::new(2.0, 0.3, vec![0.2]).unwrap();
    let p = plan(3);
    let bank = KernelBank::for_plan(&f, 2.0, &[1], &p).unwrap();
    let src = GaussianCoefficients { seed: 1, d: 1 };
    let s = Synthesizer::new(&bank, &src, p).unwrap();
    let lat = Lattice::symmetric(1, 1.0, 8).unwrap();
    assert!(matches!(s.derivative_field(None, &lat), Err(Error::Precondition(_))));
    let high = FrequencyBand::new(vec![1]).unwrap();
    assert!(matches!(s.derivative_field(Some(&high), &lat), Err(Error::Precondition(_))));
    let low = FrequencyBand::new(vec![0]).unwrap();
    assert!(s.derivative_field(Some(&low), &lat).is_ok());
    assert!(s.synthesize_direct(&lat).is_err());
}

#[test]
fn inconsistent_parts_are_rejected() {
    let f = BuiltinDensity::new(2.0, 0.3, vec![1.0]).unwrap();
    let bank = KernelBank::for_plan(&f, 2.0, &[0], &plan(2)).unwrap();
    let src = GaussianCoefficients { seed: 1, d: 1 };
    assert!(Synthesizer::new(&bank, &src, plan(3)).is_err());
    let two = GaussianCoefficients { seed: 1, d: 2 };
    assert!(Synthesizer::new(&bank, &two, plan(2)).is_err());
    let mut params = LePageParams::new(1.5, 1).unwrap();
    params.terms = 100;
    let stable = LePageSampler::new(params).unwrap().sample_stream(1);
    assert!(Synthesizer::new(&bank, &stable, plan(2)).is_err());
}
