//! Two-sample Kolmogorov–Smirnov statistic and empirical characteristic
//! functions.

/// Result of [`two_sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup_x |F_a(x) - F_b(x)|`.
    pub distance: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
}

/// Two-sample KS statistic.  Samples must be non-empty and NaN-free.
pub fn two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsResult { distance: d, p_value: kolmogorov_q(lambda) }
}

/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`, the Kolmogorov survival
/// function.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `sup_ζ |φ̂(ζ) - φ(ζ)|` over an equispaced grid of `[-zeta_max, zeta_max]`
/// with `points` nodes, where `φ̂(ζ) = mean e^{iζx}` and `φ` is real.
pub fn ecf_sup_error(sample: &[f64], zeta_max: f64, points: usize, phi: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len() as f64;
    let mut sup = 0.0f64;
    for p in 0..points {
        let z = -zeta_max + 2.0 * zeta_max * p as f64 / (points - 1).max(1) as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for &x in sample {
            let (s, c) = (z * x).sin_cos();
            re += c;
            im += s;
        }
        let err = ((re / n - phi(z)).powi(2) + (im / n).powi(2)).sqrt();
        sup = sup.max(err);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_have_zero_distance() {
        let a = [0.1, 0.5, 0.3];
        let r = two_sample(&a, &a);
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_samples_have_unit_distance() {
        let r = two_sample(&[0.0, 1.0, 2.0], &[10.0, 11.0]);
        assert_eq!(r.distance, 1.0);
    }

    #[test]
    fn q_known_value() {
        // Q(1) = 0.26999967...
        assert!((kolmogorov_q(1.0) - 0.269_999_671_677_440_3).abs() < 1e-12);
    }
}
