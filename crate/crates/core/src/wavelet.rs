//! Meyer wavelet atoms in the frequency domain.
//!
//! The one-dimensional profile `ψ̂¹` is supported on
//! `2π/3 ≤ |λ| ≤ 8π/3`.  Tensor atoms are
//! `ψ̂_{J,K}(ξ) = Π_l 2^{-j_l/2} e^{-i 2^{-j_l} k_l ξ_l} ψ̂¹(2^{-j_l} ξ_l)`
//! (L²-normalised, `‖ψ̂_{J,K}‖₂² = (2π)^d`), and the L^α-normalised atoms
//! replace `2^{-j/2}` by `2^{-j/α}`, so that `‖ψ̂_{α,J,K}‖_{L^α}` does not
//! depend on `(J, K)`.

use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::math::{ceil, checked_exp2, cos, exp, exp2, powf, sin, sincos, PI};
use crate::quadrature::{GaussLegendre, Rule};
use crate::{Complex64, MAX_DIM};

/// Inner edge `2π/3` of the profile support.
pub const LAMBDA_LO: f64 = 2.0 * PI / 3.0;
/// Junction `4π/3` between the rising and falling halves of the profile.
pub const LAMBDA_MID: f64 = 4.0 * PI / 3.0;
/// Outer edge `8π/3` of the profile support.
pub const LAMBDA_HI: f64 = 8.0 * PI / 3.0;

/// Smooth step `ν(x) = s(x) / (s(x) + s(1-x))` with `s(x) = e^{-1/x}` for
/// `x > 0` and `s = 0` otherwise.  `ν = 0` on `x ≤ 0`, `ν = 1` on `x ≥ 1`,
/// and `ν(x) + ν(1-x) = 1`.
pub fn nu(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // s(1-x)/s(x) = exp(1/x - 1/(1-x)); this form never forms 0/0.
    let e = 1.0 / x - 1.0 / (1.0 - x);
    if e > 745.0 {
        0.0
    } else {
        1.0 / (1.0 + exp(e))
    }
}

/// The one-dimensional Meyer profile `ψ̂¹`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeyerProfile;

impl MeyerProfile {
    /// `|ψ̂¹(λ)|`: `sin(π/2 ν(3|λ|/2π - 1))` on the inner half of the support,
    /// `cos(π/2 ν(3|λ|/4π - 1))` on the outer half, zero elsewhere.
    pub fn modulus(self, lambda: f64) -> f64 {
        let a = lambda.abs();
        if !(LAMBDA_LO..=LAMBDA_HI).contains(&a) {
            0.0
        } else if a <= LAMBDA_MID {
            sin(0.5 * PI * nu(3.0 * a / (2.0 * PI) - 1.0))
        } else {
            cos(0.5 * PI * nu(3.0 * a / (4.0 * PI) - 1.0))
        }
    }

    /// `ψ̂¹(λ) = e^{iλ/2} |ψ̂¹(λ)|`.
    pub fn hat(self, lambda: f64) -> Complex64 {
        let m = self.modulus(lambda);
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (s, c) = sincos(0.5 * lambda);
        Complex64::new(m * c, m * s)
    }
}

/// `ψ̂¹(λ)`.
pub fn meyer_hat(lambda: f64) -> Complex64 {
    MeyerProfile.hat(lambda)
}

/// One-dimensional factor `e^{-i k λ} ψ̂¹(λ)` at `λ = 2^{-j} ξ` (without the
/// normalising power of two).
#[inline]
pub(crate) fn shifted_profile(k: i64, lambda: f64) -> Complex64 {
    let m = MeyerProfile.modulus(lambda);
    if m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (s, c) = sincos(0.5 * lambda - k as f64 * lambda);
    Complex64::new(m * c, m * s)
}

/// A dilation/translation index pair `(J, K) ∈ ℤ^d × ℤ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveletAtom {
    /// Dilation index `J`.
    pub j: Vec<i32>,
    /// Translation index `K`.
    pub k: Vec<i64>,
}

impl WaveletAtom {
    /// Atom with the given indices; both must have the same length `d ≤ 3`.
    pub fn new(j: Vec<i32>, k: Vec<i64>) -> Result<Self> {
        check_dim(j.len(), k.len())?;
        if j.is_empty() || j.len() > MAX_DIM {
            return Err(invalid("atom dimension must be 1, 2 or 3"));
        }
        Ok(WaveletAtom { j, k })
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.j.len()
    }

    /// Normalising factor `2^{-Σj/α}`.
    pub fn prefactor(&self, alpha: f64) -> Result<f64> {
        let s: i64 = self.j.iter().map(|&j| j as i64).sum();
        checked_exp2(-(s as f64) / alpha)
    }

    /// `ψ̂_{α,J,K}(ξ)`; `alpha = 2` gives the L² atom `ψ̂_{J,K}`.
    pub fn hat(&self, alpha: f64, xi: &[f64]) -> Result<Complex64> {
        check_dim(self.dim(), xi.len())?;
        let pre = self.prefactor(alpha)?;
        let mut z = Complex64::new(pre, 0.0);
        for l in 0..self.dim() {
            let lambda = xi[l] * exp2(-(self.j[l] as f64));
            let f = shifted_profile(self.k[l], lambda);
            if f.re == 0.0 && f.im == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            z *= f;
        }
        Ok(z)
    }

    /// Positive half of the per-axis support: `[2^{j+1}π/3, 2^{j+3}π/3]`
    /// (the support is this interval and its mirror image).
    pub fn support(&self) -> Vec<[f64; 2]> {
        self.j.iter().map(|&j| band_interval(j)).collect()
    }
}

/// Positive half `[2^{j+1}π/3, 2^{j+3}π/3]` of the support of band `j`.
pub fn band_interval(j: i32) -> [f64; 2] {
    let s = exp2(j as f64);
    [s * LAMBDA_LO, s * LAMBDA_HI]
}

/// `ψ̂_{α,J,K}(ξ)` as a free function.
pub fn psi_hat_alpha(alpha: f64, j: &[i32], k: &[i64], xi: &[f64]) -> Result<Complex64> {
    check_alpha(alpha)?;
    WaveletAtom::new(j.to_vec(), k.to_vec())?.hat(alpha, xi)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(invalid("alpha must lie in (0, 2]"))
    }
}

/// `‖ψ̂¹‖^d_{L^α(ℝ)}`, the common L^α (quasi-)norm of every `ψ̂_{α,J,K}`.
///
/// Gauss–Legendre quadrature with 256 nodes per half support, doubled until
/// the relative change drops below `1e-10`.
pub fn atom_quasi_norm(alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if d == 0 || d > MAX_DIM {
        return Err(invalid("dimension must be 1, 2 or 3"));
    }
    let base = GaussLegendre::new(16);
    let profile_int = |nodes: usize| -> f64 {
        let panels = (nodes / 32).max(1);
        let mut r = Rule::composite(LAMBDA_LO, LAMBDA_MID, panels, &base);
        r.push_composite(LAMBDA_MID, LAMBDA_HI, panels, &base);
        2.0 * r.integrate(|l| powf(MeyerProfile.modulus(l), alpha))
    };
    let mut nodes = 256;
    let mut prev = profile_int(nodes);
    loop {
        nodes *= 2;
        let cur = profile_int(nodes);
        if (cur - prev).abs() <= 1e-10 * cur.abs() {
            return Ok(powf(powf(cur, 1.0 / alpha), d as f64));
        }
        if nodes > 1 << 16 {
            return Err(Error::NoConvergence(alloc::format!(
                "atom norm for alpha={alpha} did not settle"
            )));
        }
        prev = cur;
    }
}

/// Integrate a smooth band-limited integrand over `[lo, hi]`, splitting at
/// `breaks` and refining panels with the oscillation rate `omega` (rad/unit).
pub(crate) fn integrate_segment<F: FnMut(f64) -> Complex64>(
    lo: f64,
    hi: f64,
    breaks: &[f64],
    omega: f64,
    base: &GaussLegendre,
    mut g: F,
) -> Complex64 {
    let mut pts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    pts.push(lo);
    for &b in breaks {
        if b > lo && b < hi {
            pts.push(b);
        }
    }
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut acc = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let cycles = omega * (b - a) / (2.0 * PI);
        let panels = 8 + ceil(cycles) as usize;
        let rule = Rule::composite(a, b, panels, base);
        for (x, wt) in rule.x.iter().zip(&rule.w) {
            acc += g(*x) * *wt;
        }
    }
    acc
}

/// One-dimensional `∫ ψ̂_{j,k}(ξ) conj(ψ̂_{j',k'}(ξ)) dξ` (L² atoms).
fn inner_product_1d(j: i32, k: i64, jp: i32, kp: i64, base: &GaussLegendre) -> Complex64 {
    if (j - jp).abs() > 1 {
        return Complex64::new(0.0, 0.0);
    }
    let [a0, a1] = band_interval(j);
    let [b0, b1] = band_interval(jp);
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let sj = exp2(-(j as f64));
    let sjp = exp2(-(jp as f64));
    let norm = exp2(-0.5 * (j as f64 + jp as f64));
    let omega = (sj * k as f64 - sjp * kp as f64).abs() + 0.5 * (sj + sjp);
    let breaks = [LAMBDA_MID / sj, LAMBDA_MID / sjp];
    let g = |xi: f64| shifted_profile(k, sj * xi) * shifted_profile(kp, sjp * xi).conj();
    let pos = integrate_segment(lo, hi, &breaks, omega, base, g);
    let neg = integrate_segment(lo, hi, &breaks, omega, base, |xi| g(-xi));
    (pos + neg) * norm
}

/// `(2π)^{-d} ∫ ψ̂_{J,K} conj(ψ̂_{J',K'}) dξ`, which is `δ_{(J,K),(J',K')}`
/// for the orthonormal Meyer system.
pub fn inner_product(a: &WaveletAtom, b: &WaveletAtom) -> Result<Complex64> {
    check_dim(a.dim(), b.dim())?;
    let base = GaussLegendre::new(16);
    let mut z = Complex64::new(1.0, 0.0);
    for l in 0..a.dim() {
        z *= inner_product_1d(a.j[l], a.k[l], b.j[l], b.k[l], &base) / (2.0 * PI);
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_is_a_smooth_step() {
        assert_eq!(nu(-0.5), 0.0);
        assert_eq!(nu(1.5), 1.0);
        assert!((nu(0.5) - 0.5).abs() < 1e-15);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((nu(x) + nu(1.0 - x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn profile_partition_of_unity() {
        // |ψ̂¹(λ)|² + |ψ̂¹(λ/2)|² = 1 on [4π/3, 8π/3].
        for i in 0..=200 {
            let l = LAMBDA_MID + (LAMBDA_HI - LAMBDA_MID) * i as f64 / 200.0;
            let a = MeyerProfile.modulus(l);
            let b = MeyerProfile.modulus(0.5 * l);
            assert!((a * a + b * b - 1.0).abs() < 1e-14, "l={l}");
        }
    }

    #[test]
    fn quasi_norm_at_two_is_root_two_pi() {
        let n = atom_quasi_norm(2.0, 1).unwrap();
        assert!((n - libm::sqrt(2.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn huge_dilation_overflows() {
        let a = WaveletAtom::new(alloc::vec![-1200], alloc::vec![0]).unwrap();
        assert!(matches!(a.hat(1.0, &[1.0]), Err(Error::Overflow { .. })));
    }
}
