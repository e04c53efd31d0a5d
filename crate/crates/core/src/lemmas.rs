//! Brute-force numerical oracles for the deterministic inequalities that
//! underpin the regularity estimates.  Nothing here uses randomness.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::p_star;
use crate::error::{invalid, Result};
use crate::math::{exp, exp2, ln, powf, powi, sqrt};
use crate::regularity::{delta_b, LatticeFunction};
use crate::lattice::Lattice;

/// Slack allowed before a point counts as a violation.
pub const SLACK: f64 = 1e-12;

/// Outcome of one oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    /// Oracle name.
    pub name: String,
    /// Number of checked points.
    pub checked: usize,
    /// Violating witnesses (human readable).
    pub violations: Vec<String>,
    /// Empirical constant on the default grid (when meaningful).
    pub constant: f64,
    /// The same constant on the refined grid.
    pub refined_constant: f64,
    /// `|refined / constant - 1| ≤ 1%`.
    pub stable: bool,
}

impl LemmaReport {
    /// No violations and a refinement-stable constant.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.stable
    }

    fn new(name: &str) -> Self {
        LemmaReport {
            name: name.into(),
            checked: 0,
            violations: Vec::new(),
            constant: 0.0,
            refined_constant: 0.0,
            stable: true,
        }
    }

    fn set_constants(&mut self, c: f64, refined: f64) {
        self.constant = c;
        self.refined_constant = refined;
        self.stable = c.is_finite() && refined.is_finite() && (refined / c - 1.0).abs() <= 0.01;
        if !self.stable {
            self.violations.push(format!("constant not refinement-stable: {c} -> {refined}"));
        }
    }
}

fn logr(x: f64) -> f64 {
    sqrt(ln(3.0 + x))
}

/// `0, then n-1 log-spaced points up to hi (from 1e-6·hi)`.
fn log_grid(hi: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    let lo = hi * 1e-6;
    for i in 0..n - 1 {
        v.push(lo * powf(hi / lo, i as f64 / (n - 2).max(1) as f64));
    }
    v
}

/// `√log(3+u'+u'') ≤ 2 √log(3+u') √log(3+u'')` on a `100 × 100` grid of
/// `[0, 10⁶]²` (zero plus log-spaced points); the reported constant is the
/// largest ratio of the two sides.
pub fn subadditivity() -> LemmaReport {
    let mut rep = LemmaReport::new("subadditivity of sqrt(log(3+u))");
    let run = |n: usize, rep: &mut LemmaReport, record: bool| -> f64 {
        let g = log_grid(1e6, n);
        let mut worst = 0.0f64;
        for &u1 in &g {
            for &u2 in &g {
                let lhs = logr(u1 + u2);
                let rhs = 2.0 * logr(u1) * logr(u2);
                worst = worst.max(lhs / rhs);
                if record {
                    rep.checked += 1;
                    if lhs > rhs * (1.0 + SLACK) {
                        rep.violations.push(format!("u'={u1}, u''={u2}: {lhs} > {rhs}"));
                    }
                }
            }
        }
        worst
    };
    let c = run(100, &mut rep, true);
    let r = run(199, &mut rep, true);
    rep.set_constants(c, r);
    rep
}

/// `Σ_{|k| ≤ 10⁵} √log(3+θ+|k|) / (2+|v-k|)^{p*} ≤ c √log(3+θ+|v|)`:
/// the supremum of the ratio over a `(θ, v)` grid must not grow by more
/// than 1% when the grid is refined.
pub fn lattice_log_sum(alpha: f64) -> Result<LemmaReport> {
    crate::wavelet::check_alpha(alpha)?;
    let p = p_star(alpha) as i32;
    let kmax: i64 = 100_000;
    let mut rep = LemmaReport::new(&format!("lattice log sum (p* = {p})"));
    let sup_over = |thetas: &[f64], vs: &[f64], rep: &mut LemmaReport| -> f64 {
        let mut worst = 0.0f64;
        for &th in thetas {
            let lg: Vec<f64> = (0..=kmax).map(|k| logr(th + k as f64)).collect();
            for &v in vs {
                let mut s = 0.0;
                for k in -kmax..=kmax {
                    s += lg[k.unsigned_abs() as usize] / powi(2.0 + (v - k as f64).abs(), p);
                }
                let r = s / logr(th + v.abs());
                rep.checked += 1;
                if !r.is_finite() {
                    rep.violations.push(format!("theta={th}, v={v}: non-finite sum"));
                }
                worst = worst.max(r);
            }
        }
        worst
    };
    let grid = |n_th: usize, n_v: usize| -> (Vec<f64>, Vec<f64>) {
        let th = log_grid(1e4, n_th);
        let pos = log_grid(1e3, n_v);
        let mut v: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        v.extend(pos.iter().skip(1));
        (th, v)
    };
    let (t0, v0) = grid(8, 12);
    let (t1, v1) = grid(15, 23);
    let c = sup_over(&t0, &v0, &mut rep);
    let r = sup_over(&t1, &v1, &mut rep);
    rep.set_constants(c, r);
    Ok(rep)
}

/// Parameters of the multi-scale series oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSeries {
    /// Stability index in `(0, 2]`.
    pub alpha: f64,
    /// `a' ∈ (0, 1)`.
    pub a_prime: f64,
    /// `δ > 0`.
    pub delta: f64,
    /// Dimension.
    pub d: usize,
    /// Distinguished axis `r ∈ 1..=d`.
    pub r: usize,
}

/// Result of [`scale_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    /// Partial sums `S_N` for `N = 0, 1, …`.
    pub partial_sums: Vec<f64>,
    /// Last relative increment `|S_N - S_{N-1}| / S_N`.
    pub last_increment: f64,
    /// Whether the increment dropped below the target.
    pub converged: bool,
}

/// Partial sums over `J ∈ {0..N}^d` of
/// `2^{-j_r(1-a')} (Σ 2^{-j_l})^{-d/α} Π 2^{-j_l/α} √log(3+j_l) (1+j_l)^{1/α+δ}`,
/// extended one shell at a time until the relative Cauchy increment is below
/// `tol` or `n_max` is reached.
pub fn scale_series(p: &ScaleSeries, tol: f64, n_max: usize) -> Result<SeriesReport> {
    if !(p.alpha > 0.0 && p.alpha <= 2.0)
        || !(p.a_prime > 0.0 && p.a_prime < 1.0)
        || !(p.delta > 0.0)
        || p.d == 0
        || p.d > 3
        || p.r == 0
        || p.r > p.d
    {
        return Err(invalid("scale series needs alpha in (0,2], a' in (0,1), delta > 0, 1 <= r <= d <= 3"));
    }
    let d = p.d;
    let axis: Vec<f64> = (0..=n_max)
        .map(|j| {
            let jf = j as f64;
            exp2(-jf / p.alpha) * logr(jf) * powf(1.0 + jf, 1.0 / p.alpha + p.delta)
        })
        .collect();
    let term = |j: &[usize]| -> f64 {
        let mut prod = exp2(-(j[p.r - 1] as f64) * (1.0 - p.a_prime));
        let mut s = 0.0;
        for &jl in j {
            prod *= axis[jl];
            s += exp2(-(jl as f64));
        }
        prod * powf(s, -(d as f64) / p.alpha)
    };
    let mut sums = Vec::new();
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for n in 0..=n_max {
        // Shell: max_l j_l = n.
        let mut shell = 0.0;
        let mut j = vec![0usize; d];
        let count = (n + 1).pow(d as u32);
        for c in 0..count {
            let mut r = c;
            for jl in j.iter_mut() {
                *jl = r % (n + 1);
                r /= n + 1;
            }
            if j.contains(&n) {
                shell += term(&j);
            }
        }
        total += shell;
        sums.push(total);
        if n > 0 {
            last = shell.abs() / total;
            if last < tol {
                converged = true;
                break;
            }
        }
    }
    Ok(SeriesReport { partial_sums: sums, last_increment: last, converged })
}

/// A univariate factor `p(x) e^{-x²/(2s²)}` with polynomial `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFactor {
    /// Coefficients of `p`, lowest degree first.
    pub poly: Vec<f64>,
    /// Width `s`.
    pub width: f64,
}

impl BumpFactor {
    /// `d^n/dx^n` of the factor at `x`, from the exact recursion
    /// `(p e^{-x²/2s²})' = (p' - x p / s²) e^{-x²/2s²}`.
    pub fn derivative(&self, n: u32, x: f64) -> f64 {
        let mut p = self.poly.clone();
        let inv = 1.0 / (self.width * self.width);
        for _ in 0..n {
            let mut q = vec![0.0; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                if i > 0 {
                    q[i - 1] += i as f64 * c;
                }
                q[i + 1] -= c * inv;
            }
            p = q;
        }
        let mut v = 0.0;
        for c in p.iter().rev() {
            v = v * x + c;
        }
        v * exp(-0.5 * x * x * inv)
    }
}

/// `g(x) = Σ_terms Π_l factor_{term,l}(x_l)`, smooth with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTestFunction {
    /// Separable terms.
    pub terms: Vec<Vec<BumpFactor>>,
}

impl SmoothTestFunction {
    /// `∂^b g(x)`.
    pub fn partial(&self, b: &[u32], x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.iter().enumerate().map(|(l, f)| f.derivative(b[l], x[l])).product::<f64>())
            .sum()
    }

    /// A fixed family of test functions for dimension `d`.
    pub fn family(d: usize) -> Vec<Self> {
        let f = |poly: &[f64], width: f64| BumpFactor { poly: poly.to_vec(), width };
        let shapes: [(&[f64], f64); 4] = [
            (&[1.0], 1.0),
            (&[0.3, -1.0, 0.5], 0.7),
            (&[0.0, 2.0, 0.0, -1.0], 1.5),
            (&[1.0, 0.0, -3.0], 0.4),
        ];
        (0..shapes.len())
            .map(|i| {
                let a: Vec<BumpFactor> =
                    (0..d).map(|l| f(shapes[(i + l) % 4].0, shapes[(i + l) % 4].1)).collect();
                let b: Vec<BumpFactor> = (0..d)
                    .map(|l| f(shapes[(i + l + 1) % 4].0, 0.5 * shapes[(i + l + 1) % 4].1))
                    .collect();
                SmoothTestFunction { terms: vec![a, b] }
            })
            .collect()
    }
}

fn multi_indices_upto(d: usize, max_len: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..=max_len {
                let mut q = p.clone();
                q.push(v);
                if q.iter().sum::<u32>() <= max_len {
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

fn sup_partial_on_cube(g: &SmoothTestFunction, b: &[u32], half: f64, n: usize) -> f64 {
    let d = b.len();
    let total = (2 * n + 1).pow(d as u32);
    let mut x = vec![0.0; d];
    let mut sup = 0.0f64;
    for c in 0..total {
        let mut r = c;
        for xl in x.iter_mut() {
            *xl = -half + (r % (2 * n + 1)) as f64 * half / n as f64;
            r /= 2 * n + 1;
        }
        sup = sup.max(g.partial(b, &x).abs());
    }
    sup
}

/// `‖Δ^B_{(h)} g‖_{T,∞} ≤ 2^{l(B)} min_{B' ≤ B} ‖∂^{B'} g‖_{T 2^{l(B)},∞} Π|h_l|^{b'_l}`
/// for the test family, all `B` with `l(B) ≤ 3`, `T ∈ {0.5, 1, 2}` and a grid
/// of lattice-aligned `h`.  The right-hand sup norms are taken on a grid
/// four times finer than the left-hand side.
pub fn increment_derivative_bound(d: usize) -> Result<LemmaReport> {
    if d == 0 || d > 2 {
        return Err(invalid("increment oracle is run for d = 1 or 2"));
    }
    let mut rep = LemmaReport::new(&format!("increment vs derivative bound (d = {d})"));
    let cells = if d == 1 { 256 } else { 24 };
    let mut worst = 0.0f64;
    for g in SmoothTestFunction::family(d) {
        for &t in &[0.5, 1.0, 2.0] {
            for b in multi_indices_upto(d, 3) {
                let lb: u32 = b.iter().sum();
                if lb == 0 {
                    continue;
                }
                // Lattice on [-T, T + l(B) T] with T/cells spacing.
                let step = t / cells as f64;
                let npts = cells * (2 + lb as usize) + 1;
                let lat = Lattice::new(vec![-t; d], vec![step; d], vec![npts; d])?;
                let fvals = LatticeFunction::sample(lat, |x| g.partial(&vec![0; d], x));
                let big = t * exp2(lb as f64);
                let sub: Vec<Vec<u32>> = multi_indices_upto(d, lb)
                    .into_iter()
                    .filter(|bp| bp.iter().zip(&b).all(|(x, y)| x <= y))
                    .collect();
                let sups: Vec<f64> = sub
                    .iter()
                    .map(|bp| sup_partial_on_cube(&g, bp, big, if d == 1 { 4 * 512 } else { 96 }))
                    .collect();
                for s in [1usize, 3, 8, cells / 4, cells] {
                    let shift = vec![s; d];
                    let inc = delta_b(&fvals, &b, &shift)?;
                    let lhs = inc.sup_on_cube(t);
                    let h = s as f64 * step;
                    let rhs = sub
                        .iter()
                        .zip(&sups)
                        .map(|(bp, sp)| {
                            sp * bp.iter().map(|&e| powi(h, e as i32)).product::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min)
                        * exp2(lb as f64);
                    rep.checked += 1;
                    if lhs > rhs * (1.0 + SLACK) + SLACK {
                        rep.violations.push(format!("T={t}, B={b:?}, h={h}: {lhs} > {rhs}"));
                    }
                    if rhs > 0.0 {
                        worst = worst.max(lhs / rhs);
                    }
                }
            }
        }
    }
    rep.constant = worst;
    rep.refined_constant = worst;
    Ok(rep)
}

/// Which dyadic sum [`dyadic_sum_ratio`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DyadicCase {
    /// `Σ_{j ≤ 0} 2^{j/α}(1+|j|)^μ min(|2^j z|^b, 1) / |z|^b`.
    Low {
        /// `α > 0`.
        alpha: f64,
    },
    /// `Σ_{j ≥ 1} 2^{-ja}(1+j)^μ min(|2^j z|^b, 1)` over the matching
    /// normaliser: `|z|^b` (b < a), `|z|^a log(3+|z|^{-1})^{μ+1}` (b = a),
    /// `|z|^a log(3+|z|^{-1})^μ` (b > a).
    High {
        /// `a > 0`.
        a: f64,
    },
}

/// The ratio of [`DyadicCase`] at `z ≠ 0`.
pub fn dyadic_sum_ratio(case: DyadicCase, mu: f64, b: f64, z: f64) -> f64 {
    let az = z.abs();
    if az == 0.0 {
        return 0.0;
    }
    let term = |j: i32| -> f64 {
        let m = if b == 0.0 { 1.0 } else { powf(exp2(j as f64) * az, b).min(1.0) };
        match case {
            DyadicCase::Low { alpha } => exp2(j as f64 / alpha) * powf(1.0 + j.abs() as f64, mu) * m,
            DyadicCase::High { a } => exp2(-(j as f64) * a) * powf(1.0 + j as f64, mu) * m,
        }
    };
    let mut s = 0.0;
    match case {
        DyadicCase::Low { .. } => {
            let mut j = 0;
            loop {
                let t = term(j);
                s += t;
                if t < 1e-18 * s || j < -4000 {
                    break;
                }
                j -= 1;
            }
            s / powf(az, b)
        }
        DyadicCase::High { a } => {
            let mut j = 1;
            loop {
                let t = term(j);
                s += t;
                if (t < 1e-18 * s && j > 60) || j > 4000 {
                    break;
                }
                j += 1;
            }
            let lg = ln(3.0 + 1.0 / az);
            let den = if b < a {
                powf(az, b)
            } else if b == a {
                powf(az, a) * powf(lg, mu + 1.0)
            } else {
                powf(az, a) * powf(lg, mu)
            };
            s / den
        }
    }
}

/// Supremum over `z ∈ [-T, T]` of [`dyadic_sum_ratio`], on a log-spaced grid
/// of `|z| ∈ [10^{-12} T, T]`, compared with a grid of twice the density.
pub fn dyadic_sum_oracle(case: DyadicCase, mu: f64, b: f64, t: f64) -> LemmaReport {
    let label = match case {
        DyadicCase::Low { alpha } => format!("low-scale dyadic sum (alpha={alpha}, mu={mu}, b={b})"),
        DyadicCase::High { a } => format!("high-scale dyadic sum (a={a}, mu={mu}, b={b})"),
    };
    let mut rep = LemmaReport::new(&label);
    let sup = |n: usize, rep: &mut LemmaReport| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let z = t * powf(1e-12, i as f64 / (n - 1) as f64);
            let r = dyadic_sum_ratio(case, mu, b, z);
            rep.checked += 1;
            if !r.is_finite() {
                rep.violations.push(format!("z={z}: non-finite ratio"));
            }
            worst = worst.max(r);
        }
        worst
    };
    let c = sup(400, &mut rep);
    let r = sup(799, &mut rep);
    rep.set_constants(c, r);
    rep
}

/// Run every oracle at its default grid.
pub fn run_all() -> Result<Vec<LemmaReport>> {
    let mut out = vec![subadditivity()];
    for alpha in [0.3, 0.7, 1.5, 2.0] {
        out.push(lattice_log_sum(alpha)?);
    }
    for (alpha, a_prime, delta, d, r) in
        [(0.7, 0.3, 0.1, 1, 1), (1.5, 0.6, 0.5, 1, 1), (2.0, 0.5, 0.1, 2, 1), (1.2, 0.4, 0.2, 2, 2)]
    {
        let p = ScaleSeries { alpha, a_prime, delta, d, r };
        let s = scale_series(&p, 1e-6, if d == 1 { 4000 } else { 600 })?;
        let mut rep = LemmaReport::new(&format!(
            "scale series (alpha={alpha}, a'={a_prime}, delta={delta}, d={d}, r={r})"
        ));
        rep.checked = s.partial_sums.len();
        let total = *s.partial_sums.last().unwrap_or(&f64::NAN);
        if !s.converged || !total.is_finite() {
            rep.violations.push(format!("no convergence: last increment {}", s.last_increment));
        }
        rep.constant = total;
        rep.refined_constant = total;
        out.push(rep);
    }
    out.push(increment_derivative_bound(1)?);
    out.push(increment_derivative_bound(2)?);
    for &mu in &[0.0, 0.5, 2.0] {
        for &b in &[0.0, 1.0, 2.0] {
            out.push(dyadic_sum_oracle(DyadicCase::Low { alpha: 0.8 }, mu, b, 1.0));
        }
        for &(a, b) in &[(1.0, 0.5), (1.0, 1.0), (1.0, 2.0), (0.4, 0.0), (1.5, 1.5)] {
            out.push(dyadic_sum_oracle(DyadicCase::High { a }, mu, b, 2.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivative_matches_difference() {
        let f = BumpFactor { poly: vec![0.3, -1.0, 0.5], width: 0.7 };
        let h = 1e-5;
        let fd = (f.derivative(0, 0.4 + h) - f.derivative(0, 0.4 - h)) / (2.0 * h);
        assert!((fd - f.derivative(1, 0.4)).abs() < 1e-8);
    }
}
