//! Gauss–Legendre rules and composite (panelled) rules on intervals.

use alloc::vec::Vec;

use crate::math::{cos, PI};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    /// Nodes in increasing order.
    pub nodes: Vec<f64>,
    /// Positive weights summing to 2.
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// The `n`-point rule (exact for polynomials of degree `2n-1`).
    ///
    /// Nodes are located by Newton iteration on the three-term recurrence,
    /// started from the Tricomi asymptotic guess; half the nodes are computed
    /// and the rest obtained by symmetry.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the rule is empty (never true for constructed rules).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional quadrature rule `Σ w_i g(x_i)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule {
    /// Abscissae.
    pub x: Vec<f64>,
    /// Weights.
    pub w: Vec<f64>,
}

impl Rule {
    /// Composite rule on `[a, b]` with `panels` equal panels of `base`.
    pub fn composite(a: f64, b: f64, panels: usize, base: &GaussLegendre) -> Rule {
        let mut rule = Rule::default();
        rule.push_composite(a, b, panels, base);
        rule
    }

    /// Append a composite rule on `[a, b]` to `self`.
    pub fn push_composite(&mut self, a: f64, b: f64, panels: usize, base: &GaussLegendre) {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (t, w) in base.nodes.iter().zip(&base.weights) {
                self.x.push(lo + 0.5 * h * (t + 1.0));
                self.w.push(0.5 * h * w);
            }
        }
    }

    /// Append the rule reflected through the origin, giving a symmetric rule.
    pub fn mirrored(&self) -> Rule {
        let mut out = Rule::default();
        for i in (0..self.x.len()).rev() {
            out.x.push(-self.x[i]);
            out.w.push(self.w[i]);
        }
        out.x.extend_from_slice(&self.x);
        out.w.extend_from_slice(&self.w);
        out
    }

    /// Apply the rule to `g`.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(&x, &w)| w * g(x)).sum()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Whether the rule has no nodes.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        for n in [1, 2, 5, 16, 64, 257] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let q: f64 = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(x, w)| w * libm::pow(*x, deg as f64))
                .sum();
            assert!((q - exact).abs() < 1e-12, "n={n}");
            // x^(2n-2) is also exact; it is even so the integral is nonzero.
            let e = 2 * n - 2;
            let q: f64 = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(x, w)| w * libm::pow(*x, e as f64))
                .sum();
            assert!((q - 2.0 / (e as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn composite_rule_integrates_oscillation() {
        let gl = GaussLegendre::new(16);
        let r = Rule::composite(0.0, 10.0, 20, &gl);
        let q = r.integrate(|x| libm::cos(7.0 * x));
        assert!((q - libm::sin(70.0) / 7.0).abs() < 1e-13);
    }
}
