//! Gauss-Legendre rules on intervals and composite panels.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of a rule on some interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Legendre rule on [-1, 1], nodes ascending. Exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess for the i-th root counted from +1.
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    Rule { nodes, weights }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl Rule {
    /// Affine map of a [-1, 1] rule onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    /// Composite rule on [a, b] with `panels` equal panels of this rule.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Rule {
        let mut nodes = Vec::with_capacity(panels * self.nodes.len());
        let mut weights = Vec::with_capacity(panels * self.nodes.len());
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let piece = self.mapped(lo, lo + width);
            nodes.extend(piece.nodes);
            weights.extend(piece.weights);
        }
        Rule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 40, 128] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let r = gauss_legendre(16);
        for k in 0..32u32 {
            let got = r.integrate(|x| libm::pow(x, k as f64));
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn composite_integrates_sine() {
        let r = gauss_legendre(16).composite(0.0, PI, 4);
        assert!((r.integrate(libm::sin) - 2.0).abs() < 1e-14);
    }
}
