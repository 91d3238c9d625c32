//! Gauss-Legendre rules and an adaptive bisection driver.

use std::f64::consts::PI;

/// `order`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are found by Newton iteration on `P_order` from the usual
    /// cosine initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "rule needs at least one node");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Polynomials up to this degree are integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.order() - 1
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
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

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Sum of the accepted bisection differences.
    pub error: f64,
    pub converged: bool,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0, converged: true };

    pub fn merge(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
        }
    }
}

/// Adaptive bisection: a panel is accepted once the rule on the whole panel
/// and on its two halves agree to the panel's share of the tolerance.
#[derive(Clone, Debug)]
pub struct Adaptive {
    rule: GaussLegendre,
    max_depth: u32,
}

impl Adaptive {
    pub fn new(order: usize, max_depth: u32) -> Self {
        Adaptive { rule: GaussLegendre::new(order), max_depth }
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64) -> Estimate {
        let whole = self.rule.integrate(f, a, b);
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Estimate {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(f, a, mid);
        let right = self.rule.integrate(f, mid, b);
        let halves = left + right;
        let diff = (whole - halves).abs();
        if diff <= tol || mid <= a || mid >= b {
            return Estimate { value: halves, error: diff, converged: true };
        }
        if depth >= self.max_depth {
            return Estimate { value: halves, error: diff, converged: false };
        }
        let l = self.refine(f, a, mid, left, 0.5 * tol, depth + 1);
        l.merge(self.refine(f, mid, b, right, 0.5 * tol, depth + 1))
    }
}
