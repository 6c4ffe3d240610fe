//! Gauss–Legendre rules on the reference interval [0, 1].

use std::f64::consts::PI;

/// A quadrature rule on [0, 1]: nodes and weights summing to one.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// n-point Gauss–Legendre rule mapped to [0, 1]. Exact for degree 2n - 1.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, z);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(a + h * s))
            .sum::<f64>()
            * h
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (z * p - pm1) / (z * z - 1.0);
    (p, d)
}


/// Points of the rule used on the element touching `x = 0`.
pub const FIRST_ELEMENT_POINTS: usize = 16;
/// Points of the rule used on every other element.
pub const INTERIOR_POINTS: usize = 4;

/// The pair of rules used for weighted element integrals: an elevated-order
/// rule on the element adjacent to the degeneracy and a standard one elsewhere.
#[derive(Debug, Clone)]
pub struct ElementRules {
    first: GaussRule,
    interior: GaussRule,
}

impl ElementRules {
    pub fn new() -> Self {
        Self {
            first: GaussRule::legendre(FIRST_ELEMENT_POINTS),
            interior: GaussRule::legendre(INTERIOR_POINTS),
        }
    }

    pub fn for_element(&self, e: usize) -> &GaussRule {
        if e == 0 {
            &self.first
        } else {
            &self.interior
        }
    }
}

impl Default for ElementRules {
    fn default() -> Self {
        Self::new()
    }
}

/// Nodes `x_i = (i/n)^grading`, `i = 0..=n`.
pub fn graded_nodes(n: usize, grading: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == n {
                1.0
            } else {
                (i as f64 / n as f64).powf(grading)
            }
        })
        .collect()
}
