//! Conforming H² discretization of the clamped degenerate beam.
//!
//! Two-node cubic Hermite elements carry value and slope at each node. The
//! two degrees of freedom at `x = 0` are eliminated, so every discrete
//! function satisfies `y(0) = y'(0) = 0` exactly. Free unknowns are ordered
//! `[w_1, θ_1, w_2, θ_2, …, w_N, θ_N]`; the last pair are the traces at `x = 1`.

use std::fs;
use std::io::Write;
use std::ops::{Deref, DerefMut};
use std::path::{Path, PathBuf};

use crate::band::SymBand;
use crate::coefficient::DegeneracyCoefficient;
use crate::eigen::{largest_eigenvalue_estimate, smallest_eigenpair};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::{graded_nodes, ElementRules, GaussRule};

/// Sub-diagonals of every assembled matrix in the interleaved ordering.
pub const BANDWIDTH: usize = 3;
/// Tolerance on `f(0)`, `f'(0)` for interpolated profiles.
pub const CLAMP_TOL: f64 = 1e-12;

/// Coefficients of a discrete function in the value/slope basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DofVector(Vec<f64>);

impl DofVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(v: Vec<f64>) -> Self {
        Self(v)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for DofVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DofVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Value and first two derivatives of a discrete function at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A quadrature point with the coefficient data and the local basis jets.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub x: f64,
    /// Rule weight times element length.
    pub weight: f64,
    pub a: f64,
    pub a_prime: f64,
    basis: [Jet; 4],
}

#[derive(Debug, Clone)]
struct Element {
    h: f64,
    dofs: [Option<usize>; 4],
    points: Vec<QuadPoint>,
}

/// Hermite cubic shape functions on [0, 1] mapped to an element of length `h`.
fn hermite(s: f64, h: f64) -> [Jet; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        Jet {
            value: 1.0 - 3.0 * s2 + 2.0 * s3,
            d1: (-6.0 * s + 6.0 * s2) / h,
            d2: (-6.0 + 12.0 * s) / (h * h),
        },
        Jet {
            value: h * (s - 2.0 * s2 + s3),
            d1: 1.0 - 4.0 * s + 3.0 * s2,
            d2: (-4.0 + 6.0 * s) / h,
        },
        Jet {
            value: 3.0 * s2 - 2.0 * s3,
            d1: (6.0 * s - 6.0 * s2) / h,
            d2: (6.0 - 12.0 * s) / (h * h),
        },
        Jet {
            value: h * (-s2 + s3),
            d1: -2.0 * s + 3.0 * s2,
            d2: (-2.0 + 6.0 * s) / h,
        },
    ]
}

/// Weighted mass, bending stiffness and boundary couplings of the beam.
#[derive(Debug, Clone)]
pub struct BeamDiscretization {
    coeff: DegeneracyCoefficient,
    nodes: Vec<f64>,
    grading: f64,
    beta: f64,
    gamma: f64,
    elements: Vec<Element>,
    mass: SymBand,
    stiffness: SymBand,
}

impl BeamDiscretization {
    /// Assembles the discretization on `n_elements` elements with nodes
    /// `x_i = (i/n)^grading`.
    pub fn build(
        coeff: &DegeneracyCoefficient,
        n_elements: usize,
        beta: f64,
        gamma: f64,
        grading: f64,
    ) -> Result<Self> {
        if n_elements < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 elements, got {n_elements}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() || !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta = {beta}, gamma = {gamma} must be finite and non-negative"
            )));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grading = {grading} must be >= 1"
            )));
        }
        let nodes = graded_nodes(n_elements, grading);
        let n_dof = 2 * n_elements;
        let rules = ElementRules::new();
        let mut elements = Vec::with_capacity(n_elements);
        let mut mass = SymBand::zeros(n_dof, BANDWIDTH);
        let mut stiffness = SymBand::zeros(n_dof, BANDWIDTH);

        for e in 0..n_elements {
            let (x0, x1) = (nodes[e], nodes[e + 1]);
            let h = x1 - x0;
            let dofs = if e == 0 {
                [None, None, Some(0), Some(1)]
            } else {
                [
                    Some(2 * e - 2),
                    Some(2 * e - 1),
                    Some(2 * e),
                    Some(2 * e + 1),
                ]
            };
            let rule = rules.for_element(e);
            let points: Vec<QuadPoint> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&s, &w)| {
                    let x = x0 + h * s;
                    QuadPoint {
                        x,
                        weight: w * h,
                        a: coeff.a(x),
                        a_prime: coeff.a_prime(x),
                        basis: hermite(s, h),
                    }
                })
                .collect();

            let h2 = h * h;
            let h3 = h2 * h;
            let kloc = [
                [12.0 / h3, 6.0 / h2, -12.0 / h3, 6.0 / h2],
                [6.0 / h2, 4.0 / h, -6.0 / h2, 2.0 / h],
                [-12.0 / h3, -6.0 / h2, 12.0 / h3, -6.0 / h2],
                [6.0 / h2, 2.0 / h, -6.0 / h2, 4.0 / h],
            ];
            let mut mloc = [[0.0; 4]; 4];
            for p in &points {
                let wa = p.weight / p.a;
                for i in 0..4 {
                    for j in 0..4 {
                        mloc[i][j] += wa * p.basis[i].value * p.basis[j].value;
                    }
                }
            }
            for i in 0..4 {
                for j in 0..=i {
                    if let (Some(gi), Some(gj)) = (dofs[i], dofs[j]) {
                        mass.add(gi, gj, mloc[i][j]);
                        stiffness.add(gi, gj, kloc[i][j]);
                    }
                }
            }
            elements.push(Element { h, dofs, points });
        }

        mass.cholesky().map_err(|err| match err {
            Error::NotPositiveDefinite { row, pivot } => Error::Domain(format!(
                "weighted mass matrix is not positive definite at row {row} (pivot {pivot:e}); \
                 quadrature breaks down for K = {}",
                coeff.k()
            )),
            other => other,
        })?;

        Ok(Self {
            coeff: coeff.clone(),
            nodes,
            grading,
            beta,
            gamma,
            elements,
            mass,
            stiffness,
        })
    }

    pub fn coefficient(&self) -> &DegeneracyCoefficient {
        &self.coeff
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dof(&self) -> usize {
        2 * self.elements.len()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Index of the value unknown at `x = 1`.
    pub fn trace_value_index(&self) -> usize {
        self.n_dof() - 2
    }

    /// Index of the slope unknown at `x = 1`.
    pub fn trace_slope_index(&self) -> usize {
        self.n_dof() - 1
    }

    /// `∫ φ_i φ_j / a`.
    pub fn mass(&self) -> &SymBand {
        &self.mass
    }

    /// `∫ φ_i'' φ_j''`.
    pub fn stiffness(&self) -> &SymBand {
        &self.stiffness
    }

    /// `β e_v e_vᵀ + γ e_s e_sᵀ`.
    pub fn boundary_stiffness(&self) -> SymBand {
        let mut b = SymBand::zeros(self.n_dof(), BANDWIDTH);
        b.add(
            self.trace_value_index(),
            self.trace_value_index(),
            self.beta,
        );
        b.add(
            self.trace_slope_index(),
            self.trace_slope_index(),
            self.gamma,
        );
        b
    }

    /// `e_v e_vᵀ + e_s e_sᵀ`: the velocity feedback at `x = 1`.
    pub fn boundary_damping(&self) -> SymBand {
        let mut c = SymBand::zeros(self.n_dof(), BANDWIDTH);
        c.add(self.trace_value_index(), self.trace_value_index(), 1.0);
        c.add(self.trace_slope_index(), self.trace_slope_index(), 1.0);
        c
    }

    /// `S + B`.
    pub fn total_stiffness(&self) -> SymBand {
        let mut k = self.stiffness.clone();
        k.add(
            self.trace_value_index(),
            self.trace_value_index(),
            self.beta,
        );
        k.add(
            self.trace_slope_index(),
            self.trace_slope_index(),
            self.gamma,
        );
        k
    }

    pub fn zeros(&self) -> DofVector {
        DofVector::zeros(self.n_dof())
    }

    fn check_len(&self, u: &[f64]) {
        assert_eq!(u.len(), self.n_dof(), "dof vector length mismatch");
    }

    /// Nodal interpolant of `f` (values and slopes at the free nodes).
    pub fn interpolate(
        &self,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<DofVector> {
        let (f0, d0) = (f(0.0), df(0.0));
        if f0.abs() > CLAMP_TOL || d0.abs() > CLAMP_TOL {
            return Err(Error::InvalidArgument(format!(
                "profile violates the clamped conditions: f(0) = {f0:e}, f'(0) = {d0:e}"
            )));
        }
        let mut u = self.zeros();
        for (j, &x) in self.nodes.iter().enumerate().skip(1) {
            u[2 * j - 2] = f(x);
            u[2 * j - 1] = df(x);
        }
        Ok(u)
    }

    pub fn interpolate_polynomial(&self, p: &Polynomial) -> Result<DofVector> {
        let dp = p.derivative();
        self.interpolate(|x| p.eval(x), |x| dp.eval(x))
    }

    /// Sums `weight * f(point, jets)` over all quadrature points, where
    /// `jets[k]` is field `k` evaluated at the point.
    pub fn integrate<const N: usize>(
        &self,
        fields: [&[f64]; N],
        mut f: impl FnMut(&QuadPoint, &[Jet; N]) -> f64,
    ) -> f64 {
        for u in &fields {
            self.check_len(u);
        }
        let mut total = 0.0;
        for el in &self.elements {
            let mut local = [[0.0; 4]; N];
            for (k, u) in fields.iter().enumerate() {
                for (i, d) in el.dofs.iter().enumerate() {
                    local[k][i] = d.map_or(0.0, |g| u[g]);
                }
            }
            let mut acc = 0.0;
            for p in &el.points {
                let mut jets = [Jet::default(); N];
                for (k, loc) in local.iter().enumerate() {
                    let mut j = Jet::default();
                    for (c, b) in loc.iter().zip(&p.basis) {
                        j.value += c * b.value;
                        j.d1 += c * b.d1;
                        j.d2 += c * b.d2;
                    }
                    jets[k] = j;
                }
                acc += p.weight * f(p, &jets);
            }
            total += acc;
        }
        total
    }

    /// `∫ u²/a`, equal to `uᵀ M_w u`.
    pub fn weighted_l2_norm_sq(&self, u: &[f64]) -> f64 {
        self.integrate([u], |p, j| j[0].value * j[0].value / p.a)
    }

    /// `∫ u v / a`.
    pub fn weighted_l2_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.integrate([u, v], |p, j| j[0].value * j[1].value / p.a)
    }

    /// `∫ (u'')²`, equal to `uᵀ S u`. Evaluated elementwise from local second
    /// derivatives, which avoids the cancellation in the assembled form.
    pub fn bending_norm_sq(&self, u: &[f64]) -> f64 {
        self.bending_inner(u, u)
    }

    /// `∫ u'' v''`.
    pub fn bending_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.check_len(u);
        self.check_len(v);
        let rule = GaussRule::legendre(2);
        let mut total = 0.0;
        for el in &self.elements {
            let lu: Vec<f64> = el.dofs.iter().map(|d| d.map_or(0.0, |g| u[g])).collect();
            let lv: Vec<f64> = el.dofs.iter().map(|d| d.map_or(0.0, |g| v[g])).collect();
            let mut acc = 0.0;
            for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                let b = hermite(s, el.h);
                let du: f64 = lu.iter().zip(&b).map(|(c, j)| c * j.d2).sum();
                let dv: f64 = lv.iter().zip(&b).map(|(c, j)| c * j.d2).sum();
                acc += w * du * dv;
            }
            total += acc * el.h;
        }
        total
    }

    /// `f − (S + B) u`, with the bending part formed from local second
    /// derivatives. On graded meshes the assembled product loses about
    /// `eps · max S_ii` to cancellation; this form keeps the residual near
    /// `eps / h_min`, which is what iterative refinement needs.
    pub fn stiffness_residual(&self, u: &[f64], f: &[f64]) -> Vec<f64> {
        self.check_len(u);
        self.check_len(f);
        let rule = GaussRule::legendre(2);
        let mut r = f.to_vec();
        for el in &self.elements {
            let lu: Vec<f64> = el.dofs.iter().map(|d| d.map_or(0.0, |g| u[g])).collect();
            let mut local = [0.0; 4];
            for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                let b = hermite(s, el.h);
                let du: f64 = lu.iter().zip(&b).map(|(c, j)| c * j.d2).sum();
                for (acc, j) in local.iter_mut().zip(&b) {
                    *acc += w * el.h * du * j.d2;
                }
            }
            for (d, acc) in el.dofs.iter().zip(local) {
                if let Some(g) = d {
                    r[*g] -= acc;
                }
            }
        }
        let (iv, is) = (self.trace_value_index(), self.trace_slope_index());
        r[iv] -= self.beta * u[iv];
        r[is] -= self.gamma * u[is];
        r
    }

    /// `∫(u'')² + β u(1)² + γ u'(1)²`, equal to `uᵀ(S + B)u`.
    pub fn triple_norm_sq(&self, u: &[f64]) -> f64 {
        let (v, s) = (self.trace_value(u), self.trace_slope(u));
        self.bending_norm_sq(u) + self.beta * v * v + self.gamma * s * s
    }

    /// `∫ u''v'' + β u(1)v(1) + γ u'(1)v'(1)`.
    pub fn triple_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.bending_inner(u, v)
            + self.beta * self.trace_value(u) * self.trace_value(v)
            + self.gamma * self.trace_slope(u) * self.trace_slope(v)
    }

    pub fn trace_value(&self, u: &[f64]) -> f64 {
        u[self.trace_value_index()]
    }

    pub fn trace_slope(&self, u: &[f64]) -> f64 {
        u[self.trace_slope_index()]
    }

    /// Second derivative of the discrete function at `x = 1`, one-sided
    /// from the last element.
    pub fn trace_second_derivative(&self, u: &[f64]) -> f64 {
        let el = self.elements.last().expect("at least one element");
        let b = hermite(1.0, el.h);
        el.dofs
            .iter()
            .zip(&b)
            .map(|(d, j)| d.map_or(0.0, |g| u[g]) * j.d2)
            .sum()
    }

    /// Evaluates the discrete function at `x` in `[0, 1]`.
    pub fn evaluate(&self, u: &[f64], x: f64) -> Jet {
        self.check_len(u);
        let e = (self.nodes.partition_point(|&t| t <= x).max(1) - 1).min(self.n_elements() - 1);
        let el = &self.elements[e];
        let s = ((x - self.nodes[e]) / el.h).clamp(0.0, 1.0);
        let b = hermite(s, el.h);
        let mut j = Jet::default();
        for (d, bj) in el.dofs.iter().zip(&b) {
            let c = d.map_or(0.0, |g| u[g]);
            j.value += c * bj.value;
            j.d1 += c * bj.d1;
            j.d2 += c * bj.d2;
        }
        j
    }

    /// `|∫u''''v − (u'''(1)v(1) − u''(1)v'(1) + ∫u''v'')|` for clamped
    /// polynomials of degree ≤ 4. The left side and the traces are exact;
    /// `∫u''v''` uses the discrete bending form when both lie in the cubic
    /// element space and exact elementwise Gauss integration otherwise.
    pub fn gauss_green_residual(&self, u: &Polynomial, v: &Polynomial) -> Result<f64> {
        for p in [u, v] {
            if p.degree() > 4 {
                return Err(Error::InvalidArgument(format!(
                    "degree {} exceeds 4",
                    p.degree()
                )));
            }
            if p.eval(0.0).abs() > CLAMP_TOL || p.derivative().eval(0.0).abs() > CLAMP_TOL {
                return Err(Error::InvalidArgument(
                    "polynomial violates the clamped conditions".into(),
                ));
            }
        }
        let lhs = u.nth_derivative(4).mul(v).integral_unit();
        let traces = u.nth_derivative(3).eval(1.0) * v.eval(1.0)
            - u.nth_derivative(2).eval(1.0) * v.derivative().eval(1.0);
        let bending = if u.degree() <= 3 && v.degree() <= 3 {
            let uh = self.interpolate_polynomial(u)?;
            let vh = self.interpolate_polynomial(v)?;
            self.bending_inner(&uh, &vh)
        } else {
            let (u2, v2) = (u.nth_derivative(2), v.nth_derivative(2));
            let rule = GaussRule::legendre(3);
            self.nodes
                .windows(2)
                .map(|w| rule.integrate(w[0], w[1], |x| u2.eval(x) * v2.eval(x)))
                .sum()
        };
        Ok((lhs - (traces + bending)).abs())
    }

    /// Smallest eigenvalue of `(S + B, M_w)` and a lower estimate of the largest.
    pub fn summary(&self) -> Result<DiscretizationSummary> {
        let k = self.total_stiffness();
        let start: Vec<f64> = (0..self.n_dof())
            .map(|i| {
                if i % 2 == 0 {
                    self.nodes[i / 2 + 1].powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        // S + B is singular-free: the clamp removes rigid motions
        let low = smallest_eigenpair(&k, &self.mass, &start, 1e-12, 5000)?;
        let high = largest_eigenvalue_estimate(&k, &self.mass, 200)?;
        Ok(DiscretizationSummary {
            n_elements: self.n_elements(),
            n_dof: self.n_dof(),
            grading: self.grading,
            bandwidth: BANDWIDTH,
            lambda_min: low.value,
            lambda_max_estimate: high,
        })
    }

    /// Writes the four matrices in coordinate format (`row col value`,
    /// zero-based) into `dir`.
    pub fn dump_matrices(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mats = [
            ("mass.coo", self.mass.clone()),
            ("stiffness.coo", self.stiffness.clone()),
            ("boundary_stiffness.coo", self.boundary_stiffness()),
            ("boundary_damping.coo", self.boundary_damping()),
        ];
        let mut out = Vec::new();
        for (name, m) in mats {
            let path = dir.join(name);
            let trip = m.triplets();
            let mut f = fs::File::create(&path)?;
            writeln!(f, "% {} {} {}", m.dim(), m.dim(), trip.len())?;
            for (i, j, v) in trip {
                writeln!(f, "{i} {j} {v:.16e}")?;
            }
            out.push(path);
        }
        Ok(out)
    }
}

/// Mesh and spectrum facts printed in run reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationSummary {
    pub n_elements: usize,
    pub n_dof: usize,
    pub grading: f64,
    pub bandwidth: usize,
    pub lambda_min: f64,
    pub lambda_max_estimate: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(alpha: f64, n: usize, beta: f64, gamma: f64) -> BeamDiscretization {
        let c = DegeneracyCoefficient::power_law(alpha).unwrap();
        BeamDiscretization::build(&c, n, beta, gamma, 2.0).unwrap()
    }

    #[test]
    fn stiffness_residual_matches_assembled_product() {
        let d = disc(0.7, 8, 1.5, 0.5);
        let u: Vec<f64> = (0..d.n_dof())
            .map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.1)
            .collect();
        let f: Vec<f64> = (0..d.n_dof()).map(|i| i as f64).collect();
        let ku = d.total_stiffness().mul_vec(&u);
        let r = d.stiffness_residual(&u, &f);
        let scale = ku.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..d.n_dof() {
            assert!((r[i] - (f[i] - ku[i])).abs() <= 1e-12 * scale, "row {i}");
        }
    }

    #[test]
    fn build_argument_checks() {
        let c = DegeneracyCoefficient::power_law(0.5).unwrap();
        assert!(BeamDiscretization::build(&c, 3, 0.0, 0.0, 2.0).is_err());
        assert!(BeamDiscretization::build(&c, 8, -1.0, 0.0, 2.0).is_err());
        assert!(BeamDiscretization::build(&c, 8, 0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn boundary_matrix_vanishes_without_feedback_weights() {
        let d = disc(0.5, 4, 0.0, 0.0);
        assert_eq!(d.boundary_stiffness().max_abs(), 0.0);
        let d = disc(0.5, 4, 2.0, 3.0);
        let b = d.boundary_stiffness();
        assert_eq!(b.get(6, 6), 2.0);
        assert_eq!(b.get(7, 7), 3.0);
        assert_eq!(b.triplets().len(), 2);
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let d = disc(0.5, 16, 0.0, 0.0);
        let y = d.interpolate(|x| x * x, |x| 2.0 * x).unwrap();
        assert!((d.bending_norm_sq(&y) - 4.0).abs() < 1e-12);
        let y = d.interpolate(|x| x.powi(3), |x| 3.0 * x * x).unwrap();
        assert!((d.bending_norm_sq(&y) - 12.0).abs() < 1e-11);
        let z = d.interpolate(|_| 0.0, |_| 0.0).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        assert!(d.interpolate(|x| x + 0.0, |_| 1.0).is_err());
    }

    #[test]
    fn triple_norm_examples() {
        let d = disc(0.5, 16, 1.0, 1.0);
        let y = d.interpolate(|x| x * x, |x| 2.0 * x).unwrap();
        assert!((d.triple_norm_sq(&y) - 9.0).abs() < 1e-11);
        let d0 = disc(0.5, 16, 0.0, 0.0);
        assert_eq!(d0.triple_norm_sq(&y), d0.bending_norm_sq(&y));
    }

    #[test]
    fn field_forms_match_assembled_matrices() {
        let d = disc(0.7, 12, 0.5, 2.0);
        let u: Vec<f64> = (0..d.n_dof())
            .map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3)
            .collect();
        let m = d.mass().bilinear(&u, &u);
        assert!((d.weighted_l2_norm_sq(&u) - m).abs() <= 1e-12 * m);
        let s = d.total_stiffness().bilinear(&u, &u);
        assert!((d.triple_norm_sq(&u) - s).abs() <= 1e-9 * s);
    }

    #[test]
    fn evaluate_matches_nodal_data() {
        let d = disc(1.0, 8, 0.0, 0.0);
        let y = d.interpolate(|x| x.powi(3), |x| 3.0 * x * x).unwrap();
        for x in [0.0, 0.013, 0.3, 0.77, 1.0] {
            let j = d.evaluate(&y, x);
            assert!((j.value - x.powi(3)).abs() < 1e-14);
            assert!((j.d1 - 3.0 * x * x).abs() < 1e-13);
            assert!((j.d2 - 6.0 * x).abs() < 1e-10);
        }
        assert!((d.trace_second_derivative(&y) - 6.0).abs() < 1e-10);
    }

    #[test]
    fn gauss_green_examples() {
        let d = disc(0.5, 16, 0.0, 0.0);
        let x2 = Polynomial::monomial(2);
        let x3 = Polynomial::monomial(3);
        let x4 = Polynomial::monomial(4);
        assert!(d.gauss_green_residual(&x2, &x2).unwrap() < 1e-12);
        assert!(d.gauss_green_residual(&x4, &x2).unwrap() < 1e-12);
        assert!(d.gauss_green_residual(&x3, &x3).unwrap() < 1e-11);
        assert!(d
            .gauss_green_residual(&Polynomial::monomial(1), &x2)
            .is_err());
        assert!(d
            .gauss_green_residual(&Polynomial::monomial(5), &x2)
            .is_err());
    }

    #[test]
    fn pencil_is_positive() {
        let d = disc(1.5, 16, 0.0, 0.0);
        let s = d.summary().unwrap();
        assert!(s.lambda_min > 0.0);
        assert!(s.lambda_max_estimate > s.lambda_min);
    }
}
