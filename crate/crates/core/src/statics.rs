//! The boundary-loaded static problem: find `z` clamped at 0 with
//! `∫z''φ'' + βz(1)φ(1) + γz'(1)φ'(1) = λφ(1) + μφ'(1)` for every admissible `φ`.
//!
//! Its strong form forces `z'''' = 0`, so `z = p x² + q x³` with
//! `βz(1) − z'''(1) = λ` and `γz'(1) + z''(1) = μ`. That closed form is the
//! oracle for the whole assembly chain: cubics lie in the element space.

use crate::discretization::{BeamDiscretization, DofVector};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Relative slack allowed on the a-priori estimates.
pub const ESTIMATE_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticProblem {
    pub lambda: f64,
    pub mu: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StaticProblem {
    pub fn new(lambda: f64, mu: f64, beta: f64, gamma: f64) -> Result<Self> {
        if ![lambda, mu, beta, gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "static problem data must be finite".into(),
            ));
        }
        if beta < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "beta = {beta}, gamma = {gamma} must be non-negative"
            )));
        }
        Ok(Self {
            lambda,
            mu,
            beta,
            gamma,
        })
    }

    /// `(|λ| + |μ|)²`.
    pub fn load_sq(&self) -> f64 {
        (self.lambda.abs() + self.mu.abs()).powi(2)
    }
}

/// `z(x) = p x² + q x³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSolution {
    pub p: f64,
    pub q: f64,
}

impl CubicSolution {
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(vec![0.0, 0.0, self.p, self.q])
    }

    pub fn value(&self, x: f64) -> f64 {
        x * x * (self.p + self.q * x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        x * (2.0 * self.p + 3.0 * self.q * x)
    }

    pub fn curvature(&self, x: f64) -> f64 {
        2.0 * self.p + 6.0 * self.q * x
    }

    /// Residuals of the two boundary rows at `x = 1`.
    pub fn boundary_residuals(&self, prob: &StaticProblem) -> (f64, f64) {
        let shear = prob.beta * self.value(1.0) - 6.0 * self.q - prob.lambda;
        let moment = prob.gamma * self.slope(1.0) + self.curvature(1.0) - prob.mu;
        (shear, moment)
    }

    /// `∫(z'')² + βz(1)² + γz'(1)²` in closed form.
    pub fn triple_norm_sq(&self, beta: f64, gamma: f64) -> f64 {
        // ∫(2p + 6qx)² = 4p² + 12pq + 12q²
        let (p, q) = (self.p, self.q);
        4.0 * p * p
            + 12.0 * p * q
            + 12.0 * q * q
            + beta * self.value(1.0).powi(2)
            + gamma * self.slope(1.0).powi(2)
    }
}

const REFINEMENT_SWEEPS: usize = 3;

/// Solves the 2×2 boundary system for the exact cubic. The determinant
/// `βγ + 4β + 12γ + 12` is at least 12 for admissible `β, γ`.
pub fn cubic_oracle(prob: &StaticProblem) -> CubicSolution {
    let (b, g) = (prob.beta, prob.gamma);
    // [ β      β − 6  ] [p]   [λ]
    // [ 2γ + 2 3γ + 6 ] [q] = [μ]
    let det = b * g + 4.0 * b + 12.0 * g + 12.0;
    let p = (prob.lambda * (3.0 * g + 6.0) - (b - 6.0) * prob.mu) / det;
    let q = (b * prob.mu - (2.0 * g + 2.0) * prob.lambda) / det;
    CubicSolution { p, q }
}

/// Solves the discrete system `(S + B) z = λ e_v + μ e_s`.
///
/// The graded mesh makes `S + B` ill conditioned (about `h_min⁻³`), so the
/// Cholesky solution is polished by iterative refinement against
/// [`BeamDiscretization::stiffness_residual`].
pub fn solve_variational(disc: &BeamDiscretization, prob: &StaticProblem) -> Result<DofVector> {
    if disc.beta() != prob.beta || disc.gamma() != prob.gamma {
        return Err(Error::InvalidArgument(format!(
            "discretization built for (beta, gamma) = ({}, {}) but problem has ({}, {})",
            disc.beta(),
            disc.gamma(),
            prob.beta,
            prob.gamma
        )));
    }
    let chol = disc.total_stiffness().cholesky()?;
    let mut rhs = vec![0.0; disc.n_dof()];
    rhs[disc.trace_value_index()] = prob.lambda;
    rhs[disc.trace_slope_index()] = prob.mu;
    let mut z = rhs.clone();
    chol.solve_in_place(&mut z);
    for _ in 0..REFINEMENT_SWEEPS {
        let mut r = disc.stiffness_residual(&z, &rhs);
        chol.solve_in_place(&mut r);
        for (zi, ri) in z.iter_mut().zip(&r) {
            *zi += ri;
        }
    }
    Ok(DofVector::from_vec(z))
}

/// Left and right sides of the two a-priori estimates for the discrete solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub ok: bool,
    /// `∫z²/a` against `(4 c_hp + 1)(|λ| + |μ|)²`.
    pub weighted_l2: (f64, f64),
    /// `|||z|||²` against `(|λ| + |μ|)²`.
    pub triple: (f64, f64),
}

pub fn verify_estimates(
    disc: &BeamDiscretization,
    prob: &StaticProblem,
    z: &[f64],
    c_hp: f64,
) -> EstimateReport {
    let load = prob.load_sq();
    let weighted_l2 = (disc.weighted_l2_norm_sq(z), (4.0 * c_hp + 1.0) * load);
    let triple = (disc.triple_norm_sq(z), load);
    let holds = |(lhs, rhs): (f64, f64)| lhs <= rhs * (1.0 + ESTIMATE_SLACK);
    EstimateReport {
        ok: holds(weighted_l2) && holds(triple),
        weighted_l2,
        triple,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::DegeneracyCoefficient;

    fn prob(l: f64, m: f64, b: f64, g: f64) -> StaticProblem {
        StaticProblem::new(l, m, b, g).unwrap()
    }

    #[test]
    fn refined_solve_reaches_the_cubic_on_a_fine_graded_mesh() {
        let c = DegeneracyCoefficient::power_law(0.5).unwrap();
        let d = BeamDiscretization::build(&c, 128, 1.0, 1.0, 2.0).unwrap();
        let p = prob(1.0, 1.0, 1.0, 1.0);
        let z = solve_variational(&d, &p).unwrap();
        let zi = d
            .interpolate_polynomial(&cubic_oracle(&p).polynomial())
            .unwrap();
        let err = d.triple_norm_sq(&z.sub(&zi)).sqrt();
        assert!(err <= 1e-11 * d.triple_norm_sq(&zi).sqrt(), "{err:e}");
    }

    #[test]
    fn oracle_examples() {
        let s = cubic_oracle(&prob(1.0, 0.0, 0.0, 0.0));
        assert!((s.p - 0.5).abs() < 1e-15 && (s.q + 1.0 / 6.0).abs() < 1e-15);
        let s = cubic_oracle(&prob(0.0, 0.0, 1.7, 0.3));
        assert_eq!((s.p, s.q), (0.0, 0.0));
        let s = cubic_oracle(&prob(1.0, 0.0, 1.0, 1.0));
        assert!((s.p - 9.0 / 29.0).abs() < 1e-15 && (s.q + 4.0 / 29.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_satisfies_boundary_rows() {
        for (l, m, b, g) in [
            (1.0, -2.0, 0.0, 0.0),
            (0.3, 0.9, 2.0, 0.5),
            (-4.0, 1.0, 1.0, 2.0),
        ] {
            let p = prob(l, m, b, g);
            let (r1, r2) = cubic_oracle(&p).boundary_residuals(&p);
            assert!(r1.abs() <= 1e-12 && r2.abs() <= 1e-12);
        }
    }

    #[test]
    fn estimate_examples() {
        let c = DegeneracyCoefficient::power_law(0.5).unwrap();
        let d = BeamDiscretization::build(&c, 16, 0.0, 0.0, 2.0).unwrap();
        let p = prob(1.0, 0.0, 0.0, 0.0);
        let z = solve_variational(&d, &p).unwrap();
        let rep = verify_estimates(&d, &p, &z, 1.0);
        assert!(rep.ok);
        assert!((rep.triple.0 - 1.0 / 3.0).abs() < 1e-10);

        let p = prob(0.0, 1.0, 0.0, 0.0);
        let z = solve_variational(&d, &p).unwrap();
        let rep = verify_estimates(&d, &p, &z, 1.0);
        assert!(rep.ok, "{rep:?}");
        assert!((rep.triple.0 - 1.0).abs() < 1e-10);

        let p = prob(0.0, 0.0, 0.0, 0.0);
        let z = solve_variational(&d, &p).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        assert_eq!(verify_estimates(&d, &p, &z, 1.0).triple, (0.0, 0.0));
    }

    #[test]
    fn mismatched_parameters_rejected() {
        let c = DegeneracyCoefficient::power_law(0.5).unwrap();
        let d = BeamDiscretization::build(&c, 8, 1.0, 0.0, 2.0).unwrap();
        assert!(solve_variational(&d, &prob(1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(StaticProblem::new(1.0, 0.0, -1.0, 0.0).is_err());
    }
}
