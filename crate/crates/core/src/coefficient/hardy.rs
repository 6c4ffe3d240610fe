//! Numerical estimate of the best constant `C` in `∫u²/a ≤ C ∫(u')²` over
//! functions with `u(0) = 0`.
//!
//! Piecewise-linear elements on a mesh graded toward the degeneracy give the
//! pencil `K u = λ M u` (`K` the H¹ seminorm, `M` the `1/a`-weighted mass).
//! Its smallest eigenvalue over the conforming subspace bounds the true one
//! from above, so `1/λ_min` approaches the best constant from below and is
//! monotone under nested refinement.

use super::DegeneracyCoefficient;
use crate::band::SymBand;
use crate::eigen::{smallest_eigenpair, Eigenpair};
use crate::error::{Error, Result};
use crate::quadrature::{graded_nodes, ElementRules};

/// Grading exponent of the Hardy mesh.
pub const HARDY_GRADING: f64 = 2.0;
const MAX_ITERATIONS: usize = 2000;
const REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyEstimate {
    pub c_hp: f64,
    pub lambda_min: f64,
    pub mesh_n: usize,
    pub iterations: usize,
}

/// The assembled Hardy pencil on a graded P1 mesh. Unknowns are the nodal
/// values at nodes `1..=n`.
#[derive(Debug, Clone)]
pub struct HardyProblem {
    nodes: Vec<f64>,
    stiffness: SymBand,
    weighted_mass: SymBand,
}

impl HardyProblem {
    pub fn assemble(coeff: &DegeneracyCoefficient, mesh_n: usize) -> Result<Self> {
        if mesh_n < 32 {
            return Err(Error::InvalidArgument(format!(
                "Hardy mesh needs >= 32 elements, got {mesh_n}"
            )));
        }
        let nodes = graded_nodes(mesh_n, HARDY_GRADING);
        let rules = ElementRules::new();
        let mut stiffness = SymBand::zeros(mesh_n, 1);
        let mut weighted_mass = SymBand::zeros(mesh_n, 1);
        for e in 0..mesh_n {
            let (x0, x1) = (nodes[e], nodes[e + 1]);
            let h = x1 - x0;
            // local dof k -> global unknown (node index - 1); node 0 is pinned
            let global = [e.checked_sub(1), Some(e)];
            let mut mloc = [[0.0; 2]; 2];
            let rule = rules.for_element(e);
            for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                let x = x0 + h * s;
                let phi = [1.0 - s, s];
                let wa = w * h / coeff.a(x);
                for i in 0..2 {
                    for j in 0..2 {
                        mloc[i][j] += wa * phi[i] * phi[j];
                    }
                }
            }
            let kloc = [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
            for i in 0..2 {
                for j in 0..=i {
                    if let (Some(gi), Some(gj)) = (global[i], global[j]) {
                        stiffness.add(gi, gj, kloc[i][j]);
                        weighted_mass.add(gi, gj, mloc[i][j]);
                    }
                }
            }
        }
        Ok(Self {
            nodes,
            stiffness,
            weighted_mass,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mesh_n(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `∫u²/a / ∫(u')²` for the P1 function with nodal values `u` at nodes `1..=n`,
    /// using the same quadrature as the pencil.
    pub fn rayleigh_quotient(&self, u: &[f64]) -> f64 {
        self.weighted_mass.bilinear(u, u) / self.stiffness.bilinear(u, u)
    }

    /// Smallest eigenpair of the pencil: `(λ_min, eigenvector, iterations)`.
    pub fn smallest_eigenpair(&self) -> Result<Eigenpair> {
        smallest_eigenpair(
            &self.stiffness,
            &self.weighted_mass,
            &self.nodes[1..],
            REL_TOL,
            MAX_ITERATIONS,
        )
    }
}

/// Estimates the best Hardy–Poincaré constant for `coeff` on a graded mesh
/// of `mesh_n` elements.
pub fn estimate_hardy_constant(
    coeff: &DegeneracyCoefficient,
    mesh_n: usize,
) -> Result<HardyEstimate> {
    let problem = HardyProblem::assemble(coeff, mesh_n)?;
    let pair = problem.smallest_eigenpair()?;
    Ok(HardyEstimate {
        c_hp: 1.0 / pair.value,
        lambda_min: pair.value,
        mesh_n,
        iterations: pair.iterations,
    })
}
