//! Menu of clamped initial profiles.
//!
//! Every shape vanishes with its slope at `x = 0`. A profile may be made
//! compatible with the dissipative boundary rows at `x = 1` by adding the
//! static cubic that cancels their residual, which puts the pair
//! `(y₀, y₁)` in the domain of the generator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discretization::{BeamDiscretization, DofVector};
use crate::error::{Error, Result};
use crate::statics::{cubic_oracle, CubicSolution, StaticProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `x²`
    X2,
    /// `x³`
    X3,
    /// `x²(1 − x)²`
    X2OneMinusX2,
    /// `x² sin(πx)`
    SinBumpX2,
}

impl Shape {
    /// Value and first three derivatives at `x`.
    pub fn derivatives(self, x: f64) -> [f64; 4] {
        match self {
            Shape::X2 => [x * x, 2.0 * x, 2.0, 0.0],
            Shape::X3 => [x * x * x, 3.0 * x * x, 6.0 * x, 6.0],
            Shape::X2OneMinusX2 => {
                // x² − 2x³ + x⁴
                [
                    x * x - 2.0 * x.powi(3) + x.powi(4),
                    2.0 * x - 6.0 * x * x + 4.0 * x.powi(3),
                    2.0 - 12.0 * x + 12.0 * x * x,
                    -12.0 + 24.0 * x,
                ]
            }
            Shape::SinBumpX2 => {
                let (s, c) = (PI * x).sin_cos();
                let p = PI;
                [
                    x * x * s,
                    2.0 * x * s + p * x * x * c,
                    2.0 * s + 4.0 * p * x * c - p * p * x * x * s,
                    6.0 * p * c - 6.0 * p * p * x * s - p.powi(3) * x * x * c,
                ]
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::X2 => "x2",
            Shape::X3 => "x3",
            Shape::X2OneMinusX2 => "x2_one_minus_x2",
            Shape::SinBumpX2 => "sin_bump_x2",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x2" => Ok(Shape::X2),
            "x3" => Ok(Shape::X3),
            "x2_one_minus_x2" => Ok(Shape::X2OneMinusX2),
            "sin_bump_x2" => Ok(Shape::SinBumpX2),
            other => Err(Error::Config(format!("unknown initial shape '{other}'"))),
        }
    }
}

/// A weighted sum of menu shapes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profile {
    pub terms: Vec<(Shape, f64)>,
}

impl Profile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(shape: Shape, amplitude: f64) -> Self {
        Self {
            terms: vec![(shape, amplitude)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, a)| *a == 0.0)
    }

    pub fn derivatives(&self, x: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (shape, amp) in &self.terms {
            for (o, d) in out.iter_mut().zip(shape.derivatives(x)) {
                *o += amp * d;
            }
        }
        out
    }
}

/// Initial displacement and velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub displacement: Profile,
    pub velocity: Profile,
    /// Add the cubic correction that satisfies the boundary rows at `x = 1`.
    pub compatible: bool,
}

impl InitialData {
    pub fn zero() -> Self {
        Self {
            displacement: Profile::zero(),
            velocity: Profile::zero(),
            compatible: false,
        }
    }

    /// The displacement correction `p x² + q x³` (zero when not requested).
    pub fn correction(&self, beta: f64, gamma: f64) -> Result<CubicSolution> {
        if !self.compatible {
            return Ok(CubicSolution { p: 0.0, q: 0.0 });
        }
        let f = self.displacement.derivatives(1.0);
        let g = self.velocity.derivatives(1.0);
        // need β Y(1) − Y'''(1) + y₁(1) = 0 and γ Y'(1) + Y''(1) + y₁'(1) = 0
        let lambda = -(beta * f[0] - f[3] + g[0]);
        let mu = -(gamma * f[1] + f[2] + g[1]);
        Ok(cubic_oracle(&StaticProblem::new(lambda, mu, beta, gamma)?))
    }

    /// Interpolated `(y₀, y₁)` on the discretization.
    pub fn interpolate(&self, disc: &BeamDiscretization) -> Result<(DofVector, DofVector)> {
        let corr = self.correction(disc.beta(), disc.gamma())?;
        let y0 = disc.interpolate(
            |x| self.displacement.derivatives(x)[0] + corr.value(x),
            |x| self.displacement.derivatives(x)[1] + corr.slope(x),
        )?;
        let y1 = disc.interpolate(
            |x| self.velocity.derivatives(x)[0],
            |x| self.velocity.derivatives(x)[1],
        )?;
        Ok((y0, y1))
    }
}
