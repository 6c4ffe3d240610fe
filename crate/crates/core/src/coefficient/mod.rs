//! The degenerate coefficient `a(x)`: evaluation, the degeneracy constant
//! `K = sup x|a'(x)|/a(x)`, weak/strong classification and the monotonicity
//! check on `x^K / a(x)`.

mod hardy;

pub use hardy::{estimate_hardy_constant, HardyEstimate, HardyProblem};

use crate::error::{Error, Result};

/// Points in the geometric grid used for suprema and positivity checks.
pub const K_GRID_POINTS: usize = 4096;
/// Left end of the geometric validation grid.
pub const GRID_FLOOR: f64 = 1e-8;

/// Functional form of `a(x)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientForm {
    /// `a(x) = x^alpha`.
    PowerLaw { alpha: f64 },
    /// `a(x) = x^alpha (1 + c x)`.
    PowerLawTimesSmooth { alpha: f64, c: f64 },
    /// Positive samples of `a` and of a supplied `a'`.
    Tabulated(TabulatedCoefficient),
}

/// A tabulated coefficient. Values are interpolated log-log linearly and the
/// local exponent `x a'/a` of the supplied derivative linearly in `ln x`, so
/// sampled power laws are reproduced exactly. Below the first abscissa the data are
/// continued by the power law matching the first sample's local exponent
/// `x a'/a`, which makes `a(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCoefficient {
    xs: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    lead_exponent: f64,
}

impl TabulatedCoefficient {
    pub fn new(xs: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() || xs.len() != derivs.len() {
            return Err(Error::InvalidCoefficient(
                "tabulated coefficient needs >= 2 samples of equal length".into(),
            ));
        }
        if !(xs[0] > 0.0) || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCoefficient(
                "abscissae must be positive and strictly increasing".into(),
            ));
        }
        if (xs[xs.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCoefficient("last abscissa must be 1".into()));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidCoefficient("values must be positive".into()));
        }
        if derivs.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidCoefficient(
                "derivatives must be finite".into(),
            ));
        }
        let lead_exponent = xs[0] * derivs[0] / values[0];
        if !(lead_exponent > 0.0) {
            return Err(Error::InvalidCoefficient(
                "first sample must have x a'/a > 0 so that a(0) = 0".into(),
            ));
        }
        Ok(Self {
            xs,
            values,
            derivs,
            lead_exponent,
        })
    }

    /// Samples `a` and `a'` from closures on the given abscissae.
    pub fn sample(xs: Vec<f64>, a: impl Fn(f64) -> f64, da: impl Fn(f64) -> f64) -> Result<Self> {
        let values = xs.iter().map(|&x| a(x)).collect();
        let derivs = xs.iter().map(|&x| da(x)).collect();
        Self::new(xs, values, derivs)
    }

    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&t| t <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x < self.xs[0] {
            return self.values[0] * (x / self.xs[0]).powf(self.lead_exponent);
        }
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
        (self.values[i].ln() * (1.0 - t) + self.values[i + 1].ln() * t).exp()
    }

    fn derivative(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return self.lead_exponent * self.value(x) / x;
        }
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
        let s0 = x0 * self.derivs[i] / self.values[i];
        let s1 = x1 * self.derivs[i + 1] / self.values[i + 1];
        (s0 * (1.0 - t) + s1 * t) * self.value(x) / x
    }
}

/// Degeneracy class at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyClass {
    /// `K` in `(0, 1)`.
    WeaklyDegenerate,
    /// `K` in `[1, 2)`.
    StronglyDegenerate,
}

impl DegeneracyClass {
    pub fn from_k(k: f64) -> Result<Self> {
        if k > 0.0 && k < 1.0 {
            Ok(Self::WeaklyDegenerate)
        } else if (1.0..2.0).contains(&k) {
            Ok(Self::StronglyDegenerate)
        } else {
            Err(Error::Classification { k })
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::WeaklyDegenerate => "WD",
            Self::StronglyDegenerate => "SD",
        }
    }
}

/// A validated degenerate coefficient. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyCoefficient {
    form: CoefficientForm,
    k: f64,
    a_at_1: f64,
    class: DegeneracyClass,
}

impl DegeneracyCoefficient {
    pub fn new(form: CoefficientForm) -> Result<Self> {
        match &form {
            CoefficientForm::PowerLaw { alpha } => check_alpha(*alpha)?,
            CoefficientForm::PowerLawTimesSmooth { alpha, c } => {
                check_alpha(*alpha)?;
                if !(*c >= 0.0) || !c.is_finite() {
                    return Err(Error::InvalidCoefficient(format!("c = {c} must be >= 0")));
                }
            }
            CoefficientForm::Tabulated(_) => {}
        }
        let mut coeff = Self {
            form,
            k: f64::NAN,
            a_at_1: f64::NAN,
            class: DegeneracyClass::WeaklyDegenerate,
        };
        coeff.check_positivity()?;
        coeff.a_at_1 = coeff.a(1.0);
        coeff.k = coeff.compute_k();
        coeff.class = DegeneracyClass::from_k(coeff.k)?;
        Ok(coeff)
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        Self::new(CoefficientForm::PowerLaw { alpha })
    }

    pub fn power_law_times_smooth(alpha: f64, c: f64) -> Result<Self> {
        Self::new(CoefficientForm::PowerLawTimesSmooth { alpha, c })
    }

    pub fn form(&self) -> &CoefficientForm {
        &self.form
    }

    /// The constant `K = sup_{(0,1]} x|a'(x)|/a(x)`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a_at_1(&self) -> f64 {
        self.a_at_1
    }

    pub fn class(&self) -> DegeneracyClass {
        self.class
    }

    /// `a(x)` for `x` in `[0, 1]`.
    pub fn eval_a(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("a(x) requires 0 <= x <= 1, got {x}")));
        }
        Ok(self.a(x))
    }

    /// `a'(x)` for `x` in `(0, 1]`; at `x = 0` only where the derivative is finite.
    pub fn eval_a_prime(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "a'(x) requires 0 <= x <= 1, got {x}"
            )));
        }
        if x == 0.0 {
            let lead = match &self.form {
                CoefficientForm::PowerLaw { alpha }
                | CoefficientForm::PowerLawTimesSmooth { alpha, .. } => *alpha,
                CoefficientForm::Tabulated(t) => t.lead_exponent,
            };
            if lead < 1.0 {
                return Err(Error::Domain(format!(
                    "a'(0) is unbounded for leading exponent {lead} < 1"
                )));
            }
        }
        Ok(self.a_prime(x))
    }

    /// Unchecked `a(x)`; callers guarantee `0 <= x <= 1`.
    #[inline]
    pub(crate) fn a(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.form {
            CoefficientForm::PowerLaw { alpha } => x.powf(*alpha),
            CoefficientForm::PowerLawTimesSmooth { alpha, c } => x.powf(*alpha) * (1.0 + c * x),
            CoefficientForm::Tabulated(t) => t.value(x),
        }
    }

    #[inline]
    pub(crate) fn a_prime(&self, x: f64) -> f64 {
        match &self.form {
            CoefficientForm::PowerLaw { alpha } => {
                if x == 0.0 {
                    if *alpha == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    alpha * x.powf(alpha - 1.0)
                }
            }
            CoefficientForm::PowerLawTimesSmooth { alpha, c } => {
                if x == 0.0 {
                    if *alpha == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    x.powf(alpha - 1.0) * (alpha * (1.0 + c * x) + c * x)
                }
            }
            CoefficientForm::Tabulated(t) => t.derivative(x),
        }
    }

    /// `x a'(x) / a(x)` for `x > 0`.
    #[inline]
    pub(crate) fn log_slope(&self, x: f64) -> f64 {
        match &self.form {
            CoefficientForm::PowerLaw { alpha } => *alpha,
            CoefficientForm::PowerLawTimesSmooth { alpha, c } => alpha + c * x / (1.0 + c * x),
            CoefficientForm::Tabulated(t) => x * t.derivative(x) / t.value(x),
        }
    }

    fn check_positivity(&self) -> Result<()> {
        if self.a(0.0) != 0.0 {
            return Err(Error::InvalidCoefficient("a(0) must vanish".into()));
        }
        for x in geometric_grid(GRID_FLOOR, 1.0, K_GRID_POINTS) {
            let v = self.a(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidCoefficient(format!(
                    "a({x:e}) = {v} is not positive"
                )));
            }
        }
        Ok(())
    }

    fn compute_k(&self) -> f64 {
        match &self.form {
            CoefficientForm::PowerLaw { alpha } => *alpha,
            _ => grid_supremum(|x| self.log_slope(x).abs(), GRID_FLOOR, 1.0, K_GRID_POINTS),
        }
    }

    /// Checks that `x ↦ x^K / a(x)` is non-decreasing on a geometric grid of
    /// `grid_n` points in `[1e-8, 1]`.
    pub fn check_hypothesis(&self, grid_n: usize) -> Result<HypothesisReport> {
        if grid_n < 16 {
            return Err(Error::InvalidArgument(format!(
                "hypothesis grid needs >= 16 points, got {grid_n}"
            )));
        }
        let xs = geometric_grid(GRID_FLOOR, 1.0, grid_n);
        let log_ratio: Vec<f64> = xs
            .iter()
            .map(|&x| self.k * x.ln() - self.a(x).ln())
            .collect();
        let mut largest_violation = None;
        for i in 1..xs.len() {
            let tol = 1e-10 * (1.0 + log_ratio[i].abs().max(log_ratio[i - 1].abs()));
            if log_ratio[i] < log_ratio[i - 1] - tol {
                largest_violation = Some(xs[i]);
            }
        }
        Ok(HypothesisReport {
            ok: largest_violation.is_none(),
            largest_violation,
            grid_n,
        })
    }
}

/// Outcome of the finite monotonicity check on `x^K / a(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub ok: bool,
    /// Right end of the rightmost grid interval on which the ratio decreased.
    pub largest_violation: Option<f64>,
    pub grid_n: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidCoefficient(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    Ok(())
}

/// `n` geometrically spaced points from `lo` to `hi`, both included.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Supremum of `f` on `[lo, hi]`: grid maximum followed by golden-section
/// refinement in the neighbouring grid cells.
pub(crate) fn grid_supremum(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let xs = geometric_grid(lo, hi, n);
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let a = xs[imax.saturating_sub(1)];
    let b = xs[(imax + 1).min(n - 1)];
    vmax.max(golden_max(&f, a, b, 80))
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * b.abs().max(1e-300) {
            break;
        }
    }
    fc.max(fd)
}
