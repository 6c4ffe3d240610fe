//! Constant ledger of the exponential decay estimate `E(t) ≤ E(0) e^{1 − t/M}`
//! and the checks that compare it with simulated energy traces.
//!
//! Every constant is closed form in `K`, `a(1)`, `β`, `γ`, `ε₀`, `δ` and the
//! Hardy constant `c_hp`, which is the only computed ingredient.

use serde::{Deserialize, Serialize};

use crate::discretization::BeamDiscretization;
use crate::dynamics::{window_integrals, BeamState, CurvatureTrace, EnergyTrace};
use crate::error::{Error, Result};

/// Relative slack allowed on `E(t) ≤ bound(t)`.
pub const DECAY_TOL: f64 = 1e-6;
/// Relative slack on the space–time inequalities.
pub const ESTIMATE_TOL: f64 = 0.05;
/// Energies below this fraction of `E(0)` are excluded from rate fits.
pub const FIT_FLOOR: f64 = 1e-14;
/// Number of candidates in the δ scan.
pub const SCAN_POINTS: usize = 64;

/// How δ is picked inside `(0, min{ν, ε₀/C₁(δ)})`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// Minimize `M` over a log-spaced scan of `(0, ν)`.
    #[default]
    Scan,
    /// `δ = f · min{ν, ε₀/C₁(δ)}` with `f` in `(0, 1)`, solved self-consistently.
    FixedFraction(f64),
}

/// Data of the coefficient that enter the ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerInput {
    pub k: f64,
    pub a1: f64,
    pub c_hp: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Defaults to the maximal admissible value `2 − K`.
    pub eps0: Option<f64>,
}

impl LedgerInput {
    pub fn new(k: f64, a1: f64, c_hp: f64, beta: f64, gamma: f64) -> Self {
        Self {
            k,
            a1,
            c_hp,
            beta,
            gamma,
            eps0: None,
        }
    }

    fn validate(&self) -> Result<f64> {
        if !(self.k > 0.0 && self.k < 2.0) {
            return Err(Error::Classification { k: self.k });
        }
        if !(self.c_hp > 0.0) || !self.c_hp.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "c_hp = {} must be positive",
                self.c_hp
            )));
        }
        if !(self.a1 > 0.0) || !self.a1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "a(1) = {} must be positive",
                self.a1
            )));
        }
        if !(self.beta >= 0.0 && self.gamma >= 0.0)
            || !self.beta.is_finite()
            || !self.gamma.is_finite()
        {
            return Err(Error::InvalidArgument(
                "beta and gamma must be finite and non-negative".into(),
            ));
        }
        let max = 2.0 - self.k;
        let eps0 = self.eps0.unwrap_or(max);
        if !(eps0 > 0.0 && eps0 <= max) {
            return Err(Error::InvalidArgument(format!(
                "eps0 = {eps0} must lie in (0, 2 - K = {max}]"
            )));
        }
        Ok(eps0)
    }
}

/// The full constant ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub k: f64,
    pub c_hp: f64,
    pub eps0: f64,
    pub a1: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c_beta: f64,
    pub c_gamma: f64,
    pub theta: f64,
    pub rho: f64,
    pub nu: f64,
    pub delta: f64,
    pub c_delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub m: f64,
}

impl StabilityConstants {
    /// `δ < min{ν, ε₀/C₁}`, `C_δ > 0` and `M > 0`.
    pub fn is_admissible(&self) -> bool {
        self.delta > 0.0
            && self.delta < self.nu
            && self.c_delta > 0.0
            && self.delta < self.eps0 / self.c1
            && self.m > 0.0
            && self.m.is_finite()
    }

    /// Ordered `(name, value)` pairs for reports.
    pub fn entries(&self) -> [(&'static str, f64); 17] {
        [
            ("K", self.k),
            ("c_hp", self.c_hp),
            ("eps0", self.eps0),
            ("a1", self.a1),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("c_beta", self.c_beta),
            ("c_gamma", self.c_gamma),
            ("theta", self.theta),
            ("rho", self.rho),
            ("nu", self.nu),
            ("delta", self.delta),
            ("c_delta", self.c_delta),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("M", self.m),
        ]
    }

    /// Inverse of [`entries`](Self::entries).
    pub fn from_entries(get: impl Fn(&str) -> Option<f64>) -> Result<Self> {
        let f = |k: &str| get(k).ok_or_else(|| Error::Parse(format!("missing constant `{k}`")));
        Ok(Self {
            k: f("K")?,
            c_hp: f("c_hp")?,
            eps0: f("eps0")?,
            a1: f("a1")?,
            beta: f("beta")?,
            gamma: f("gamma")?,
            c_beta: f("c_beta")?,
            c_gamma: f("c_gamma")?,
            theta: f("theta")?,
            rho: f("rho")?,
            nu: f("nu")?,
            delta: f("delta")?,
            c_delta: f("c_delta")?,
            c1: f("c1")?,
            c2: f("c2")?,
            c3: f("c3")?,
            m: f("M")?,
        })
    }
}

/// Trace constant: `min{2, 2/b}` for `b ≠ 0`, else 2.
pub fn trace_constant(b: f64) -> f64 {
    if b == 0.0 {
        2.0
    } else {
        (2.0 / b).min(2.0)
    }
}

/// Upper end of the admissible δ range.
pub fn nu(beta: f64, gamma: f64) -> f64 {
    match (beta > 1.0, gamma > 1.0) {
        (true, true) => beta * gamma / (2.0 * (beta + gamma)),
        (false, true) => gamma / (2.0 * (1.0 + gamma)),
        (true, false) => beta / (2.0 * (beta + 1.0)),
        (false, false) => 0.25,
    }
}

pub fn c_delta(beta: f64, gamma: f64, delta: f64) -> f64 {
    match (beta > 1.0, gamma > 1.0) {
        (true, true) => 1.0 - 2.0 * delta * (1.0 / beta + 1.0 / gamma),
        (false, true) => 1.0 - 2.0 * delta * (1.0 + 1.0 / gamma),
        (true, false) => 1.0 - 2.0 * delta * (1.0 / beta + 1.0),
        (false, false) => 1.0 - 4.0 * delta,
    }
}

pub fn theta(k: f64, a1: f64, c_hp: f64) -> f64 {
    (4.0 / a1 + k * c_hp).max(1.0 + k / 4.0)
}

pub fn rho(k: f64, a1: f64) -> f64 {
    2.0f64.max(k / 4.0 + 1.0 + 1.0 / a1)
}

/// Sum of the two trace coefficients of the ε₀-weighted observability estimate.
fn trace_coefficient_sum(k: f64, eps0: f64, beta: f64, gamma: f64) -> f64 {
    k * beta / 2.0
        + k / 4.0
        + beta
        + eps0 * beta / 2.0
        + beta
        + 1.0
        + 2.0 * gamma * gamma
        + eps0 * gamma / 2.0
}

/// Evaluates the ledger at a given δ without checking admissibility.
pub fn evaluate_at(input: &LedgerInput, delta: f64) -> Result<StabilityConstants> {
    let eps0 = input.validate()?;
    let LedgerInput {
        k,
        a1,
        c_hp,
        beta,
        gamma,
        ..
    } = *input;
    let c_beta = trace_constant(beta);
    let c_gamma = trace_constant(gamma);
    let theta = theta(k, a1, c_hp);
    let rho = rho(k, a1);
    let nu = nu(beta, gamma);
    let cd = c_delta(beta, gamma, delta);
    let bsum = trace_coefficient_sum(k, eps0, beta, gamma);
    let c1 = 2.0 / cd * bsum;
    let c3 = (2.0 + 2.0 * (4.0 * c_hp + 1.0) * (c_beta + c_gamma) + (8.0 * c_hp + 3.0) / delta)
        / cd
        * bsum;
    let c2 = 4.0 * theta + rho + c_gamma / 2.0 * (2.0 - k / 2.0) + c3;
    let m = c2 / (eps0 - delta * c1);
    Ok(StabilityConstants {
        k,
        c_hp,
        eps0,
        a1,
        beta,
        gamma,
        c_beta,
        c_gamma,
        theta,
        rho,
        nu,
        delta,
        c_delta: cd,
        c1,
        c2,
        c3,
        m,
    })
}

/// The δ candidates of the scan: `ν · 10^{−4 + 4k/64}`, `k = 0, …, 63`.
pub fn scan_candidates(nu: f64) -> Vec<f64> {
    (0..SCAN_POINTS)
        .map(|k| nu * 10f64.powf(-4.0 + 4.0 * k as f64 / SCAN_POINTS as f64))
        .collect()
}

/// Builds the ledger, selecting δ per `policy`.
pub fn compute_constants(input: &LedgerInput, policy: DeltaPolicy) -> Result<StabilityConstants> {
    input.validate()?;
    let nu = nu(input.beta, input.gamma);
    match policy {
        DeltaPolicy::Scan => {
            let mut best: Option<StabilityConstants> = None;
            for d in scan_candidates(nu) {
                let c = evaluate_at(input, d)?;
                if c.is_admissible() && best.is_none_or(|b| c.m < b.m) {
                    best = Some(c);
                }
            }
            best.ok_or_else(|| {
                Error::InfeasibleDelta(format!(
                    "none of {SCAN_POINTS} scan points in (0, nu = {nu}) satisfies delta < eps0/C1(delta)"
                ))
            })
        }
        DeltaPolicy::FixedFraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "delta fraction {f} must lie in (0, 1)"
                )));
            }
            // h(δ) = δ − f·min{ν, ε₀/C₁(δ)} is increasing; bisect on (0, ν).
            let cap = |d: f64| -> Result<f64> {
                let c = evaluate_at(input, d)?;
                Ok(if c.c_delta > 0.0 {
                    nu.min(c.eps0 / c.c1)
                } else {
                    0.0
                })
            };
            let (mut lo, mut hi) = (0.0, nu);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid - f * cap(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * nu {
                    break;
                }
            }
            let c = evaluate_at(input, lo)?;
            if c.is_admissible() {
                Ok(c)
            } else {
                Err(Error::InfeasibleDelta(format!(
                    "fixed fraction {f} gives delta = {lo:e}, which is not admissible"
                )))
            }
        }
    }
}

/// `M` over a Hardy-constant band `[c_lo, c_hi]`; `M` is increasing in `c_hp`.
pub fn m_interval(
    input: &LedgerInput,
    c_lo: f64,
    c_hi: f64,
    policy: DeltaPolicy,
) -> Result<(f64, f64)> {
    let lo = compute_constants(
        &LedgerInput {
            c_hp: c_lo,
            ..*input
        },
        policy,
    )?
    .m;
    let hi = compute_constants(
        &LedgerInput {
            c_hp: c_hi,
            ..*input
        },
        policy,
    )?
    .m;
    Ok((lo.min(hi), lo.max(hi)))
}

/// Hardy band from two nested meshes: `[c_coarse, c_fine + (c_fine − c_coarse)]`.
pub fn hardy_band(c_coarse: f64, c_fine: f64) -> (f64, f64) {
    let lo = c_coarse.min(c_fine);
    (lo, c_fine + (c_fine - c_coarse).abs())
}

/// `E0 · exp(1 − t/M)`.
pub fn theoretical_bound(consts: &StabilityConstants, e0: f64, t: f64) -> f64 {
    if e0 == 0.0 {
        return 0.0;
    }
    e0 * (1.0 - t / consts.m).exp()
}

/// Fills `trace.bound` from the ledger.
pub fn attach_bound(trace: &mut EnergyTrace, consts: &StabilityConstants) {
    let e0 = trace.initial_energy();
    trace.bound = trace
        .times
        .iter()
        .map(|&t| theoretical_bound(consts, e0, t))
        .collect();
}

/// Outcome of [`verify_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub ok: bool,
    /// `min_t bound(t)/E(t)`; `+∞` for a zero trace.
    pub margin: f64,
    /// `−d ln E/dt` fitted over `[t_end/2, t_end]`; NaN if the fit is degenerate.
    pub fitted_rate: f64,
    /// Samples used by the fit.
    pub fit_points: usize,
    /// Horizon up to which the certificate is established.
    pub certified_until: f64,
}

/// Checks `E(t) ≤ E(0)e^{1−t/M}` at every recorded time.
pub fn verify_decay(trace: &EnergyTrace, consts: &StabilityConstants) -> Result<DecayReport> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty energy trace".into()));
    }
    let e0 = trace.initial_energy();
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for (&t, &e) in trace.times.iter().zip(&trace.energy) {
        let b = theoretical_bound(consts, e0, t);
        if e > b * (1.0 + DECAY_TOL) {
            ok = false;
        }
        if e > 0.0 {
            margin = margin.min(b / e);
        }
    }
    let (fitted_rate, fit_points) = fit_rate(trace);
    let t_last = *trace.times.last().unwrap_or(&0.0);
    Ok(DecayReport {
        ok,
        margin,
        fitted_rate,
        fit_points,
        certified_until: if ok { t_last } else { 0.0 },
    })
}

/// Extends a verified certificate from the last recorded time to `horizon`
/// using monotonicity of the energy: for `t ≥ t_last`, `E(t) ≤ E(t_last)`, so
/// the bound holds on `[t_last, horizon]` once `E(t_last) ≤ bound(horizon)`.
pub fn certify_tail(
    report: &DecayReport,
    trace: &EnergyTrace,
    consts: &StabilityConstants,
    horizon: f64,
) -> DecayReport {
    let mut out = *report;
    if !report.ok || horizon <= report.certified_until {
        return out;
    }
    let e_last = trace.final_energy();
    let b = theoretical_bound(consts, trace.initial_energy(), horizon);
    if e_last <= b * (1.0 + DECAY_TOL) {
        out.certified_until = horizon;
        if e_last > 0.0 {
            out.margin = out.margin.min(b / e_last);
        }
    }
    out
}

/// Least-squares slope of `ln E` over the second half of the trace.
pub fn fit_rate(trace: &EnergyTrace) -> (f64, usize) {
    let e0 = trace.initial_energy();
    let t_end = *trace.times.last().unwrap_or(&0.0);
    let pts: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.energy)
        .filter(|(&t, &e)| t >= 0.5 * t_end && e > FIT_FLOOR * e0 && e > 0.0)
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return (f64::NAN, pts.len());
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    if sxx == 0.0 {
        return (f64::NAN, pts.len());
    }
    (-sxy / sxx, pts.len())
}

/// `(ε₀ − δC₁)∫_s^T E ≤ C₂ E(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralInequality {
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl IntegralInequality {
    /// `lhs / rhs`, 0 when both vanish.
    pub fn slack(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

pub fn verify_integral_inequality(
    trace: &EnergyTrace,
    consts: &StabilityConstants,
    s: f64,
) -> Result<IntegralInequality> {
    let t = *trace
        .times
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty energy trace".into()))?;
    if !(s >= 0.0 && s < t) {
        return Err(Error::InvalidArgument(format!(
            "s = {s} must lie in [0, {t})"
        )));
    }
    let lhs = (consts.eps0 - consts.delta * consts.c1) * trace.energy_integral(s, t);
    let rhs = consts.c2 * trace.energy_at(s);
    Ok(IntegralInequality {
        s,
        t,
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + ESTIMATE_TOL),
    })
}

/// Both observability-type estimates evaluated on a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservabilityReport {
    pub trace_estimate_ok: bool,
    pub interior_estimate_ok: bool,
    pub trace_estimate_lhs: f64,
    pub trace_estimate_rhs: f64,
    pub interior_estimate_lhs: f64,
    pub interior_estimate_rhs: f64,
}

impl ObservabilityReport {
    pub fn trace_estimate_slack(&self) -> f64 {
        ratio(self.trace_estimate_lhs, self.trace_estimate_rhs)
    }

    pub fn interior_estimate_slack(&self) -> f64 {
        ratio(self.interior_estimate_lhs, self.interior_estimate_rhs)
    }
}

/// Evaluates the trace estimate (with `C_δ`) and the interior estimate
/// (with `ϑ`, `ϱ`) on `[s, T]` from stored states.
pub fn verify_observability_estimates(
    disc: &BeamDiscretization,
    states: &[BeamState],
    consts: &StabilityConstants,
    s: f64,
    t: f64,
) -> Result<ObservabilityReport> {
    let w = window_integrals(disc, states, s, t, CurvatureTrace::Pointwise)?;
    let c = consts;
    let (k, beta, gamma) = (c.k, c.beta, c.gamma);

    let interior_lhs = 0.5 * c.eps0 * (w.kinetic + w.bending);
    let interior_rhs = (4.0 * c.theta + c.rho + c.c_gamma / 2.0 * (2.0 - k / 2.0)) * w.energy_s
        + (k * beta / 2.0 + k / 4.0 + beta) * w.y1_sq
        + (beta + 1.0 + 2.0 * gamma * gamma) * w.yx1_sq;

    let trace_lhs = w.y1_sq + w.yx1_sq;
    let trace_rhs = 2.0 * c.delta / c.c_delta * w.energy
        + (2.0 * (1.0 + (4.0 * c.c_hp + 1.0) * (c.c_beta + c.c_gamma))
            + (8.0 * c.c_hp + 3.0) / c.delta)
            / c.c_delta
            * w.energy_s;

    Ok(ObservabilityReport {
        trace_estimate_ok: trace_lhs <= trace_rhs * (1.0 + ESTIMATE_TOL),
        interior_estimate_ok: interior_lhs <= interior_rhs * (1.0 + ESTIMATE_TOL),
        trace_estimate_lhs: trace_lhs,
        trace_estimate_rhs: trace_rhs,
        interior_estimate_lhs: interior_lhs,
        interior_estimate_rhs: interior_rhs,
    })
}
