//! Time evolution of the semi-discrete beam `M_w ÿ + (S + B) y + C ẏ = 0`.
//!
//! The implicit midpoint rule reproduces the continuous energy law exactly:
//! `E^{n+1} − E^n = −Δt [(v_v^{n+½})² + (v_s^{n+½})²]`, where `v_v`, `v_s` are
//! the value and slope velocity traces at `x = 1`.

use crate::band::{BandCholesky, SymBand};
use crate::discretization::{BeamDiscretization, DofVector, Jet};
use crate::error::{Error, Result};

/// Per-step tolerance on energy increase, relative to `E(0)`.
pub const MONOTONE_TOL: f64 = 1e-10;

/// Displacement and velocity at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    pub t: f64,
    pub y: DofVector,
    pub v: DofVector,
}

impl BeamState {
    pub fn new(t: f64, y: DofVector, v: DofVector) -> Self {
        Self { t, y, v }
    }

    pub fn zero(disc: &BeamDiscretization) -> Self {
        Self::new(0.0, disc.zeros(), disc.zeros())
    }
}

/// Whether the boundary velocity feedback is active. `Off` is a diagnostic
/// mode that turns the scheme into a conservative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Damping {
    Boundary,
    Off,
}

/// `½(∫ y_t²/a + ∫ y_xx² + β y(1)² + γ y_x(1)²)`.
pub fn energy(disc: &BeamDiscretization, state: &BeamState) -> f64 {
    0.5 * (disc.weighted_l2_norm_sq(&state.v) + disc.triple_norm_sq(&state.y))
}

/// `y_t(1)² + y_tx(1)²` for a velocity vector.
pub fn boundary_dissipation(disc: &BeamDiscretization, v: &[f64]) -> f64 {
    disc.trace_value(v).powi(2) + disc.trace_slope(v).powi(2)
}

/// Implicit midpoint stepper with its step matrix factored once.
pub struct Stepper<'a> {
    disc: &'a BeamDiscretization,
    dt: f64,
    damping: Damping,
    stiffness: SymBand,
    factor: BandCholesky,
}

/// Result of one step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: BeamState,
    /// `(v_v^{n+½})² + (v_s^{n+½})²`, zero when damping is off.
    pub dissipation: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(disc: &'a BeamDiscretization, dt: f64, damping: Damping) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} must be positive"
            )));
        }
        let stiffness = disc.total_stiffness();
        // M + (Δt²/4)(S + B) + (Δt/2) C
        let mut a = disc.mass().combine(1.0, &stiffness, 0.25 * dt * dt);
        if damping == Damping::Boundary {
            a.add(disc.trace_value_index(), disc.trace_value_index(), 0.5 * dt);
            a.add(disc.trace_slope_index(), disc.trace_slope_index(), 0.5 * dt);
        }
        let factor = a.cholesky().map_err(|e| {
            Error::Domain(format!(
                "step matrix factorization failed ({e}); reduce dt or coarsen the grading"
            ))
        })?;
        Ok(Self {
            disc,
            dt,
            damping,
            stiffness,
            factor,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn damping(&self) -> Damping {
        self.damping
    }

    pub fn step(&self, state: &BeamState) -> StepOutcome {
        let dt = self.dt;
        let mut rhs = self.disc.mass().mul_vec(&state.v);
        let ky = self.stiffness.mul_vec(&state.y);
        for (r, k) in rhs.iter_mut().zip(&ky) {
            *r -= 0.5 * dt * k;
        }
        self.factor.solve_in_place(&mut rhs);
        let vm = rhs;
        let y: Vec<f64> = state.y.iter().zip(&vm).map(|(y, m)| y + dt * m).collect();
        let v: Vec<f64> = state.v.iter().zip(&vm).map(|(v, m)| 2.0 * m - v).collect();
        let dissipation = match self.damping {
            Damping::Boundary => boundary_dissipation(self.disc, &vm),
            Damping::Off => 0.0,
        };
        StepOutcome {
            state: BeamState::new(state.t + dt, DofVector::from_vec(y), DofVector::from_vec(v)),
            dissipation,
        }
    }
}

/// One implicit midpoint step (factorizes the step matrix on every call;
/// use [`Stepper`] for repeated steps).
pub fn step(disc: &BeamDiscretization, state: &BeamState, dt: f64) -> Result<BeamState> {
    Ok(Stepper::new(disc, dt, Damping::Boundary)?.step(state).state)
}

/// Energy history of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// `y_t(t,1)² + y_tx(t,1)²` at the recorded times.
    pub dissipation: Vec<f64>,
    /// Midpoint dissipation of each step; one entry fewer than `times`.
    pub step_dissipation: Vec<f64>,
    /// `E(0) e^{1 − t/M}`; empty until a certificate is attached.
    pub bound: Vec<f64>,
    pub trace_y1: Vec<f64>,
    pub trace_yx1: Vec<f64>,
}

impl EnergyTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial_energy(&self) -> f64 {
        self.energy.first().copied().unwrap_or(0.0)
    }

    pub fn final_energy(&self) -> f64 {
        self.energy.last().copied().unwrap_or(0.0)
    }

    fn record(&mut self, disc: &BeamDiscretization, state: &BeamState, e: f64) {
        self.times.push(state.t);
        self.energy.push(e);
        self.dissipation.push(boundary_dissipation(disc, &state.v));
        self.trace_y1.push(disc.trace_value(&state.y));
        self.trace_yx1.push(disc.trace_slope(&state.y));
    }

    /// `∫_s^T E dt` by the trapezoidal rule on the recorded energies.
    pub fn energy_integral(&self, s: f64, t: f64) -> f64 {
        trapezoid_window(&self.times, &self.energy, s, t)
    }

    /// Energy at the recorded time closest to `t`.
    pub fn energy_at(&self, t: f64) -> f64 {
        let i = nearest_index(&self.times, t);
        self.energy[i]
    }
}

/// Options for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub damping: Damping,
    /// Keep every `snapshot_stride`-th state (0 disables snapshots).
    pub snapshot_stride: usize,
    /// Abort when the energy grows by more than `MONOTONE_TOL · E(0)` in a step.
    pub enforce_monotone: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            damping: Damping::Boundary,
            snapshot_stride: 10,
            enforce_monotone: true,
        }
    }
}

/// A finished run: energy trace, stored snapshots and the final state.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trace: EnergyTrace,
    pub snapshots: Vec<BeamState>,
    pub final_state: BeamState,
}

/// Integrates from `(y0, y1)` at `t = 0` to `t_end` with step `dt`.
///
/// Takes `ceil(t_end / dt)` steps, so the last time overshoots `t_end` when
/// `dt` does not divide it.
pub fn simulate(
    disc: &BeamDiscretization,
    y0: &DofVector,
    y1: &DofVector,
    dt: f64,
    t_end: f64,
    opts: SimulationOptions,
) -> Result<Simulation> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} must be positive"
        )));
    }
    if !(dt > 0.0) || dt >= t_end {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} must lie in (0, t_end)"
        )));
    }
    if y0.len() != disc.n_dof() || y1.len() != disc.n_dof() {
        return Err(Error::InvalidArgument("initial data size mismatch".into()));
    }
    let stepper = Stepper::new(disc, dt, opts.damping)?;
    let start = BeamState::new(0.0, y0.clone(), y1.clone());
    let n_steps = (t_end / dt - 1e-9).ceil() as usize;
    continue_simulation(&stepper, start, n_steps, opts)
}

/// Continues from `start` for `n_steps` steps of an existing stepper.
pub fn continue_simulation(
    stepper: &Stepper<'_>,
    start: BeamState,
    n_steps: usize,
    opts: SimulationOptions,
) -> Result<Simulation> {
    let disc = stepper.disc;
    let mut trace = EnergyTrace {
        dt: stepper.dt,
        ..Default::default()
    };
    trace.times.reserve(n_steps + 1);
    let mut snapshots = Vec::new();
    let mut state = start;
    let e0 = energy(disc, &state);
    let t0 = state.t;
    trace.record(disc, &state, e0);
    if opts.snapshot_stride > 0 {
        snapshots.push(state.clone());
    }
    let mut e_prev = e0;
    for n in 1..=n_steps {
        let out = stepper.step(&state);
        state = out.state;
        // keep times exact multiples of dt
        state.t = t0 + n as f64 * stepper.dt;
        if !state.y.is_finite() || !state.v.is_finite() {
            return Err(Error::Domain(format!("non-finite state at step {n}")));
        }
        let e = energy(disc, &state);
        if opts.enforce_monotone && e - e_prev > MONOTONE_TOL * e0 {
            return Err(Error::EnergyIncrease {
                step: n,
                increase: e - e_prev,
                tol: MONOTONE_TOL * e0,
            });
        }
        e_prev = e;
        trace.step_dissipation.push(out.dissipation);
        trace.record(disc, &state, e);
        if opts.snapshot_stride > 0 && (n % opts.snapshot_stride == 0 || n == n_steps) {
            snapshots.push(state.clone());
        }
    }
    Ok(Simulation {
        trace,
        snapshots,
        final_state: state,
    })
}

/// `max_n |E^{n+1} − E^n + Δt D^{n+½}| / E(0)`.
pub fn energy_derivative_identity_residual(trace: &EnergyTrace) -> f64 {
    let e0 = trace.initial_energy();
    if e0 == 0.0 {
        return 0.0;
    }
    trace
        .energy
        .windows(2)
        .zip(&trace.step_dissipation)
        .map(|(e, d)| (e[1] - e[0] + trace.dt * d).abs())
        .fold(0.0, f64::max)
        / e0
}

/// How `y_xx(t, 1)` is obtained from the discrete solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureTrace {
    /// From the moment row at `x = 1`: `y_xx = −γ y_x − y_tx`.
    Recovered,
    /// One-sided second derivative of the last element.
    Pointwise,
}

/// Space–time integrals over `[s, T] × (0, 1)` evaluated from snapshots.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WindowIntegrals {
    pub s: f64,
    pub t: f64,
    /// `∫∫ y_t²/a`
    pub kinetic: f64,
    /// `∫∫ y_t²/a · x a'/a`
    pub kinetic_log_slope: f64,
    /// `∫∫ y_xx²`
    pub bending: f64,
    /// `∫ y(t,1)²`
    pub y1_sq: f64,
    /// `∫ y_x(t,1)²`
    pub yx1_sq: f64,
    /// `∫ y_t(t,1)²`
    pub yt1_sq: f64,
    /// `∫ y_tx(t,1)²`
    pub ytx1_sq: f64,
    /// `∫ y_xx(t,1)²`
    pub yxx1_sq: f64,
    /// `∫ y_x y (t,1)`
    pub yx_y: f64,
    /// `∫ y_x y_t (t,1)`
    pub yx_yt: f64,
    /// `∫ y_x y_tx (t,1)`
    pub yx_ytx: f64,
    /// `∫ y y_t (t,1)`
    pub y_yt: f64,
    /// `[∫ y_t (x/a) y_x dx]_s^T`
    pub bracket_multiplier: f64,
    /// `[∫ y y_t / a dx]_s^T`
    pub bracket_weighted: f64,
    /// `∫ E dt`
    pub energy: f64,
    /// `E(s)`
    pub energy_s: f64,
}

/// Per-snapshot integrands, in the order of [`WindowIntegrals`].
#[derive(Debug, Clone, Copy, Default)]
struct Integrands {
    kinetic: f64,
    kinetic_log_slope: f64,
    bending: f64,
    y1: f64,
    yx1: f64,
    yt1: f64,
    ytx1: f64,
    yxx1: f64,
    multiplier: f64,
    weighted: f64,
    energy: f64,
}

fn integrands(disc: &BeamDiscretization, st: &BeamState, curvature: CurvatureTrace) -> Integrands {
    let (y, v) = (&st.y[..], &st.v[..]);
    let mut kinetic = 0.0;
    let mut kinetic_log_slope = 0.0;
    let mut multiplier = 0.0;
    let mut weighted = 0.0;
    disc.integrate([y, v], |p, j: &[Jet; 2]| {
        let w = j[1].value * j[1].value / p.a;
        kinetic += p.weight * w;
        kinetic_log_slope += p.weight * w * p.x * p.a_prime / p.a;
        multiplier += p.weight * j[1].value * p.x / p.a * j[0].d1;
        weighted += p.weight * j[0].value * j[1].value / p.a;
        0.0
    });
    let bending = disc.bending_norm_sq(y);
    let (y1, yx1) = (disc.trace_value(y), disc.trace_slope(y));
    let (yt1, ytx1) = (disc.trace_value(v), disc.trace_slope(v));
    let yxx1 = match curvature {
        CurvatureTrace::Recovered => -disc.gamma() * yx1 - ytx1,
        CurvatureTrace::Pointwise => disc.trace_second_derivative(y),
    };
    let energy = 0.5 * (kinetic + bending + disc.beta() * y1 * y1 + disc.gamma() * yx1 * yx1);
    Integrands {
        kinetic,
        kinetic_log_slope,
        bending,
        y1,
        yx1,
        yt1,
        ytx1,
        yxx1,
        multiplier,
        weighted,
        energy,
    }
}

/// Computes the window integrals with the trapezoidal rule in time.
pub fn window_integrals(
    disc: &BeamDiscretization,
    states: &[BeamState],
    s: f64,
    t: f64,
    curvature: CurvatureTrace,
) -> Result<WindowIntegrals> {
    if !(s > 0.0 && s < t) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < s < T, got s = {s}, T = {t}"
        )));
    }
    let window = window_slice(states, s, t)?;
    let times: Vec<f64> = window.iter().map(|st| st.t).collect();
    let rows: Vec<Integrands> = window
        .iter()
        .map(|st| integrands(disc, st, curvature))
        .collect();
    let integ = |f: &dyn Fn(&Integrands) -> f64| {
        let vals: Vec<f64> = rows.iter().map(f).collect();
        trapezoid(&times, &vals)
    };
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    Ok(WindowIntegrals {
        s,
        t,
        kinetic: integ(&|r| r.kinetic),
        kinetic_log_slope: integ(&|r| r.kinetic_log_slope),
        bending: integ(&|r| r.bending),
        y1_sq: integ(&|r| r.y1 * r.y1),
        yx1_sq: integ(&|r| r.yx1 * r.yx1),
        yt1_sq: integ(&|r| r.yt1 * r.yt1),
        ytx1_sq: integ(&|r| r.ytx1 * r.ytx1),
        yxx1_sq: integ(&|r| r.yxx1 * r.yxx1),
        yx_y: integ(&|r| r.yx1 * r.y1),
        yx_yt: integ(&|r| r.yx1 * r.yt1),
        yx_ytx: integ(&|r| r.yx1 * r.ytx1),
        y_yt: integ(&|r| r.y1 * r.yt1),
        bracket_multiplier: last.multiplier - first.multiplier,
        bracket_weighted: last.weighted - first.weighted,
        energy: integ(&|r| r.energy),
        energy_s: first.energy,
    })
}

fn window_slice(states: &[BeamState], s: f64, t: f64) -> Result<&[BeamState]> {
    let tol = 1e-6 * t.max(1.0);
    let first = states.iter().position(|st| st.t >= s - tol);
    let last = states.iter().rposition(|st| st.t <= t + tol);
    let (i0, i1) = match (first, last) {
        (Some(a), Some(b)) if b >= a + 2 => (a, b),
        _ => {
            return Err(Error::InsufficientSnapshots(format!(
                "need at least 3 snapshots in [{s}, {t}]"
            )))
        }
    };
    if (states[i0].t - s).abs() > tol || (states[i1].t - t).abs() > tol {
        return Err(Error::InsufficientSnapshots(format!(
            "snapshots span [{}, {}] but the window is [{s}, {t}]",
            states[i0].t, states[i1].t
        )));
    }
    Ok(&states[i0..=i1])
}

/// Normalized residuals of the two multiplier identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierReport {
    /// Identity from the `x y_x / a` multiplier.
    pub residual_multiplier: f64,
    /// Identity with the `K/2`-weighted `y / a` multiplier folded in.
    pub residual_weighted: f64,
    pub terms_multiplier: [f64; 9],
    pub largest_term_multiplier: f64,
    pub largest_term_weighted: f64,
}

/// The nine terms of the `x y_x / a` identity; they sum to zero for an exact solution.
pub fn multiplier_terms(w: &WindowIntegrals, a1: f64, beta: f64, gamma: f64) -> [f64; 9] {
    [
        2.0 * w.bracket_multiplier,
        -w.yt1_sq / a1,
        w.kinetic - w.kinetic_log_slope,
        3.0 * w.bending,
        2.0 * beta * w.yx_y,
        2.0 * w.yx_yt,
        2.0 * gamma * w.yx1_sq,
        2.0 * w.yx_ytx,
        -w.yxx1_sq,
    ]
}

/// Left side and boundary terms of the `K/2`-weighted identity.
pub fn weighted_identity_terms(
    w: &WindowIntegrals,
    k: f64,
    a1: f64,
    beta: f64,
    gamma: f64,
) -> (Vec<f64>, Vec<f64>) {
    let h = 0.5 * k;
    let lhs = vec![
        (h + 1.0) * w.kinetic - w.kinetic_log_slope,
        (3.0 - h) * w.bending,
    ];
    let rhs = vec![
        h * w.bracket_weighted,
        -2.0 * w.bracket_multiplier,
        h * beta * w.y1_sq,
        h * w.y_yt,
        gamma * (h - 2.0) * w.yx1_sq,
        (h - 2.0) * w.yx_ytx,
        w.yt1_sq / a1,
        -2.0 * beta * w.yx_y,
        -2.0 * w.yx_yt,
        w.yxx1_sq,
    ];
    (lhs, rhs)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Evaluates both multiplier identities on the stored states over `[s, T]`.
pub fn multiplier_identity_residual(
    disc: &BeamDiscretization,
    states: &[BeamState],
    s: f64,
    t: f64,
    curvature: CurvatureTrace,
) -> Result<MultiplierReport> {
    let w = window_integrals(disc, states, s, t, curvature)?;
    let coeff = disc.coefficient();
    let (a1, k) = (coeff.a_at_1(), coeff.k());
    let (beta, gamma) = (disc.beta(), disc.gamma());
    let terms = multiplier_terms(&w, a1, beta, gamma);
    let big_multiplier = max_abs(&terms);
    let sum_multiplier: f64 = terms.iter().sum();
    let (lhs, rhs) = weighted_identity_terms(&w, k, a1, beta, gamma);
    let big_weighted = max_abs(&lhs).max(max_abs(&rhs));
    let diff_weighted = lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>();
    let norm = |r: f64, big: f64| if big == 0.0 { 0.0 } else { r.abs() / big };
    Ok(MultiplierReport {
        residual_multiplier: norm(sum_multiplier, big_multiplier),
        residual_weighted: norm(diff_weighted, big_weighted),
        terms_multiplier: terms,
        largest_term_multiplier: big_multiplier,
        largest_term_weighted: big_weighted,
    })
}

/// Trapezoidal rule on a (possibly non-uniform) grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoidal integral restricted to the samples with `s ≤ t_i ≤ t`.
fn trapezoid_window(x: &[f64], y: &[f64], s: f64, t: f64) -> f64 {
    let tol = 1e-9 * t.abs().max(1.0);
    let i0 = x.iter().position(|&v| v >= s - tol).unwrap_or(x.len());
    let i1 = x.iter().rposition(|&v| v <= t + tol).map_or(0, |i| i + 1);
    if i1 <= i0 {
        return 0.0;
    }
    trapezoid(&x[i0..i1], &y[i0..i1])
}

fn nearest_index(x: &[f64], t: f64) -> usize {
    let i = x.partition_point(|&v| v < t);
    if i == 0 {
        0
    } else if i >= x.len() {
        x.len() - 1
    } else if (x[i] - t).abs() < (t - x[i - 1]).abs() {
        i
    } else {
        i - 1
    }
}
