//! C ABI for the degbeam core.
//!
//! Every function returns a [`DbStatus`]; results come back through out
//! pointers. Objects are opaque handles created by `*_new` functions and
//! released with the matching `*_free`. After a non-zero status,
//! [`db_last_error_message`] describes the failure on the calling thread.
//! Panics never cross the boundary; they surface as `DB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use degbeam::coefficient::{estimate_hardy_constant, DegeneracyClass, DegeneracyCoefficient};
use degbeam::config::InitialConfig;
use degbeam::discretization::BeamDiscretization;
use degbeam::dynamics::{
    energy_derivative_identity_residual, simulate, EnergyTrace, SimulationOptions,
};
use degbeam::stability::{
    attach_bound, compute_constants, verify_decay, DeltaPolicy, LedgerInput, StabilityConstants,
};
use degbeam::statics::{cubic_oracle, solve_variational, StaticProblem};
use degbeam::Error;

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Classification = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

impl From<&Error> for DbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => DbStatus::Domain,
            Error::Classification { .. } => DbStatus::Classification,
            Error::InvalidCoefficient(_)
            | Error::InvalidArgument(_)
            | Error::InsufficientSnapshots(_)
            | Error::Config(_)
            | Error::Parse(_) => DbStatus::InvalidArgument,
            Error::NotPositiveDefinite { .. }
            | Error::Eigen(_)
            | Error::InfeasibleDelta(_)
            | Error::EnergyIncrease { .. } => DbStatus::Numerical,
            Error::Io(_) => DbStatus::Io,
        }
    }
}

/// Opaque coefficient handle.
pub struct DbCoefficient(DegeneracyCoefficient);

/// Opaque discretization handle.
pub struct DbDiscretization(BeamDiscretization);

/// Opaque energy trace handle.
pub struct DbTrace(EnergyTrace);

/// Stability constants, field for field.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DbConstants {
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

impl From<&StabilityConstants> for DbConstants {
    fn from(c: &StabilityConstants) -> Self {
        Self {
            k: c.k,
            c_hp: c.c_hp,
            eps0: c.eps0,
            a1: c.a1,
            beta: c.beta,
            gamma: c.gamma,
            c_beta: c.c_beta,
            c_gamma: c.c_gamma,
            theta: c.theta,
            rho: c.rho,
            nu: c.nu,
            delta: c.delta,
            c_delta: c.c_delta,
            c1: c.c1,
            c2: c.c2,
            c3: c.c3,
            m: c.m,
        }
    }
}

impl From<&DbConstants> for StabilityConstants {
    fn from(c: &DbConstants) -> Self {
        Self {
            k: c.k,
            c_hp: c.c_hp,
            eps0: c.eps0,
            a1: c.a1,
            beta: c.beta,
            gamma: c.gamma,
            c_beta: c.c_beta,
            c_gamma: c.c_gamma,
            theta: c.theta,
            rho: c.rho,
            nu: c.nu,
            delta: c.delta,
            c_delta: c.c_delta,
            c1: c.c1,
            c2: c.c2,
            c3: c.c3,
            m: c.m,
        }
    }
}

/// Outcome of [`db_verify_decay`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DbDecay {
    /// 1 when `E(t) <= E(0) e^{1 - t/M}` at every sample.
    pub ok: c_int,
    pub margin: f64,
    /// NaN when the trace is too short or flat to fit.
    pub fitted_rate: f64,
    pub fit_points: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, records any error or panic and converts it to a status.
fn guard(f: impl FnOnce() -> Result<(), (DbStatus, String)>) -> DbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            DbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DbStatus::Panic
        }
    }
}

fn lift<T>(r: degbeam::Result<T>) -> Result<T, (DbStatus, String)> {
    r.map_err(|e| (DbStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (DbStatus, String) {
    (DbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DbStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (DbStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, (DbStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (DbStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `cap - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn db_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn db_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `a(x) = x^alpha (1 + c x)`; `c = 0` gives the pure power law.
///
/// # Safety
/// `out_handle` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_coefficient_new(
    alpha: f64,
    c: f64,
    out_handle: *mut *mut DbCoefficient,
) -> DbStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let coeff = lift(if c == 0.0 {
            DegeneracyCoefficient::power_law(alpha)
        } else {
            DegeneracyCoefficient::power_law_times_smooth(alpha, c)
        })?;
        *slot = Box::into_raw(Box::new(DbCoefficient(coeff)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`db_coefficient_new`] not freed before.
#[no_mangle]
pub unsafe extern "C" fn db_coefficient_free(h: *mut DbCoefficient) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `K = sup x|a'|/a`, `a(1)` and the class (0 = weakly, 1 = strongly degenerate).
///
/// # Safety
/// `h` must be a live coefficient handle; out pointers must be valid or null
/// (null outputs are skipped).
#[no_mangle]
pub unsafe extern "C" fn db_coefficient_info(
    h: *const DbCoefficient,
    k: *mut f64,
    a1: *mut f64,
    class: *mut c_int,
) -> DbStatus {
    guard(|| {
        let c = &deref(h, "coefficient")?.0;
        if let Some(k) = k.as_mut() {
            *k = c.k();
        }
        if let Some(a1) = a1.as_mut() {
            *a1 = c.a_at_1();
        }
        if let Some(class) = class.as_mut() {
            *class = match c.class() {
                DegeneracyClass::WeaklyDegenerate => 0,
                DegeneracyClass::StronglyDegenerate => 1,
            };
        }
        Ok(())
    })
}

/// Hardy constant estimate on a `mesh_n` element grid.
///
/// # Safety
/// `h` must be a live coefficient handle; `c_hp` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_coefficient_hardy(
    h: *const DbCoefficient,
    mesh_n: usize,
    c_hp: *mut f64,
) -> DbStatus {
    guard(|| {
        let c = &deref(h, "coefficient")?.0;
        let slot = out(c_hp, "c_hp")?;
        *slot = lift(estimate_hardy_constant(c, mesh_n))?.c_hp;
        Ok(())
    })
}

/// # Safety
/// `coeff` must be a live coefficient handle; `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_discretization_new(
    coeff: *const DbCoefficient,
    n_elements: usize,
    beta: f64,
    gamma: f64,
    grading: f64,
    out_handle: *mut *mut DbDiscretization,
) -> DbStatus {
    guard(|| {
        let c = &deref(coeff, "coefficient")?.0;
        let slot = out(out_handle, "out")?;
        let d = lift(BeamDiscretization::build(
            c, n_elements, beta, gamma, grading,
        ))?;
        *slot = Box::into_raw(Box::new(DbDiscretization(d)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live discretization handle.
#[no_mangle]
pub unsafe extern "C" fn db_discretization_free(h: *mut DbDiscretization) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live discretization handle; `n_dof` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_discretization_n_dof(
    h: *const DbDiscretization,
    n_dof: *mut usize,
) -> DbStatus {
    guard(|| {
        let d = &deref(h, "discretization")?.0;
        *out(n_dof, "n_dof")? = d.n_dof();
        Ok(())
    })
}

/// Solves the static problem with loads `lambda`, `mu` at `x = 1`. Returns
/// the cubic `p`, `q` of the exact solution and the discrete error in the
/// energy norm.
///
/// # Safety
/// `h` must be a live discretization handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_static_solve(
    h: *const DbDiscretization,
    lambda: f64,
    mu: f64,
    p: *mut f64,
    q: *mut f64,
    error: *mut f64,
) -> DbStatus {
    guard(|| {
        let d = &deref(h, "discretization")?.0;
        let (p, q, error) = (out(p, "p")?, out(q, "q")?, out(error, "error")?);
        let prob = lift(StaticProblem::new(lambda, mu, d.beta(), d.gamma()))?;
        let z = lift(solve_variational(d, &prob))?;
        let exact = cubic_oracle(&prob);
        let zi = lift(d.interpolate_polynomial(&exact.polynomial()))?;
        *p = exact.p;
        *q = exact.q;
        *error = d.triple_norm_sq(&z.sub(&zi)).max(0.0).sqrt();
        Ok(())
    })
}

/// Stability constants for the given data with the scanned `delta`. Pass a
/// NaN `eps0` for the default `2 - K`.
///
/// # Safety
/// `out_constants` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_stability_constants(
    k: f64,
    a1: f64,
    c_hp: f64,
    beta: f64,
    gamma: f64,
    eps0: f64,
    out_constants: *mut DbConstants,
) -> DbStatus {
    guard(|| {
        let slot = out(out_constants, "constants")?;
        let input = LedgerInput {
            eps0: (!eps0.is_nan()).then_some(eps0),
            ..LedgerInput::new(k, a1, c_hp, beta, gamma)
        };
        *slot = (&lift(compute_constants(&input, DeltaPolicy::Scan))?).into();
        Ok(())
    })
}

/// Simulates from the named initial shapes (`zero`, `x2`, `x3`,
/// `x2_one_minus_x2`, `sin_bump_x2`) with boundary feedback on.
///
/// # Safety
/// `h` must be a live discretization handle, the strings NUL terminated and
/// `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_simulate(
    h: *const DbDiscretization,
    y0_choice: *const c_char,
    y0_amplitude: f64,
    y1_choice: *const c_char,
    y1_amplitude: f64,
    dt: f64,
    t_end: f64,
    out_handle: *mut *mut DbTrace,
) -> DbStatus {
    guard(|| {
        let d = &deref(h, "discretization")?.0;
        let slot = out(out_handle, "out")?;
        let init = InitialConfig {
            y0_choice: string(y0_choice, "y0_choice")?,
            y0_amplitude,
            y1_choice: string(y1_choice, "y1_choice")?,
            y1_amplitude,
            compatible: false,
        };
        let (y0, y1) = lift(lift(init.build())?.interpolate(d))?;
        let opts = SimulationOptions {
            snapshot_stride: 0,
            ..SimulationOptions::default()
        };
        let sim = lift(simulate(d, &y0, &y1, dt, t_end, opts))?;
        *slot = Box::into_raw(Box::new(DbTrace(sim.trace)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn db_trace_free(h: *mut DbTrace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of samples in the trace.
///
/// # Safety
/// `h` must be a live trace handle; `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_trace_len(h: *const DbTrace, len: *mut usize) -> DbStatus {
    guard(|| {
        *out(len, "len")? = deref(h, "trace")?.0.len();
        Ok(())
    })
}

/// Copies times and energies into caller buffers of `cap` doubles each.
/// Fails with `DB_STATUS_INVALID_ARGUMENT` when `cap` is too small.
///
/// # Safety
/// `times` and `energy` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn db_trace_copy(
    h: *const DbTrace,
    times: *mut f64,
    energy: *mut f64,
    cap: usize,
) -> DbStatus {
    guard(|| {
        let t = &deref(h, "trace")?.0;
        if times.is_null() || energy.is_null() {
            return Err(null("output buffer"));
        }
        if cap < t.len() {
            return Err((
                DbStatus::InvalidArgument,
                format!("buffer holds {cap} samples, trace has {}", t.len()),
            ));
        }
        std::slice::from_raw_parts_mut(times, t.len()).copy_from_slice(&t.times);
        std::slice::from_raw_parts_mut(energy, t.len()).copy_from_slice(&t.energy);
        Ok(())
    })
}

/// Largest per-step defect of the discrete energy balance relative to `E(0)`.
///
/// # Safety
/// `h` must be a live trace handle; `residual` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn db_trace_energy_residual(
    h: *const DbTrace,
    residual: *mut f64,
) -> DbStatus {
    guard(|| {
        *out(residual, "residual")? = energy_derivative_identity_residual(&deref(h, "trace")?.0);
        Ok(())
    })
}

/// Attaches the bound `E(0) e^{1 - t/M}` and checks the trace against it.
///
/// # Safety
/// `h` must be a live trace handle; `constants` readable; `report` writable.
#[no_mangle]
pub unsafe extern "C" fn db_verify_decay(
    h: *mut DbTrace,
    constants: *const DbConstants,
    report: *mut DbDecay,
) -> DbStatus {
    guard(|| {
        let t = &mut h.as_mut().ok_or_else(|| null("trace"))?.0;
        let c: StabilityConstants = deref(constants, "constants")?.into();
        let slot = out(report, "report")?;
        attach_bound(t, &c);
        let r = lift(verify_decay(t, &c))?;
        *slot = DbDecay {
            ok: c_int::from(r.ok),
            margin: r.margin,
            fitted_rate: r.fitted_rate,
            fit_points: r.fit_points,
        };
        Ok(())
    })
}
