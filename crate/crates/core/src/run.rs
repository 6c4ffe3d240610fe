//! Run orchestration behind the command-line subcommands.
//!
//! [`run_simulation`] and friends are pure; [`execute`] adds the output
//! directory, manifest and cleanup of partial files on failure.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficient::{estimate_hardy_constant, DegeneracyCoefficient, HardyEstimate};
use crate::config::RunConfig;
use crate::discretization::BeamDiscretization;
use crate::dynamics::{
    continue_simulation, energy, energy_derivative_identity_residual, multiplier_identity_residual,
    simulate, CurvatureTrace, Damping, EnergyTrace, MultiplierReport, SimulationOptions, Stepper,
};
use crate::error::{Error, Result};
use crate::report::{self, fmt_f64, SummaryRow};
use crate::stability::{
    attach_bound, certify_tail, compute_constants, hardy_band, m_interval, theoretical_bound,
    verify_decay, verify_integral_inequality, verify_observability_estimates, DecayReport,
    IntegralInequality, LedgerInput, ObservabilityReport, StabilityConstants, DECAY_TOL,
};
use crate::statics::{cubic_oracle, solve_variational, verify_estimates, StaticProblem};

/// Environment variable that overrides the output root.
pub const OUT_ENV: &str = "DEGBEAM_OUT";

/// Per-step tolerance of the discrete energy identity, relative to `E(0)`.
pub const ENERGY_IDENTITY_TOL: f64 = 1e-10;
/// Relative slack of the trace bounds `y(1)² ≤ C_β E`, `y_x(1)² ≤ C_γ E`.
pub const TRACE_BOUND_TOL: f64 = 1e-3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hardy constant on the fine mesh and on the coarse mesh used for the band.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyPair {
    pub coarse: HardyEstimate,
    pub fine: HardyEstimate,
}

impl HardyPair {
    pub fn compute(coeff: &DegeneracyCoefficient, coarse: usize, fine: usize) -> Result<Self> {
        Ok(Self {
            coarse: estimate_hardy_constant(coeff, coarse)?,
            fine: estimate_hardy_constant(coeff, fine)?,
        })
    }

    pub fn relative_change(&self) -> f64 {
        (self.fine.c_hp - self.coarse.c_hp).abs() / self.fine.c_hp
    }

    pub fn band(&self) -> (f64, f64) {
        hardy_band(self.coarse.c_hp, self.fine.c_hp)
    }
}

/// Ledger plus the `M` interval induced by the Hardy band.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerReport {
    pub constants: StabilityConstants,
    pub hardy: HardyPair,
    pub m_interval: (f64, f64),
}

pub fn ledger(
    cfg: &RunConfig,
    coeff: &DegeneracyCoefficient,
    hardy: HardyPair,
    beta: f64,
    gamma: f64,
) -> Result<LedgerReport> {
    let input = LedgerInput {
        eps0: cfg.stability.eps0,
        ..LedgerInput::new(coeff.k(), coeff.a_at_1(), hardy.fine.c_hp, beta, gamma)
    };
    let constants = compute_constants(&input, cfg.stability.delta_policy)?;
    let (lo, hi) = hardy.band();
    let m_interval = m_interval(&input, lo, hi, cfg.stability.delta_policy)?;
    Ok(LedgerReport {
        constants,
        hardy,
        m_interval,
    })
}

/// Everything a `simulate` run produces.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub ledger: LedgerReport,
    pub trace: EnergyTrace,
    pub decay: DecayReport,
    /// `max(t_end, 3M)`.
    pub horizon: f64,
    pub energy_residual: f64,
    pub integral: Vec<IntegralInequality>,
    pub observability: Option<ObservabilityReport>,
    pub multiplier: Option<MultiplierReport>,
    pub trace_bounds_ok: bool,
    pub verdicts: Vec<(String, bool)>,
}

impl SimulationReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.1)
    }

    pub fn summary_row(&self) -> SummaryRow {
        let c = &self.ledger.constants;
        let (trace_slack, interior_slack) = self.observability.map_or((f64::NAN, f64::NAN), |o| {
            (o.trace_estimate_slack(), o.interior_estimate_slack())
        });
        SummaryRow {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            k: c.k,
            c_hp: c.c_hp,
            eps0: c.eps0,
            nu: c.nu,
            delta: c.delta,
            c_delta: c.c_delta,
            c1: c.c1,
            c2: c.c2,
            c3: c.c3,
            m: c.m,
            fitted_rate: self.decay.fitted_rate,
            decay_ok: self.decay.ok && self.decay.certified_until >= self.horizon,
            trace_estimate_slack: trace_slack,
            interior_estimate_slack: interior_slack,
        }
    }
}

/// Steps past the recorded trace until the energy is below the bound at the
/// horizon (then monotonicity certifies the rest) or the horizon is reached.
fn extend_certificate(
    disc: &BeamDiscretization,
    stepper: &Stepper<'_>,
    sim_final: crate::dynamics::BeamState,
    trace: &EnergyTrace,
    consts: &StabilityConstants,
    horizon: f64,
    mut report: DecayReport,
) -> Result<DecayReport> {
    let e0 = trace.initial_energy();
    let chunk = trace.len().saturating_sub(1).max(1);
    let mut state = sim_final;
    let opts = SimulationOptions {
        damping: stepper.damping(),
        snapshot_stride: 0,
        enforce_monotone: true,
    };
    while report.ok && report.certified_until < horizon {
        let e = energy(disc, &state);
        let b = theoretical_bound(consts, e0, horizon);
        if e <= b * (1.0 + DECAY_TOL) {
            report.certified_until = horizon;
            break;
        }
        let remaining = ((horizon - state.t) / stepper.dt()).ceil() as usize;
        let steps = remaining.min(chunk).max(1);
        let part = continue_simulation(stepper, state, steps, opts)?;
        for (&t, &e) in part.trace.times.iter().zip(&part.trace.energy) {
            let b = theoretical_bound(consts, e0, t);
            if e > b * (1.0 + DECAY_TOL) {
                report.ok = false;
            }
            if e > 0.0 {
                report.margin = report.margin.min(b / e);
            }
        }
        state = part.final_state;
        if report.ok {
            report.certified_until = state.t;
        }
    }
    Ok(report)
}

/// Simulates one `(alpha, beta, gamma)` configuration and runs every check.
pub fn run_simulation(
    cfg: &RunConfig,
    alpha: f64,
    beta: f64,
    gamma: f64,
    hardy: Option<HardyPair>,
) -> Result<(SimulationReport, BeamDiscretization)> {
    let coeff = cfg.coefficient.build_with_alpha(alpha)?;
    let hardy = match hardy {
        Some(h) => h,
        None => HardyPair::compute(
            &coeff,
            cfg.stability.hardy_coarse_mesh,
            cfg.stability.hardy_mesh,
        )?,
    };
    let ledger = ledger(cfg, &coeff, hardy, beta, gamma)?;
    let consts = ledger.constants;
    let disc =
        BeamDiscretization::build(&coeff, cfg.mesh.n_elements, beta, gamma, cfg.mesh.grading)?;
    let (y0, y1) = cfg.initial.build()?.interpolate(&disc)?;
    let t = &cfg.time;
    let opts = SimulationOptions {
        damping: Damping::Boundary,
        snapshot_stride: t.snapshot_stride,
        enforce_monotone: true,
    };
    let sim = simulate(&disc, &y0, &y1, t.dt, t.t_end, opts)?;
    let stepper = Stepper::new(&disc, t.dt, Damping::Boundary)?;
    let mut trace = sim.trace;
    attach_bound(&mut trace, &consts);

    let horizon = t.t_end.max(3.0 * consts.m);
    let decay = verify_decay(&trace, &consts)?;
    let decay = certify_tail(&decay, &trace, &consts, horizon);
    let decay = extend_certificate(
        &disc,
        &stepper,
        sim.final_state,
        &trace,
        &consts,
        horizon,
        decay,
    )?;

    let energy_residual = energy_derivative_identity_residual(&trace);
    let integral = cfg
        .checks
        .integral_s
        .iter()
        .map(|&s| verify_integral_inequality(&trace, &consts, s))
        .collect::<Result<Vec<_>>>()?;
    let (ws, wt) = (cfg.checks.window_s, cfg.checks.window_t);
    let (observability, multiplier) = if wt <= trace.times.last().copied().unwrap_or(0.0) + 1e-9 {
        (
            Some(verify_observability_estimates(
                &disc,
                &sim.snapshots,
                &consts,
                ws,
                wt,
            )?),
            Some(multiplier_identity_residual(
                &disc,
                &sim.snapshots,
                ws,
                wt,
                CurvatureTrace::Pointwise,
            )?),
        )
    } else {
        (None, None)
    };
    let trace_bounds_ok = trace
        .energy
        .iter()
        .zip(trace.trace_y1.iter().zip(&trace.trace_yx1))
        .all(|(&e, (&y, &yx))| {
            y * y <= consts.c_beta * e * (1.0 + TRACE_BOUND_TOL)
                && yx * yx <= consts.c_gamma * e * (1.0 + TRACE_BOUND_TOL)
        });

    let mut verdicts = vec![
        ("constants_admissible".to_string(), consts.is_admissible()),
        (
            "energy_identity".to_string(),
            energy_residual <= ENERGY_IDENTITY_TOL,
        ),
        (
            "decay_certificate".to_string(),
            decay.ok && decay.certified_until >= horizon,
        ),
        ("trace_bounds".to_string(), trace_bounds_ok),
    ];
    for ii in &integral {
        verdicts.push((format!("integral_inequality_s{}", ii.s), ii.ok));
    }
    if let Some(o) = observability {
        verdicts.push(("trace_estimate".to_string(), o.trace_estimate_ok));
        verdicts.push(("interior_estimate".to_string(), o.interior_estimate_ok));
    }
    if decay.fitted_rate.is_finite() {
        verdicts.push((
            "fitted_rate_ge_inverse_m".to_string(),
            decay.fitted_rate >= 1.0 / consts.m,
        ));
    }
    Ok((
        SimulationReport {
            alpha,
            beta,
            gamma,
            ledger,
            trace,
            decay,
            horizon,
            energy_residual,
            integral,
            observability,
            multiplier,
            trace_bounds_ok,
            verdicts,
        },
        disc,
    ))
}

/// Sweep over the configured grid on a pool of `jobs` threads.
pub fn run_sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<Vec<SimulationReport>> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let sw = &cfg.sweep;
    let hardy: Vec<(f64, HardyPair)> = pool.install(|| {
        sw.alpha
            .par_iter()
            .map(|&a| {
                let c = cfg.coefficient.build_with_alpha(a)?;
                Ok((
                    a,
                    HardyPair::compute(
                        &c,
                        cfg.stability.hardy_coarse_mesh,
                        cfg.stability.hardy_mesh,
                    )?,
                ))
            })
            .collect::<Result<_>>()
    })?;
    let mut grid = Vec::new();
    for (a, h) in &hardy {
        for &b in &sw.beta {
            for &g in &sw.gamma {
                grid.push((*a, b, g, h.clone()));
            }
        }
    }
    let mut reports: Vec<SimulationReport> = pool.install(|| {
        grid.into_par_iter()
            .map(|(a, b, g, h)| run_simulation(cfg, a, b, g, Some(h)).map(|r| r.0))
            .collect::<Result<_>>()
    })?;
    reports.sort_by(|x, y| {
        (x.alpha, x.beta, x.gamma)
            .partial_cmp(&(y.alpha, y.beta, y.gamma))
            .expect("finite sweep keys")
    });
    Ok(reports)
}

/// Static solve against the cubic oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticReport {
    pub p: f64,
    pub q: f64,
    /// `|||z_h − z|||`.
    pub error: f64,
    pub estimates_ok: bool,
    pub weighted_l2: (f64, f64),
    pub triple: (f64, f64),
}

pub const STATIC_TOL: f64 = 1e-10;

pub fn run_static(cfg: &RunConfig) -> Result<StaticReport> {
    let coeff = cfg.coefficient.build()?;
    let disc = BeamDiscretization::build(
        &coeff,
        cfg.mesh.n_elements,
        cfg.beta,
        cfg.gamma,
        cfg.mesh.grading,
    )?;
    let prob = StaticProblem::new(cfg.statics.lambda, cfg.statics.mu, cfg.beta, cfg.gamma)?;
    let z = solve_variational(&disc, &prob)?;
    let exact = cubic_oracle(&prob);
    let zi = disc.interpolate_polynomial(&exact.polynomial())?;
    let diff = z.sub(&zi);
    let error = disc.triple_norm_sq(&diff).max(0.0).sqrt();
    let hardy = estimate_hardy_constant(&coeff, cfg.stability.hardy_mesh)?;
    let est = verify_estimates(&disc, &prob, &z, hardy.c_hp);
    Ok(StaticReport {
        p: exact.p,
        q: exact.q,
        error,
        estimates_ok: est.ok,
        weighted_l2: est.weighted_l2,
        triple: est.triple,
    })
}

/// Subcommands of the binary.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate,
    Constants,
    StaticSolve,
    Hardy,
    Sweep,
    Verify { trace: PathBuf, constants: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Constants => "constants",
            Command::StaticSolve => "static-solve",
            Command::Hardy => "hardy",
            Command::Sweep => "sweep",
            Command::Verify { .. } => "verify",
        }
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
    /// Output root; the run writes into `out_root/label`.
    pub out_root: PathBuf,
    pub label: String,
    pub jobs: Option<usize>,
    pub debug_matrices: bool,
}

impl Invocation {
    pub fn run_dir(&self) -> PathBuf {
        self.out_root.join(&self.label)
    }
}

/// Result of [`execute`].
#[derive(Debug, Clone)]
pub struct Outcome {
    pub ok: bool,
    pub files: Vec<PathBuf>,
    /// Human-readable report for stdout.
    pub text: String,
}

/// Tracks written files and removes them unless committed.
struct OutputGuard {
    files: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    fn new(dir: &Path) -> Result<Self> {
        let mut dirs = Vec::new();
        let mut p = Some(dir);
        while let Some(d) = p {
            if d.as_os_str().is_empty() || d.exists() {
                break;
            }
            dirs.push(d.to_path_buf());
            p = d.parent();
        }
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            files: Vec::new(),
            dirs,
            committed: false,
        })
    }

    fn write(&mut self, path: PathBuf, text: &str) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.exists() {
                std::fs::create_dir_all(parent)?;
                self.dirs.insert(0, parent.to_path_buf());
            }
        }
        self.files.push(path.clone());
        report::write_text(&path, text)
    }

    fn track(&mut self, paths: Vec<PathBuf>) {
        self.files.extend(paths);
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.files)
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = std::fs::remove_file(f);
        }
        for d in &self.dirs {
            let _ = std::fs::remove_dir(d);
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    label: &'a str,
    config: &'a RunConfig,
}

fn manifest(inv: &Invocation) -> Result<String> {
    toml::to_string(&Manifest {
        command: inv.command.name(),
        version: VERSION,
        label: &inv.label,
        config: &inv.config,
    })
    .map_err(|e| Error::Parse(e.to_string()))
}

fn trace_file_name(label: &str, alpha: f64, beta: f64, gamma: f64) -> String {
    format!("{label}_{alpha}_{beta}_{gamma}.csv")
}

fn constants_text(l: &LedgerReport, class: &str) -> String {
    let mut entries: Vec<(&str, String)> = l
        .constants
        .entries()
        .iter()
        .map(|(k, v)| (*k, fmt_f64(*v)))
        .collect();
    entries.push(("class", class.to_string()));
    entries.push(("c_hp_coarse", fmt_f64(l.hardy.coarse.c_hp)));
    entries.push(("hardy_mesh", l.hardy.fine.mesh_n.to_string()));
    entries.push(("hardy_coarse_mesh", l.hardy.coarse.mesh_n.to_string()));
    entries.push(("M_lo", fmt_f64(l.m_interval.0)));
    entries.push(("M_hi", fmt_f64(l.m_interval.1)));
    report::key_values(entries)
}

fn verdict_text(verdicts: &[(String, bool)]) -> String {
    report::key_values(
        verdicts
            .iter()
            .map(|(k, ok)| (k.as_str(), if *ok { "ok" } else { "FAIL" }.to_string())),
    )
}

fn simulation_text(r: &SimulationReport) -> String {
    let mut entries: Vec<(&str, String)> = vec![
        ("E0", fmt_f64(r.trace.initial_energy())),
        ("E_end", fmt_f64(r.trace.final_energy())),
        ("energy_identity_residual", fmt_f64(r.energy_residual)),
        ("horizon", fmt_f64(r.horizon)),
        ("certified_until", fmt_f64(r.decay.certified_until)),
        ("margin", fmt_f64(r.decay.margin)),
        ("fitted_rate", fmt_f64(r.decay.fitted_rate)),
        ("inverse_M", fmt_f64(1.0 / r.ledger.constants.m)),
    ];
    let mut owned: Vec<(String, String)> = Vec::new();
    for ii in &r.integral {
        owned.push((format!("integral_slack_s{}", ii.s), fmt_f64(ii.slack())));
    }
    if let Some(o) = r.observability {
        owned.push((
            "trace_estimate_slack".into(),
            fmt_f64(o.trace_estimate_slack()),
        ));
        owned.push((
            "interior_estimate_slack".into(),
            fmt_f64(o.interior_estimate_slack()),
        ));
    }
    if let Some(m) = r.multiplier {
        owned.push(("multiplier_residual".into(), fmt_f64(m.residual_multiplier)));
        owned.push(("weighted_residual".into(), fmt_f64(m.residual_weighted)));
    }
    entries.extend(owned.iter().map(|(k, v)| (k.as_str(), v.clone())));
    report::key_values(entries)
}

/// Runs a subcommand, writing its files under `inv.run_dir()`. Files written
/// by a failing run are removed again; failed verdicts keep their files and
/// report `ok = false`.
pub fn execute(inv: &Invocation) -> Result<Outcome> {
    let dir = inv.run_dir();
    let mut out = OutputGuard::new(&dir)?;
    let cfg = &inv.config;
    let text: String;
    let ok = match &inv.command {
        Command::Simulate => {
            let (r, disc) = run_simulation(cfg, cfg.coefficient.alpha, cfg.beta, cfg.gamma, None)?;
            if inv.debug_matrices {
                let files = disc.dump_matrices(&dir.join("matrices"))?;
                out.track(files);
            }
            let class = disc.coefficient().class().as_str();
            out.write(
                dir.join(trace_file_name(&inv.label, r.alpha, r.beta, r.gamma)),
                &report::trace_csv(&r.trace),
            )?;
            out.write(dir.join("constants.txt"), &constants_text(&r.ledger, class))?;
            let body = format!("{}{}", simulation_text(&r), verdict_text(&r.verdicts));
            out.write(dir.join("verdicts.txt"), &body)?;
            text = body;
            r.ok()
        }
        Command::Constants => {
            let coeff = cfg.coefficient.build()?;
            let hardy = HardyPair::compute(
                &coeff,
                cfg.stability.hardy_coarse_mesh,
                cfg.stability.hardy_mesh,
            )?;
            let l = ledger(cfg, &coeff, hardy, cfg.beta, cfg.gamma)?;
            let body = constants_text(&l, coeff.class().as_str());
            out.write(dir.join("constants.txt"), &body)?;
            text = body;
            l.constants.is_admissible()
        }
        Command::StaticSolve => {
            let r = run_static(cfg)?;
            let ok = r.error <= STATIC_TOL && r.estimates_ok;
            let body = report::key_values([
                ("lambda", fmt_f64(cfg.statics.lambda)),
                ("mu", fmt_f64(cfg.statics.mu)),
                ("p", fmt_f64(r.p)),
                ("q", fmt_f64(r.q)),
                ("triple_norm_error", fmt_f64(r.error)),
                ("weighted_l2_lhs", fmt_f64(r.weighted_l2.0)),
                ("weighted_l2_rhs", fmt_f64(r.weighted_l2.1)),
                ("triple_lhs", fmt_f64(r.triple.0)),
                ("triple_rhs", fmt_f64(r.triple.1)),
                (
                    "estimates",
                    if r.estimates_ok { "ok" } else { "FAIL" }.to_string(),
                ),
                (
                    "oracle_match",
                    if r.error <= STATIC_TOL { "ok" } else { "FAIL" }.to_string(),
                ),
            ]);
            out.write(dir.join("static.txt"), &body)?;
            text = body;
            ok
        }
        Command::Hardy => {
            let coeff = cfg.coefficient.build()?;
            let h = HardyPair::compute(
                &coeff,
                cfg.stability.hardy_coarse_mesh,
                cfg.stability.hardy_mesh,
            )?;
            let hyp = coeff.check_hypothesis(4096)?;
            let (lo, hi) = h.band();
            let body = report::key_values([
                ("K", fmt_f64(coeff.k())),
                ("class", coeff.class().as_str().to_string()),
                ("c_hp", fmt_f64(h.fine.c_hp)),
                ("lambda_min", fmt_f64(h.fine.lambda_min)),
                ("mesh", h.fine.mesh_n.to_string()),
                ("c_hp_coarse", fmt_f64(h.coarse.c_hp)),
                ("mesh_coarse", h.coarse.mesh_n.to_string()),
                ("relative_change", fmt_f64(h.relative_change())),
                ("band_lo", fmt_f64(lo)),
                ("band_hi", fmt_f64(hi)),
                ("hypothesis", if hyp.ok { "ok" } else { "FAIL" }.to_string()),
            ]);
            out.write(dir.join("hardy.txt"), &body)?;
            text = body;
            hyp.ok
        }
        Command::Sweep => {
            let reports = run_sweep(cfg, inv.jobs)?;
            let rows: Vec<SummaryRow> = reports.iter().map(|r| r.summary_row()).collect();
            for r in &reports {
                out.write(
                    dir.join("traces")
                        .join(trace_file_name(&inv.label, r.alpha, r.beta, r.gamma)),
                    &report::trace_csv(&r.trace),
                )?;
            }
            out.write(dir.join("summary.csv"), &report::summary_csv(&rows))?;
            let mut verdicts = Vec::new();
            for r in &reports {
                for (k, v) in &r.verdicts {
                    verdicts.push((format!("{}_{}_{}.{k}", r.alpha, r.beta, r.gamma), *v));
                }
            }
            let body = verdict_text(&verdicts);
            out.write(dir.join("verdicts.txt"), &body)?;
            let failed = verdicts.iter().filter(|v| !v.1).count();
            text = format!("runs = {}\nfailed_verdicts = {failed}\n", reports.len());
            failed == 0
        }
        Command::Verify { trace, constants } => {
            let tr = report::parse_trace_csv(&std::fs::read_to_string(trace)?)?;
            let map = report::parse_key_values(&std::fs::read_to_string(constants)?)?;
            let consts = StabilityConstants::from_entries(|k| report::get_f64(&map, k))?;
            let r = verify_decay(&tr, &consts)?;
            let body = report::key_values([
                ("decay_ok", r.ok.to_string()),
                ("margin", fmt_f64(r.margin)),
                ("fitted_rate", fmt_f64(r.fitted_rate)),
                ("fit_points", r.fit_points.to_string()),
                ("M", fmt_f64(consts.m)),
            ]);
            out.write(dir.join("verify.txt"), &body)?;
            text = body;
            r.ok
        }
    };
    out.write(dir.join("manifest.toml"), &manifest(inv)?)?;
    Ok(Outcome {
        ok,
        files: out.commit(),
        text,
    })
}
