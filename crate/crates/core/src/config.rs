//! TOML run configuration with defaults and range checks.
//!
//! ```toml
//! beta = 1.0
//! gamma = 1.0
//!
//! [coefficient]
//! family = "power_law"      # or "power_law_times_smooth"
//! alpha = 0.5
//! c = 0.0
//!
//! [mesh]
//! n_elements = 128
//! grading = 2.0
//!
//! [time]
//! dt = 1e-3
//! t_end = 20.0
//! snapshot_stride = 10
//!
//! [initial]
//! y0_choice = "x2_one_minus_x2"   # zero | x2 | x3 | x2_one_minus_x2 | sin_bump_x2
//! y0_amplitude = 1.0
//! y1_choice = "zero"
//! y1_amplitude = 1.0
//! compatible = false
//!
//! [stability]
//! delta_policy = "scan"           # or { fixed_fraction = 0.5 }
//! hardy_mesh = 512
//! hardy_coarse_mesh = 256
//!
//! [sweep]
//! alpha = [0.3, 0.7, 1.0, 1.5]
//! beta = [0.0, 1.0, 2.0]
//! gamma = [0.0, 1.0, 2.0]
//!
//! [output]
//! directory = "out"
//! label = "run"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coefficient::{CoefficientForm, DegeneracyCoefficient};
use crate::error::{Error, Result};
use crate::initial::{InitialData, Profile, Shape};
use crate::stability::DeltaPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PowerLaw,
    PowerLawTimesSmooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    #[serde(default = "default_family")]
    pub family: Family,
    pub alpha: f64,
    #[serde(default)]
    pub c: f64,
}

fn default_family() -> Family {
    Family::PowerLaw
}

impl CoefficientConfig {
    pub fn build(&self) -> Result<DegeneracyCoefficient> {
        self.build_with_alpha(self.alpha)
    }

    pub fn build_with_alpha(&self, alpha: f64) -> Result<DegeneracyCoefficient> {
        let form = match self.family {
            Family::PowerLaw => CoefficientForm::PowerLaw { alpha },
            Family::PowerLawTimesSmooth => {
                CoefficientForm::PowerLawTimesSmooth { alpha, c: self.c }
            }
        };
        DegeneracyCoefficient::new(form)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub n_elements: usize,
    pub grading: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            n_elements: 128,
            grading: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 20.0,
            snapshot_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub y0_choice: String,
    pub y0_amplitude: f64,
    pub y1_choice: String,
    pub y1_amplitude: f64,
    pub compatible: bool,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            y0_choice: Shape::X2OneMinusX2.name().into(),
            y0_amplitude: 1.0,
            y1_choice: "zero".into(),
            y1_amplitude: 1.0,
            compatible: false,
        }
    }
}

fn profile(choice: &str, amplitude: f64, key: &str) -> Result<Profile> {
    if !amplitude.is_finite() {
        return Err(Error::Config(format!(
            "{key} amplitude = {amplitude} is not finite"
        )));
    }
    if choice == "zero" || amplitude == 0.0 {
        return Ok(Profile::zero());
    }
    let shape: Shape = choice
        .parse()
        .map_err(|_| Error::Config(format!("{key} = {choice:?} is not a known profile")))?;
    Ok(Profile::single(shape, amplitude))
}

impl InitialConfig {
    pub fn build(&self) -> Result<InitialData> {
        Ok(InitialData {
            displacement: profile(&self.y0_choice, self.y0_amplitude, "initial.y0_choice")?,
            velocity: profile(&self.y1_choice, self.y1_amplitude, "initial.y1_choice")?,
            compatible: self.compatible,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub delta_policy: DeltaPolicy,
    /// Defaults to `2 − K`.
    pub eps0: Option<f64>,
    pub hardy_mesh: usize,
    pub hardy_coarse_mesh: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            delta_policy: DeltaPolicy::Scan,
            eps0: None,
            hardy_mesh: 512,
            hardy_coarse_mesh: 256,
        }
    }
}

/// Windows of the space–time checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    pub integral_s: Vec<f64>,
    pub window_s: f64,
    pub window_t: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            integral_s: vec![0.1, 1.0],
            window_s: 0.1,
            window_t: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaticConfig {
    pub lambda: f64,
    pub mu: f64,
}

impl Default for StaticConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            mu: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alpha: vec![0.3, 0.7, 1.0, 1.5],
            beta: vec![0.0, 1.0, 2.0],
            gamma: vec![0.0, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub label: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            label: "run".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub coefficient: CoefficientConfig,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default, rename = "static")]
    pub statics: StaticConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn range(ok: bool, key: &str, value: impl std::fmt::Display, need: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{key} = {value}: {need}")))
    }
}

fn nonneg(key: &str, v: f64) -> Result<()> {
    range(
        v >= 0.0 && v.is_finite(),
        key,
        v,
        "must be finite and non-negative",
    )
}

impl RunConfig {
    /// A configuration with every default and the given exponent.
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            coefficient: CoefficientConfig {
                family: Family::PowerLaw,
                alpha,
                c: 0.0,
            },
            beta: 0.0,
            gamma: 0.0,
            mesh: MeshConfig::default(),
            time: TimeConfig::default(),
            initial: InitialConfig::default(),
            stability: StabilityConfig::default(),
            checks: ChecksConfig::default(),
            statics: StaticConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.coefficient;
        range(
            c.alpha > 0.0 && c.alpha.is_finite(),
            "coefficient.alpha",
            c.alpha,
            "must be positive",
        )?;
        nonneg("coefficient.c", c.c)?;
        // the class check rejects K ≥ 2 with the value of K
        c.build()
            .map_err(|e| Error::Config(format!("coefficient.alpha = {}: {e}", c.alpha)))?;
        nonneg("beta", self.beta)?;
        nonneg("gamma", self.gamma)?;
        let m = &self.mesh;
        range(
            (4..=1 << 16).contains(&m.n_elements),
            "mesh.n_elements",
            m.n_elements,
            "must lie in [4, 65536]",
        )?;
        range(
            (1.0..=4.0).contains(&m.grading),
            "mesh.grading",
            m.grading,
            "must lie in [1, 4]",
        )?;
        let t = &self.time;
        range(
            t.dt > 0.0 && t.dt.is_finite(),
            "time.dt",
            t.dt,
            "must be positive",
        )?;
        range(
            t.t_end > t.dt && t.t_end.is_finite(),
            "time.t_end",
            t.t_end,
            "must exceed dt",
        )?;
        range(
            t.snapshot_stride >= 1,
            "time.snapshot_stride",
            t.snapshot_stride,
            "must be at least 1",
        )?;
        self.initial.build()?;
        let s = &self.stability;
        range(
            s.hardy_mesh >= 32,
            "stability.hardy_mesh",
            s.hardy_mesh,
            "must be at least 32",
        )?;
        range(
            s.hardy_coarse_mesh >= 32 && s.hardy_coarse_mesh < s.hardy_mesh,
            "stability.hardy_coarse_mesh",
            s.hardy_coarse_mesh,
            "must be at least 32 and below stability.hardy_mesh",
        )?;
        if let DeltaPolicy::FixedFraction(f) = s.delta_policy {
            range(
                f > 0.0 && f < 1.0,
                "stability.delta_policy.fixed_fraction",
                f,
                "must lie in (0, 1)",
            )?;
        }
        if let Some(e) = s.eps0 {
            range(e > 0.0, "stability.eps0", e, "must be positive")?;
        }
        let ch = &self.checks;
        for &v in &ch.integral_s {
            range(
                v >= 0.0 && v < t.t_end,
                "checks.integral_s",
                v,
                "must lie in [0, t_end)",
            )?;
        }
        range(
            ch.window_s > 0.0 && ch.window_s < ch.window_t,
            "checks.window_s",
            ch.window_s,
            "must lie in (0, window_t)",
        )?;
        range(
            ch.window_t.is_finite(),
            "checks.window_t",
            ch.window_t,
            "must be finite",
        )?;
        range(
            self.statics.lambda.is_finite(),
            "static.lambda",
            self.statics.lambda,
            "must be finite",
        )?;
        range(
            self.statics.mu.is_finite(),
            "static.mu",
            self.statics.mu,
            "must be finite",
        )?;
        for &a in &self.sweep.alpha {
            range(
                a > 0.0 && a.is_finite(),
                "sweep.alpha",
                a,
                "must be positive",
            )?;
            c.build_with_alpha(a)
                .map_err(|e| Error::Config(format!("sweep.alpha = {a}: {e}")))?;
        }
        for &b in &self.sweep.beta {
            nonneg("sweep.beta", b)?;
        }
        for &g in &self.sweep.gamma {
            nonneg("sweep.gamma", g)?;
        }
        let label = &self.output.label;
        range(
            !label.is_empty()
                && label
                    .chars()
                    .all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch)),
            "output.label",
            label,
            "must be non-empty and use only [A-Za-z0-9._-]",
        )?;
        Ok(())
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_toml_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
