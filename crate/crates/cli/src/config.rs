//! Run configuration: defaults, an optional flat TOML file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use gradest::bounds::{ConstantVariant, CutoffConstants};
use gradest::conditions::{SRange, DEFAULT_SAMPLES, DEFAULT_S_RANGE};
use gradest::solver::{SolverOptions, DEFAULT_FLOOR_RATIO, DEFAULT_RESAMPLE, DEFAULT_TOL};
use gradest::verify::{VerifySettings, VERIFY_SLACK};
use serde::{Deserialize, Serialize};

/// Settings shared by all commands. Each flag doubles as a key of the
/// configuration file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Tuning {
    /// Cut-off constant C1 (> 0)
    #[arg(long, help_heading = "Configuration")]
    pub c1: Option<f64>,
    /// Cut-off constant C2 (>= 0)
    #[arg(long, help_heading = "Configuration")]
    pub c2: Option<f64>,
    /// Closed form of the general constant: stated | proof
    #[arg(long, help_heading = "Configuration")]
    pub variant: Option<String>,
    /// Sampling interval for condition checks, as lo:hi
    #[arg(long, allow_hyphen_values = true, help_heading = "Configuration")]
    pub s_range: Option<String>,
    /// Number of sample points for condition checks
    #[arg(long, help_heading = "Configuration")]
    pub samples: Option<usize>,
    /// Local tolerance of the ODE integrator
    #[arg(long, help_heading = "Configuration")]
    pub tol: Option<f64>,
    /// Integration stops once u falls below this fraction of u0
    #[arg(long, help_heading = "Configuration")]
    pub u_floor: Option<f64>,
    /// Size of the uniform output grid of a solve
    #[arg(long, help_heading = "Configuration")]
    pub resample: Option<usize>,
    /// Relative slack of pass/fail comparisons
    #[arg(long, help_heading = "Configuration")]
    pub slack: Option<f64>,
}

impl Tuning {
    fn or(self, base: Tuning) -> Tuning {
        Tuning {
            c1: self.c1.or(base.c1),
            c2: self.c2.or(base.c2),
            variant: self.variant.or(base.variant),
            s_range: self.s_range.or(base.s_range),
            samples: self.samples.or(base.samples),
            tol: self.tol.or(base.tol),
            u_floor: self.u_floor.or(base.u_floor),
            resample: self.resample.or(base.resample),
            slack: self.slack.or(base.slack),
        }
    }
}

/// The effective configuration, echoed in every report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub file: Option<PathBuf>,
    pub c1: f64,
    pub c2: f64,
    pub variant: ConstantVariant,
    pub s_range: SRange,
    pub samples: usize,
    pub tol: f64,
    pub u_floor: f64,
    pub resample: usize,
    pub slack: f64,
}

impl RunConfig {
    /// Merge flags over the file at `path` over the built-in defaults.
    pub fn resolve(flags: Tuning, path: Option<&Path>) -> Result<RunConfig> {
        let file = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Tuning::default(),
        };
        let t = flags.or(file);
        let defaults = CutoffConstants::default();
        let variant = match t.variant.as_deref() {
            None => ConstantVariant::default(),
            Some(label) => ConstantVariant::from_label(label)
                .with_context(|| format!("unknown variant {label:?}, expected stated or proof"))?,
        };
        let s_range = match t.s_range.as_deref() {
            None => DEFAULT_S_RANGE,
            Some(text) => parse_range(text)?,
        };
        let config = RunConfig {
            file: path.map(Path::to_path_buf),
            c1: t.c1.unwrap_or(defaults.c1),
            c2: t.c2.unwrap_or(defaults.c2),
            variant,
            s_range,
            samples: t.samples.unwrap_or(DEFAULT_SAMPLES),
            tol: t.tol.unwrap_or(DEFAULT_TOL),
            u_floor: t.u_floor.unwrap_or(DEFAULT_FLOOR_RATIO),
            resample: t.resample.unwrap_or(DEFAULT_RESAMPLE),
            slack: t.slack.unwrap_or(VERIFY_SLACK),
        };
        for (name, value) in [
            ("tol", config.tol),
            ("u-floor", config.u_floor),
            ("slack", config.slack),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                bail!("{name} must be positive, got {value}");
            }
        }
        if config.samples < 2 {
            bail!("samples must be at least 2");
        }
        if config.resample < 2 {
            bail!("resample must be at least 2");
        }
        CutoffConstants::new(config.c1, config.c2)?;
        Ok(config)
    }

    pub fn cutoff(&self) -> CutoffConstants {
        CutoffConstants {
            c1: self.c1,
            c2: self.c2,
        }
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            floor_ratio: self.u_floor,
            resample: self.resample,
        }
    }

    pub fn verify(&self) -> VerifySettings {
        VerifySettings {
            cutoff: self.cutoff(),
            variant: self.variant,
            slack: self.slack,
            samples: self.samples,
        }
    }
}

/// `lo:hi` with `lo < hi`.
pub fn parse_range(text: &str) -> Result<SRange> {
    let (lo, hi) = text
        .split_once(':')
        .with_context(|| format!("range {text:?} is not of the form lo:hi"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad lower end in {text:?}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad upper end in {text:?}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        bail!("range {text:?} needs finite lo < hi");
    }
    Ok(SRange::new(lo, hi))
}

/// Comma-separated reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {item:?} in {text:?}"))
        })
        .collect()
}
