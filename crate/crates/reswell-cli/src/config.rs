use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use reswell::{Geometry, WellSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bw,
    Pt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourArg {
    Real,
    Deformed,
}

#[derive(Parser, Debug)]
#[command(
    name = "reswell",
    version,
    about = "Square-well resonances, exceptional points and PT-symmetric models"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// natural: hbar = 1, 2m = 1, a = 1; si: --hbar, --m and --a are required
    #[arg(long, global = true)]
    pub units: Option<Units>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Bound-state energies below V0
    Bound,
    /// Complex-conjugate resonance pairs, one per strip
    Resonances {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Threshold depths V0(n)
    Exceptional {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Phase shift, amplitude and Wigner delay above threshold
    Scatter(Sweep),
    /// Transmission sweep and pole pairs of the one-dimensional well
    Well1d {
        #[command(flatten)]
        sweep: Sweep,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Spectrum taxonomy and intertwiner of a finite matrix
    Ptmatrix {
        /// builds [[1 + i, s], [s, 1 - i]]
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        /// JSON file holding rows of [re, im] pairs
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Grid check of the two-frequency oscillator ground state
    Pu {
        #[arg(long, allow_negative_numbers = true)]
        w1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        w2: Option<f64>,
        /// real part of the pair wr +- i wi
        #[arg(long, allow_negative_numbers = true)]
        wr: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        wi: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        extent: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Time dependence of the one- and two-pole propagators
    Propagator {
        #[arg(long, allow_negative_numbers = true)]
        e0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[arg(long)]
        kind: Option<Kind>,
        #[arg(long)]
        contour: Option<ContourArg>,
        #[arg(long, allow_negative_numbers = true)]
        tmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        tmax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Runs the invariant suite and prints a pass/fail table
    VerifyAll,
}

#[derive(Args, Debug, Default)]
pub struct Sweep {
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// number of sweep points
    #[arg(long)]
    pub n: Option<usize>,
}

/// Flags and config-file keys, merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
}

macro_rules! overlay {
    ($cfg:expr, $($field:ident = $val:expr),* $(,)?) => {
        {
            $(if let Some(v) = $val.clone() {
                $cfg.$field = Some(v);
            })*
        }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
    }

    /// File values first, then every flag that was given.
    pub fn merge(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.common.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        let c = &cli.common;
        overlay!(
            cfg,
            units = c.units,
            v0 = c.v0,
            a = c.a,
            m = c.m,
            hbar = c.hbar,
            format = c.format,
            output = c.output
        );
        match &cli.cmd {
            Cmd::Bound | Cmd::VerifyAll => {}
            Cmd::Resonances { n_max } => overlay!(cfg, n_max = n_max),
            Cmd::Exceptional { n } => overlay!(cfg, n = n),
            Cmd::Scatter(s) => overlay!(cfg, emin = s.emin, emax = s.emax, n = s.n),
            Cmd::Well1d { sweep, n_max } => {
                overlay!(cfg, emin = sweep.emin, emax = sweep.emax, n = sweep.n, n_max = n_max)
            }
            Cmd::Ptmatrix { s, matrix } => overlay!(cfg, s = s, matrix = matrix),
            Cmd::Pu {
                w1,
                w2,
                wr,
                wi,
                extent,
                points,
            } => {
                overlay!(
                    cfg,
                    w1 = w1,
                    w2 = w2,
                    wr = wr,
                    wi = wi,
                    extent = extent,
                    points = points
                )
            }
            Cmd::Propagator {
                e0,
                gamma,
                kind,
                contour,
                tmin,
                tmax,
                n,
            } => {
                overlay!(
                    cfg,
                    e0 = e0,
                    gamma = gamma,
                    kind = kind,
                    contour = contour,
                    tmin = tmin,
                    tmax = tmax,
                    n = n
                )
            }
        }
        Ok(cfg)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn well(&self, geometry: Geometry) -> Result<WellSpec, CliError> {
        let v0 = self.v0.ok_or_else(|| CliError::Validation("--v0 is required".into()))?;
        self.well_with_v0(v0, geometry)
    }

    pub fn well_with_v0(&self, v0: f64, geometry: Geometry) -> Result<WellSpec, CliError> {
        let (a, m, hbar) = match self.units.unwrap_or(Units::Natural) {
            Units::Natural => {
                if self.a.is_some() || self.m.is_some() || self.hbar.is_some() {
                    return Err(CliError::Validation(
                        "--units natural fixes hbar, m and a; use --units si to set them".into(),
                    ));
                }
                (1.0, 0.5, 1.0)
            }
            Units::Si => match (self.a, self.m, self.hbar) {
                (Some(a), Some(m), Some(h)) => (a, m, h),
                _ => return Err(CliError::Validation("--units si requires --a, --m and --hbar".into())),
            },
        };
        Ok(WellSpec::new(v0, a, m, hbar, geometry)?)
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Validation(format!(
            "--{name} must be finite and > 0, got {v}"
        )))
    }
}

pub fn at_least(name: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("--{name} must be >= {min}, got {v}")))
    }
}
