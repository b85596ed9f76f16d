//! Run parameters: command-line flags merged over an optional JSON file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use circulant_core::model::KernelFamily;
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Gaussian,
    /// g(u) = 1/(u + iε), the complex Hermitian family.
    InverseArgument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeName {
    /// M sites on a circle of circumference L.
    Finite,
    /// M → ∞ at spacing τ.
    Lattice,
    /// M → ∞ on a circle of circumference L.
    FiniteL,
    /// L → ∞.
    Thermo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Every parameter any subcommand reads. Flags take precedence over the
/// `--config` file, which takes precedence over per-command defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// JSON file with any of these parameters (snake_case keys)
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Subcommand the file is meant for; checked against the one given
    #[arg(skip)]
    pub command: Option<String>,

    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Gaussian width c
    #[arg(long)]
    pub c: Option<f64>,
    /// Regulariser of the inverse-argument family
    #[arg(long)]
    pub eps: Option<f64>,
    /// Spatial dimension (Gaussian family)
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeName>,
    /// Number of sites per axis
    #[arg(long)]
    pub m: Option<usize>,
    /// Circumference (torus side)
    #[arg(long)]
    pub l: Option<f64>,
    /// Lattice spacing
    #[arg(long)]
    pub tau: Option<f64>,
    /// Fugacity; excludes --beta/--mu
    #[arg(long)]
    pub z: Option<f64>,
    /// Inverse temperature of the free-fermion gas
    #[arg(long)]
    pub beta: Option<f64>,
    /// Chemical potential of the free-fermion gas
    #[arg(long)]
    pub mu: Option<f64>,

    /// Interval start
    #[arg(long)]
    pub a: Option<f64>,
    /// Interval end
    #[arg(long)]
    pub b: Option<f64>,
    /// Interval length, an alternative to --b
    #[arg(long)]
    pub length: Option<f64>,
    /// Thinning parameter of det(I − ξK)
    #[arg(long)]
    pub xi: Option<f64>,
    /// Starting Nyström order
    #[arg(long)]
    pub order: Option<usize>,
    /// Largest particle count reported by `counting`
    #[arg(long)]
    pub nmax: Option<usize>,

    /// Largest separation or spectral variable on output grids
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Rows on output grids
    #[arg(long)]
    pub steps: Option<usize>,
    /// Largest |p| for finite-L eigenvalues
    #[arg(long)]
    pub pmax: Option<i64>,

    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Block sides for `hole`, comma separated
    #[arg(long, value_delimiter = ',')]
    pub sides: Option<Vec<usize>>,

    /// Check groups for `verify`, comma separated ("all" for every group)
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    /// Divide every verification tolerance by 10
    #[arg(long)]
    pub strict: bool,
    /// Zero the runtimes in the verification report
    #[arg(long)]
    pub omit_timing: bool,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default from CIRCULANT_THREADS, else all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

macro_rules! prefer {
    ($flags:ident, $file:ident; $($f:ident),*) => {
        Params {
            $($f: $flags.$f.or($file.$f),)*
            strict: $flags.strict || $file.strict,
            omit_timing: $flags.omit_timing || $file.omit_timing,
        }
    };
}

impl Params {
    /// Merges `self` (flags) over the config file named by `--config`, if any.
    pub fn resolve(self, command: &str) -> Result<Params, CliError> {
        let Some(path) = self.config.clone() else {
            return self.checked();
        };
        let file = read_config(&path)?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::Invalid(format!(
                    "config file is for '{c}', not '{command}'"
                )));
            }
        }
        let fermion_flags = self.z.is_some() || self.beta.is_some() || self.mu.is_some();
        let flags = self;
        let mut merged = prefer!(flags, file; config, command, family, c, eps, d, regime, m, l, tau, z, beta, mu,
            a, b, length, xi, order, nmax, rmax, steps, pmax, reps, seed, sides, suite, output, format, threads);
        // z and (β, μ) travel as one group: flags for either replace the file's group
        if fermion_flags {
            merged.z = flags.z;
            merged.beta = flags.beta;
            merged.mu = flags.mu;
        }
        merged.checked()
    }

    fn checked(self) -> Result<Params, CliError> {
        if self.z.is_some() && (self.beta.is_some() || self.mu.is_some()) {
            return Err(CliError::Invalid("give either z or (beta, mu), not both".into()));
        }
        if self.beta.is_some() != self.mu.is_some() {
            return Err(CliError::Invalid("beta and mu must be given together".into()));
        }
        if self.b.is_some() && self.length.is_some() {
            return Err(CliError::Invalid("give either b or length, not both".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Invalid("threads must be positive".into()));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.d.unwrap_or(1)
    }

    pub fn regime(&self) -> RegimeName {
        self.regime.unwrap_or(RegimeName::Thermo)
    }

    /// The kernel family and fugacity, with (β, μ) mapped to c = 4πβ, z = e^{βμ}.
    pub fn family_and_z(&self) -> Result<(KernelFamily, f64), CliError> {
        let d = self.dim();
        if let (Some(beta), Some(mu)) = (self.beta, self.mu) {
            if self.family == Some(FamilyName::InverseArgument) || self.c.is_some() {
                return Err(CliError::Invalid(
                    "beta and mu fix the Gaussian width; drop --family/--c".into(),
                ));
            }
            if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
                return Err(CliError::Invalid("need beta > 0 and finite mu".into()));
            }
            return Ok((gaussian(4.0 * PI * beta, d)?, (beta * mu).exp()));
        }
        let z = self.z.unwrap_or(1.0);
        let fam = match self.family.unwrap_or(FamilyName::Gaussian) {
            FamilyName::Gaussian => gaussian(self.c.unwrap_or(1.0), d)?,
            FamilyName::InverseArgument => {
                if d != 1 {
                    return Err(CliError::Invalid("the inverse-argument family is one-dimensional".into()));
                }
                KernelFamily::inverse_argument(self.eps.unwrap_or(1.0))?
            }
        };
        Ok((fam, z))
    }

    /// (β, μ) for the fermion gas, either given or mapped from a Gaussian (c, z).
    pub fn fermion_params(&self) -> Result<(f64, f64), CliError> {
        if let (Some(beta), Some(mu)) = (self.beta, self.mu) {
            return Ok((beta, mu));
        }
        let (fam, z) = self.family_and_z()?;
        let c = match fam {
            KernelFamily::Gaussian { c } | KernelFamily::GaussianD { c, .. } => c,
            _ => return Err(CliError::Invalid("this command needs the Gaussian family".into())),
        };
        if !(z > 0.0) {
            return Err(CliError::Invalid("z must be positive here".into()));
        }
        let beta = c / (4.0 * PI);
        Ok((beta, z.ln() / beta))
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Invalid("this command needs an explicit --seed".into()))
    }

    pub fn require_m(&self) -> Result<usize, CliError> {
        self.m.ok_or_else(|| CliError::Invalid("this command needs --m".into()))
    }

    /// Interval [a, b] from a and either b or length.
    pub fn interval(&self) -> Result<(f64, f64), CliError> {
        let a = self.a.unwrap_or(0.0);
        match (self.b, self.length) {
            (Some(b), None) => Ok((a, b)),
            (None, Some(len)) => Ok((a, a + len)),
            _ => Err(CliError::Invalid("need --b or --length".into())),
        }
    }
}

fn gaussian(c: f64, d: usize) -> Result<KernelFamily, CliError> {
    Ok(if d == 1 { KernelFamily::gaussian(c)? } else { KernelFamily::gaussian_d(c, d)? })
}

fn read_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))
}
