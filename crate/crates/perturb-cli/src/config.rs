//! Command-line and config-file handling for the `perturb` binary.
//!
//! Precedence is: suite defaults, then `--config` file entries, then explicit
//! flags.  The config file is flat `key = value` text using the same keys as
//! the long flags (the suite itself is always the positional argument).

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Singular values of `f(A) − f(B)` against the perturbation norm.
    FirstDiff,
    /// Higher-order differences `Δ_K^m f(A)` (order two or three).
    HigherDiff,
    /// First difference for a pair of unitaries.
    UnitaryDiff,
    /// Alternating binomial differences along a segment of contractions.
    Contraction,
    /// `f(A)Q − Q f(B)` against `AQ − QB` for a bounded factor `Q`.
    Quasicommutator,
    /// Lacunary symbol whose singular values decay no faster than allowed.
    Counterexample,
    /// Spectral-shift densities and the second-order trace formula.
    Ssf,
    /// Cesàro averaging bounds on singular-value sequences.
    Boyd,
    /// Exact direct-sum scaling between the input and output ideals.
    OmegaScaling,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::FirstDiff => "first_diff",
            Suite::HigherDiff => "higher_diff",
            Suite::UnitaryDiff => "unitary_diff",
            Suite::Contraction => "contraction",
            Suite::Quasicommutator => "quasicommutator",
            Suite::Counterexample => "counterexample",
            Suite::Ssf => "ssf",
            Suite::Boyd => "boyd",
            Suite::OmegaScaling => "omega_scaling",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Gap-series symbols `Σ_k 2^{−αk} ζ^{2^k}` with random phases.
    Lacunary,
    /// Random coefficients shaped band by band, the critical-decay profile.
    Banded,
    /// A fixed `|sin θ|^α`-type symbol, truncated and de-biased.
    Classic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Lacunary => "lacunary",
            Family::Banded => "banded",
            Family::Classic => "classic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Raw command line as parsed by clap; `None` means "not given".
#[derive(Debug, Parser)]
#[command(
    name = "perturb",
    about = "Finite-dimensional sweeps for operator-function perturbation bounds",
    long_about = None
)]
pub struct CliArgs {
    /// Experiment suite to run
    #[arg(value_enum)]
    pub suite: Suite,
    /// Smoothness exponent of the symbol class
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Ideal exponent p
    #[arg(long)]
    pub p: Option<f64>,
    /// Difference order (where the suite uses one)
    #[arg(long)]
    pub m: Option<u32>,
    /// Operator dimension (section size for the counterexample suite)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of random trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed; trial t draws from seed ⊕ t
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use unitary operators where the suite supports both kinds
    #[arg(long)]
    pub unitary: bool,
    /// Random symbol family
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Write the full report to this path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value config file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cap the worker pool (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub suite: Suite,
    pub alpha: f64,
    pub p: f64,
    pub m: u32,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub unitary: bool,
    pub family: Family,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

/// Subset of the configuration echoed into report summaries.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub suite: Suite,
    pub alpha: f64,
    pub p: f64,
    pub m: u32,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub unitary: bool,
    pub family: Family,
}

fn default_m(suite: Suite) -> u32 {
    match suite {
        Suite::HigherDiff => 2,
        _ => 1,
    }
}

fn default_dim(suite: Suite) -> usize {
    match suite {
        Suite::Counterexample => 256,
        Suite::OmegaScaling => 6,
        Suite::Ssf => 12,
        _ => 16,
    }
}

fn default_trials(suite: Suite) -> u64 {
    match suite {
        Suite::Counterexample | Suite::Boyd => 1,
        Suite::OmegaScaling => 20,
        Suite::Ssf => 25,
        _ => 100,
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_field<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| usage(format!("config key `{key}`: cannot parse value `{value}`")))
}

impl Config {
    /// Merges defaults, the optional config file, and explicit flags, then
    /// validates the result.
    pub fn resolve(args: CliArgs) -> Result<Self, CliError> {
        let suite = args.suite;
        let mut cfg = Config {
            suite,
            alpha: 0.5,
            p: 2.0,
            m: default_m(suite),
            dim: default_dim(suite),
            trials: default_trials(suite),
            seed: 31415,
            unitary: suite == Suite::UnitaryDiff,
            family: Family::Banded,
            out: None,
            format: Format::Csv,
            threads: None,
        };
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply_flags(&args);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "alpha" => self.alpha = parse_field(key, value)?,
                "p" => self.p = parse_field(key, value)?,
                "m" => self.m = parse_field(key, value)?,
                "dim" => self.dim = parse_field(key, value)?,
                "trials" => self.trials = parse_field(key, value)?,
                "seed" => self.seed = parse_field(key, value)?,
                "unitary" => self.unitary = parse_field(key, value)?,
                "threads" => self.threads = Some(parse_field(key, value)?),
                "out" => self.out = Some(PathBuf::from(value)),
                "family" => {
                    self.family = Family::from_str(value, true)
                        .map_err(|_| usage(format!("config key `family`: unknown family `{value}`")))?
                }
                "format" => {
                    self.format = Format::from_str(value, true)
                        .map_err(|_| usage(format!("config key `format`: unknown format `{value}`")))?
                }
                other => return Err(usage(format!("config key `{other}` is not recognized"))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, args: &CliArgs) {
        if let Some(v) = args.alpha {
            self.alpha = v;
        }
        if let Some(v) = args.p {
            self.p = v;
        }
        if let Some(v) = args.m {
            self.m = v;
        }
        if let Some(v) = args.dim {
            self.dim = v;
        }
        if let Some(v) = args.trials {
            self.trials = v;
        }
        if let Some(v) = args.seed {
            self.seed = v;
        }
        if args.unitary {
            self.unitary = true;
        }
        if let Some(v) = args.family {
            self.family = v;
        }
        if let Some(v) = &args.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = args.format {
            self.format = v;
        }
        if let Some(v) = args.threads {
            self.threads = Some(v);
        }
        if self.suite == Suite::UnitaryDiff {
            self.unitary = true;
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(usage("alpha: must be a finite positive number"));
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(usage("p: must be a finite positive number"));
        }
        if self.dim < 2 {
            return Err(usage("dim: must be at least 2"));
        }
        if self.trials == 0 {
            return Err(usage("trials: must be at least 1"));
        }
        if self.m == 0 || self.m > 3 {
            return Err(usage("m: supported difference orders are 1, 2, 3"));
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(usage("threads: must be at least 1"));
            }
        }
        match self.suite {
            Suite::FirstDiff | Suite::UnitaryDiff => {
                if self.alpha >= 1.0 {
                    return Err(usage(
                        "alpha: first-difference bounds need 0 < alpha < 1 (try higher_diff)",
                    ));
                }
            }
            Suite::Quasicommutator => {
                if self.alpha >= 1.0 {
                    return Err(usage("alpha: the quasicommutator bound needs 0 < alpha < 1"));
                }
            }
            Suite::HigherDiff => {
                if self.m < 2 {
                    return Err(usage("m: higher_diff needs m = 2 or 3 (use first_diff for m = 1)"));
                }
                if self.unitary && self.m != 2 {
                    return Err(usage("m: the unitary higher-difference path supports m = 2 only"));
                }
                let m = self.m as f64;
                if !(m - 1.0 <= self.alpha && self.alpha < m) {
                    return Err(usage(format!(
                        "alpha: order {} differences need {} <= alpha < {}",
                        self.m,
                        self.m - 1,
                        self.m
                    )));
                }
                if self.p <= m {
                    return Err(usage(format!("p: higher_diff needs p > m = {}", self.m)));
                }
            }
            Suite::Contraction => {
                let m = self.m as f64;
                if !(m - 1.0 <= self.alpha && self.alpha < m) {
                    return Err(usage(format!(
                        "alpha: order {} differences need {} <= alpha < {}",
                        self.m,
                        self.m - 1,
                        self.m
                    )));
                }
                if self.p <= m {
                    return Err(usage(format!("p: contraction needs p > m = {}", self.m)));
                }
            }
            Suite::Counterexample => {
                if self.dim < 16 || self.dim > 4096 {
                    return Err(usage("dim: counterexample section size must lie in 16..=4096"));
                }
                if self.alpha > 2.0 {
                    return Err(usage("alpha: counterexample decay exponent must lie in (0, 2]"));
                }
            }
            Suite::OmegaScaling => {
                if self.dim > 32 {
                    return Err(usage("dim: omega_scaling folds operators 8-fold; keep dim <= 32"));
                }
                if self.alpha >= self.p {
                    return Err(usage("alpha: omega_scaling needs alpha < p so q = p/alpha > 1"));
                }
            }
            Suite::Ssf => {
                if self.dim > 64 {
                    return Err(usage("dim: ssf grids are dense; keep dim <= 64"));
                }
            }
            Suite::Boyd => {
                if self.p < 1.0 {
                    return Err(usage("p: averaging bounds are stated for p >= 1"));
                }
            }
        }
        if self.unitary {
            match self.suite {
                Suite::FirstDiff | Suite::HigherDiff | Suite::UnitaryDiff | Suite::Quasicommutator => {}
                _ => {
                    return Err(usage(format!(
                        "unitary: not applicable to the {} suite",
                        self.suite
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            suite: self.suite,
            alpha: self.alpha,
            p: self.p,
            m: self.m,
            dim: self.dim,
            trials: self.trials,
            seed: self.seed,
            unitary: self.unitary,
            family: self.family,
        }
    }

    /// Trig-polynomial degree used for random symbols at this dimension.
    pub fn symbol_degree(&self) -> usize {
        self.dim.clamp(8, 32)
    }
}
