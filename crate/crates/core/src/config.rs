//! Experiment configuration for the `zeno` binary.
//!
//! A config is either read from JSON or assembled from command-line flags on
//! top of [`ExperimentConfig::default`]. Every numeric field is validated
//! before anything runs, and the resolved config is embedded in each output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::fit::geometric_grid;
use crate::noise::NoiseModel;
use crate::protocol::{EnvPolicy, Observable};
use crate::statevec::{RegisterLayout, StateVector};

/// Largest system size the experiments accept.
pub const MAX_EXPERIMENT_QUBITS: usize = 4;
/// Largest system size of the two-time protocol.
pub const MAX_TWO_TIME_QUBITS: usize = 2;
pub const MAX_CYCLES: usize = 100_000;
pub const DEFAULT_POINTS: usize = 8;

/// Added to the experiment seed when drawing a random `|ψ⟩`, so the state and
/// the noise couplings come from different streams.
pub const PSI_SEED_OFFSET: u64 = 0x9e37_79b9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    #[default]
    Sweep,
    Zeno,
    Twotime,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Zeno => "zeno",
            Command::Twotime => "twotime",
        }
    }
}

/// Where the environment couplings come from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSource {
    /// `NoiseModel::random(n, seed)`.
    #[default]
    Random,
    /// A JSON noise model written by `NoiseModel::to_json`.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PsiKind {
    /// Computational basis state with the given index.
    Basis { index: usize },
    /// Haar-random state drawn from `seed + PSI_SEED_OFFSET`.
    #[default]
    Random,
}

impl std::str::FromStr for PsiKind {
    type Err = String;

    /// `random`, `basis` (index 0) or `basis:<index>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "random" => Ok(PsiKind::Random),
            None if s == "basis" => Ok(PsiKind::Basis { index: 0 }),
            Some(("basis", idx)) => idx
                .trim()
                .parse()
                .map(|index| PsiKind::Basis { index })
                .map_err(|_| format!("bad basis index '{idx}'")),
            _ => Err(format!(
                "unknown state '{s}' (expected random, basis or basis:<index>)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: usize,
    /// Noise strengths for `sweep` and `twotime`.
    pub epsilons: Vec<f64>,
    /// Total strength split over `k` cycles in `zeno`.
    pub total_epsilon: f64,
    /// Cycle counts for `zeno`.
    pub ks: Vec<usize>,
    pub seed: u64,
    pub noise: NoiseSource,
    pub env_policy: EnvPolicy,
    pub psi: PsiKind,
    /// Column fitted by `sweep`.
    pub observable: Observable,
    pub format: OutputFormat,
    /// Not part of the recorded config.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Sweep,
            n: 1,
            epsilons: geometric_grid(1e-3, 3e-2, DEFAULT_POINTS),
            total_epsilon: 0.05,
            ks: vec![1, 2, 4, 8, 16],
            seed: 7,
            noise: NoiseSource::Random,
            env_policy: EnvPolicy::Reset,
            psi: PsiKind::Random,
            observable: Observable::Failure,
            format: OutputFormat::Csv,
            output: None,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ZenoError {
    ZenoError::InvalidConfig {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses `lo..hi` into a geometric grid of `points` values, or a comma list.
pub fn parse_epsilons(text: &str, points: usize) -> Result<Vec<f64>> {
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid("epsilons", format!("'{}' is not a number", s.trim())))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (number(lo)?, number(hi)?);
        if points < 2 {
            return Err(invalid("points", "a range needs at least 2 points"));
        }
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid(
                "epsilons",
                format!("range {lo}..{hi} must satisfy 0 < lo < hi"),
            ));
        }
        return Ok(geometric_grid(lo, hi, points));
    }
    text.split(',').map(number).collect()
}

pub fn parse_cycle_counts(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| invalid("ks", format!("'{}' is not a cycle count", s.trim())))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ZenoError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Compact JSON of the resolved config, as embedded in outputs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.command == Command::Verify {
            return Ok(());
        }
        let max_n = if self.command == Command::Twotime {
            MAX_TWO_TIME_QUBITS
        } else {
            MAX_EXPERIMENT_QUBITS
        };
        if !(1..=max_n).contains(&self.n) {
            return Err(invalid(
                "n",
                format!(
                    "{} is outside 1..={max_n} for {}",
                    self.n,
                    self.command.name()
                ),
            ));
        }
        if let PsiKind::Basis { index } = self.psi {
            if index >= 1 << self.n {
                return Err(invalid(
                    "psi",
                    format!("basis index {index} needs more than {} qubits", self.n),
                ));
            }
        }
        match self.command {
            Command::Sweep | Command::Twotime => self.validate_epsilons(),
            Command::Zeno => self.validate_cycles(),
            Command::Verify => Ok(()),
        }
    }

    fn validate_epsilons(&self) -> Result<()> {
        let eps = &self.epsilons;
        if eps.len() < 4 {
            return Err(invalid(
                "epsilons",
                format!("need at least 4 points, got {}", eps.len()),
            ));
        }
        if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(invalid("epsilons", format!("{bad} is outside (0, 1]")));
        }
        let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eps.iter().cloned().fold(0.0, f64::max);
        if hi / lo < 10.0 * (1.0 - 1e-12) {
            return Err(invalid(
                "epsilons",
                format!("{lo:e}..{hi:e} spans less than one decade"),
            ));
        }
        Ok(())
    }

    fn validate_cycles(&self) -> Result<()> {
        if !(self.total_epsilon >= 0.0 && self.total_epsilon <= 1.0) {
            return Err(invalid(
                "total_epsilon",
                format!("{} is outside [0, 1]", self.total_epsilon),
            ));
        }
        if self.ks.is_empty() {
            return Err(invalid("ks", "no cycle counts given"));
        }
        if let Some(bad) = self.ks.iter().find(|&&k| !(1..=MAX_CYCLES).contains(&k)) {
            return Err(invalid("ks", format!("{bad} is outside 1..={MAX_CYCLES}")));
        }
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        match &self.noise {
            NoiseSource::Random => NoiseModel::random(self.n, self.seed),
            NoiseSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ZenoError::Io(format!("{}: {e}", path.display())))?;
                let model =
                    NoiseModel::from_json(&text).map_err(|e| invalid("noise", e.to_string()))?;
                if model.n() != self.n {
                    return Err(invalid(
                        "noise",
                        format!("model has n = {}, config has n = {}", model.n(), self.n),
                    ));
                }
                Ok(model)
            }
        }
    }

    pub fn psi_state(&self) -> Result<StateVector> {
        let layout = RegisterLayout::plain(self.n);
        match self.psi {
            PsiKind::Basis { index } => StateVector::basis(layout, index),
            PsiKind::Random => Ok(StateVector::random_seeded(
                layout,
                self.seed.wrapping_add(PSI_SEED_OFFSET),
            )),
        }
    }
}
