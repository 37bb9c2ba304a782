//! Experiment configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circle_map::{FamilySpec, DEFAULT_MAX_ITERATIONS};
use crate::error::{LabError, Result};
use crate::numerics::{TargetDigits, DEFAULT_PRECISION};

/// Output format of report files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// CSV tables plus the JSON report.
    Csv,
    /// JSON report only.
    Json,
}

/// Continued-fraction digits `prefix` followed by `tail` repeated forever.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    /// Leading digits.
    #[serde(default)]
    pub prefix: Vec<u64>,
    /// Repeated tail.
    #[serde(default = "golden_tail")]
    pub tail: Vec<u64>,
}

fn golden_tail() -> Vec<u64> {
    vec![1]
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec { prefix: Vec::new(), tail: golden_tail() }
    }
}

impl TargetSpec {
    /// The target as solver input.
    pub fn digits(&self) -> TargetDigits {
        TargetDigits::new(self.prefix.clone(), self.tail.clone())
    }
}

/// All experiment knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Working precision in bits.
    pub precision_bits: u32,
    /// Metric grid points per side.
    pub grid_size: usize,
    /// Deepest renormalization level.
    pub depth: usize,
    /// Extra digits the solver matches beyond `depth`.
    pub solve_margin: usize,
    /// Iteration budget of closest returns.
    pub max_iterations: u64,
    /// Self-similar refinement of solved parameters.
    pub refine: bool,
    /// Families compared by two-map experiments; the first is used alone otherwise.
    pub families: Vec<FamilySpec>,
    /// Target rotation number.
    pub target: TargetSpec,
    /// First level of level-range experiments.
    pub level_min: usize,
    /// Last level of level-range experiments (defaults to `depth`).
    pub level_max: Option<usize>,
    /// Fit window `[lo, hi]` of the convergence experiment.
    pub fit_window: Option<[usize; 2]>,
    /// Prefix placed before the large digit in Yoccoz and sync experiments.
    pub large_prefix: Vec<u64>,
    /// The large digit of the Yoccoz experiment.
    pub large_digit: u64,
    /// Prefix placed before each digit of the expansion experiment.
    pub expansion_prefix: Vec<u64>,
    /// Digits of the expansion experiment.
    pub expansion_digits: Vec<u64>,
    /// The large digit of the synchronization experiment.
    pub sync_digit: u64,
    /// Factor applied to the second family's `beta` for the refined sync run.
    pub sync_beta_scale: String,
    /// Output directory.
    pub out_dir: Option<PathBuf>,
    /// Output format.
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            precision_bits: DEFAULT_PRECISION,
            grid_size: 257,
            depth: 16,
            solve_margin: 8,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            refine: true,
            families: vec![FamilySpec::arnold(1), FamilySpec::two_harmonic("1/10")],
            target: TargetSpec::default(),
            level_min: 1,
            level_max: None,
            fit_window: None,
            large_prefix: vec![1],
            large_digit: 60,
            expansion_prefix: vec![1, 1],
            expansion_digits: vec![16, 32, 64],
            sync_digit: 40,
            sync_beta_scale: "1/2".into(),
            out_dir: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    /// Parses a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| LabError::Config(format!("invalid config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads and parses a TOML file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Basic consistency checks.
    pub fn check(&self) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(LabError::Config("precision_bits must be at least 64".into()));
        }
        if self.grid_size < 2 {
            return Err(LabError::Config("grid_size must be at least 2".into()));
        }
        if self.families.is_empty() {
            return Err(LabError::Config("at least one family is required".into()));
        }
        self.target.digits().validate()?;
        if self.large_digit < 2 || self.sync_digit < 2 {
            return Err(LabError::Config("large digits must be at least 2".into()));
        }
        if self.expansion_digits.iter().any(|&a| a < 2) {
            return Err(LabError::Config("expansion digits must be at least 2".into()));
        }
        Ok(())
    }

    /// Fails unless two families are configured.
    pub fn require_two(&self, experiment: &str) -> Result<()> {
        if self.families.len() < 2 {
            return Err(LabError::Config(format!("{experiment} needs two families")));
        }
        Ok(())
    }

    /// Last level of level-range experiments.
    pub fn level_max(&self) -> usize {
        self.level_max.unwrap_or(self.depth)
    }

    /// Hex SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }
}
