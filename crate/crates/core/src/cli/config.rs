//! TOML run configuration. Every section is optional; command-line flags
//! override file values, and the environment overrides only the output
//! directory and the thread count.

use crate::analytic::CorrMode;
use crate::mc::McConfig;
use crate::process::{ProcessSpec, RateSpec, TimeChange};
use crate::specfun::SeriesConfig;
use crate::subordinate::SubordinatorSpec;
use crate::validation::Suite;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const ENV_OUT_DIR: &str = "FRACSKELLAM_OUT_DIR";
pub const ENV_THREADS: &str = "FRACSKELLAM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub process: ProcessSpec,
    pub eval: SeriesConfig,
    pub mc: McSection,
    pub output: OutputFormat,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    pub simulate: SimulateSection,
    pub pmf: PmfSection,
    pub moments: MomentsSection,
    pub corr: CorrSection,
    pub validate: ValidateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            process: ProcessSpec::gsp(RateSpec::skellam(1.0, 1.0)),
            eval: SeriesConfig::default(),
            mc: McSection::default(),
            output: OutputFormat::default(),
            out_dir: PathBuf::from("out"),
            threads: None,
            simulate: SimulateSection::default(),
            pmf: PmfSection::default(),
            moments: MomentsSection::default(),
            corr: CorrSection::default(),
            validate: ValidateSection::default(),
        }
    }
}

/// Monte Carlo controls; the seed has no default so that every sampled
/// output is reproducible from its sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: Option<u64>,
}

impl Default for McSection {
    fn default() -> Self {
        McSection { n_paths: 1000, dt: McConfig::default().dt, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// Explicit observation times; when absent, `steps` equal steps up to `t_end`.
    pub times: Option<Vec<f64>>,
    pub t_end: f64,
    pub steps: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection { times: None, t_end: 1.0, steps: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmfSection {
    pub times: Vec<f64>,
}

impl Default for PmfSection {
    fn default() -> Self {
        PmfSection { times: vec![1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsSection {
    pub times: Vec<f64>,
    pub r_max: usize,
}

impl Default for MomentsSection {
    fn default() -> Self {
        MomentsSection { times: vec![0.5, 1.0, 2.0, 4.0], r_max: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrSection {
    pub s: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    /// Increment length; when set, increments are correlated instead of values.
    pub h: Option<f64>,
}

impl Default for CorrSection {
    fn default() -> Self {
        CorrSection { s: 1.0, t_start: 10.0, t_end: 1000.0, points: 25, h: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    pub suite: Suite,
    pub criteria: Vec<u8>,
    pub perturb_lambda1: f64,
}

impl CorrSection {
    pub fn mode(&self) -> CorrMode {
        match self.h {
            Some(h) => CorrMode::Increment { h },
            None => CorrMode::Process,
        }
    }
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection { suite: Suite::Quick, criteria: Vec::new(), perturb_lambda1: 0.0 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Seed-resolved Monte Carlo controls, or None when no seed was given.
    pub fn mc_config(&self) -> Option<McConfig> {
        self.mc.seed.map(|seed| McConfig { n_paths: self.mc.n_paths, dt: self.mc.dt, seed })
    }

    /// Whether tabulating this process draws random numbers somewhere.
    pub fn analytics_need_mc(&self) -> bool {
        let p = &self.process;
        match p.time_change {
            TimeChange::None => false,
            TimeChange::InverseSubordinator(s) => !matches!(s, SubordinatorSpec::Stable { .. }),
            TimeChange::Subordinator(s) => p.alpha < 1.0 && !matches!(s, SubordinatorSpec::Gamma { .. }),
        }
    }
}
