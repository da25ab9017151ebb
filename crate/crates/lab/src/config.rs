//! Experiment configuration, loaded from TOML or assembled from CLI flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use unitary_lab_core::eigenphase::EigenphaseConfig;
use unitary_lab_core::process_tomography::BaseConfig;
use unitary_lab_core::state_tomography::StateTomographyConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    StateTomo,
    BaseTomo,
    Bootstrap,
    Eigenphase,
    Identify,
    GadgetVerify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::StateTomo => "state-tomo",
            Experiment::BaseTomo => "base-tomo",
            Experiment::Bootstrap => "bootstrap",
            Experiment::Eigenphase => "eigenphase",
            Experiment::Identify => "identify",
            Experiment::GadgetVerify => "gadget-verify",
        }
    }
}

/// Algorithm constants; defaults are the calibrated values from the core crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub c_state: f64,
    pub c_pe: f64,
    pub c_cc: f64,
    pub eps0_ratio: f64,
    /// `T(eta) = 2 ceil(repetition_factor * ln(1/eta)) + 1`.
    pub repetition_factor: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let base = BaseConfig::default();
        let eig = EigenphaseConfig::default();
        Self {
            c_state: base.state.c_state,
            c_pe: eig.c_pe,
            c_cc: eig.c_cc,
            eps0_ratio: base.eps0_ratio,
            repetition_factor: base.repetition_factor,
        }
    }
}

impl Constants {
    pub fn state(&self) -> StateTomographyConfig {
        StateTomographyConfig { c_state: self.c_state, ..Default::default() }
    }

    pub fn base(&self) -> BaseConfig {
        BaseConfig {
            state: self.state(),
            eps0_ratio: self.eps0_ratio,
            repetition_factor: self.repetition_factor,
            ..Default::default()
        }
    }

    pub fn eigenphase(&self) -> EigenphaseConfig {
        EigenphaseConfig { c_pe: self.c_pe, c_cc: self.c_cc }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dims: Vec<usize>,
    pub eps: Vec<f64>,
    pub eta: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, dims: Vec<usize>, eps: Vec<f64>, eta: f64, trials: u64, seed: u64) -> Self {
        Self {
            experiment,
            dims,
            eps,
            eta,
            trials,
            seed,
            constants: Constants::default(),
            out: default_out(),
            workers: default_workers(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.dims.is_empty() || self.eps.is_empty() {
            bail!("dims and eps must be nonempty");
        }
        if self.trials == 0 || self.workers == 0 {
            bail!("trials and workers must be positive");
        }
        if let Some(d) = self.dims.iter().find(|&&d| d == 0) {
            bail!("dimension must be positive, got {d}");
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            bail!("eps must lie in (0, 1), got {e}");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            bail!("eta must lie in (0, 1), got {}", self.eta);
        }
        let c = &self.constants;
        if [c.c_state, c.c_pe, c.c_cc, c.eps0_ratio, c.repetition_factor].iter().any(|&x| !(x > 0.0)) {
            bail!("constants must be positive");
        }
        Ok(())
    }
}
