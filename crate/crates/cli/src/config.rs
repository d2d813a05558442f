use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use epr_grover::grover::{haar_unitary, Family, PresetId, SearchSpec};
use epr_grover::nmr::{DelayMode, Pulse, PulseSequence, SequenceElement, Simulator, SpinSystem};
use epr_grover::{Operator, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// One run, read from a JSON document.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemConfig,
    pub job: Option<Job>,
    pub outputs: Option<PathBuf>,
    pub delay_mode: Option<DelayMode>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub linewidth_hz: Option<f64>,
    pub sweep: Option<SweepRange>,
}

/// Overrides of the chloroform defaults.
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
    pub j_coupling: Option<f64>,
    pub gamma_ratio: Option<f64>,
}

impl SystemConfig {
    pub fn build(&self) -> Result<SpinSystem> {
        let d = SpinSystem::chloroform();
        Ok(SpinSystem::new(
            self.nu1.unwrap_or(d.nu1),
            self.nu2.unwrap_or(d.nu2),
            self.j_coupling.unwrap_or(d.j_coupling),
            self.gamma_ratio.unwrap_or(d.gamma_ratio),
        )?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Job {
    Preset(PresetJob),
    Custom(CustomJob),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetJob {
    pub j: u8,
    #[serde(default)]
    pub source_index: usize,
    #[serde(default = "default_family")]
    pub family: Family,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_family() -> Family {
    Family::Y
}

fn default_n() -> usize {
    1
}

impl PresetJob {
    pub fn id(&self) -> Result<PresetId> {
        Ok(PresetId::new(self.j, self.source_index, self.family)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomJob {
    pub dim: usize,
    pub source: usize,
    pub marked: Vec<usize>,
    pub unitary: UnitarySource,
    /// Iterations to synthesize; defaults to round(π/4u).
    pub n: Option<usize>,
    /// Upper end of the best-iteration search.
    pub n_max: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitarySource {
    /// Row-major `[re, im]` pairs.
    Matrix(Vec<Vec<[f64; 2]>>),
    Random {
        seed: Option<u64>,
    },
    /// Two-spin pulses in time order.
    Pulses(Vec<Pulse>),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub from: usize,
    pub to: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn job(&self) -> Result<&Job> {
        match &self.job {
            Some(job) => Ok(job),
            None => bail!("config has no job (expected \"preset\" or \"custom\")"),
        }
    }
}

impl CustomJob {
    /// Random seeds resolve as `seed_flag`, then the job's own seed, then `config_seed`, then 0.
    pub fn unitary(
        &self,
        system: &SpinSystem,
        seed_flag: Option<u64>,
        config_seed: Option<u64>,
    ) -> Result<Operator> {
        match &self.unitary {
            UnitarySource::Matrix(rows) => {
                let rows: Vec<Vec<C64>> = rows
                    .iter()
                    .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .collect();
                let op = Operator::from_rows(&rows)?;
                if op.dim() != self.dim {
                    bail!(
                        "unitary is {}x{}, expected dim {}",
                        op.dim(),
                        op.dim(),
                        self.dim
                    );
                }
                let err = op.unitarity_error();
                if err > 1e-9 {
                    bail!("custom matrix is not unitary (max deviation {err:e})");
                }
                Ok(op)
            }
            UnitarySource::Random { seed } => {
                let seed = seed_flag.or(*seed).or(config_seed).unwrap_or(0);
                Ok(haar_unitary(
                    self.dim,
                    &mut ChaCha8Rng::seed_from_u64(seed),
                )?)
            }
            UnitarySource::Pulses(pulses) => {
                if self.dim != 4 {
                    bail!("pulse-product unitaries need dim 4, got {}", self.dim);
                }
                let seq = PulseSequence::new(
                    pulses.iter().cloned().map(SequenceElement::Pulse).collect(),
                );
                seq.validate()?;
                Ok(Simulator::new(*system, DelayMode::Coupled).propagator(&seq)?)
            }
        }
    }

    pub fn spec(&self, unitary: Operator) -> Result<SearchSpec> {
        Ok(SearchSpec::new(
            self.dim,
            self.source,
            self.marked.iter().copied(),
            unitary,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"job": {"preset": {"j": 3}}}"#).unwrap();
        match cfg.job().unwrap() {
            Job::Preset(p) => {
                assert_eq!((p.j, p.source_index, p.family, p.n), (3, 0, Family::Y, 1));
            }
            Job::Custom(_) => panic!("expected preset"),
        }
        assert_eq!(cfg.system.build().unwrap(), SpinSystem::chloroform());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"jobs": {}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"system": {"J": 1}}"#).is_err());
    }

    #[test]
    fn system_overrides() {
        let cfg: RunConfig = serde_json::from_str(r#"{"system": {"j_coupling": 140}}"#).unwrap();
        let sys = cfg.system.build().unwrap();
        assert_eq!(sys.j_coupling, 140.0);
        assert_eq!(sys.nu1, SpinSystem::chloroform().nu1);
        let bad: RunConfig = serde_json::from_str(r#"{"system": {"j_coupling": -1}}"#).unwrap();
        assert!(bad.system.build().is_err());
    }

    #[test]
    fn custom_matrix_must_be_unitary() {
        let job: CustomJob = serde_json::from_str(
            r#"{"dim": 2, "source": 0, "marked": [1],
                "unitary": {"matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}}"#,
        )
        .unwrap();
        assert!(job.unitary(&SpinSystem::chloroform(), None, None).is_err());
    }

    #[test]
    fn random_seed_precedence() {
        let job: CustomJob = serde_json::from_str(
            r#"{"dim": 4, "source": 0, "marked": [2], "unitary": {"random": {"seed": 7}}}"#,
        )
        .unwrap();
        let sys = SpinSystem::chloroform();
        let from_config = job.unitary(&sys, None, None).unwrap();
        let same = haar_unitary(4, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(from_config, same);
        let overridden = job.unitary(&sys, Some(8), None).unwrap();
        assert_ne!(overridden, same);
    }
}
