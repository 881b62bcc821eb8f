//! Experiment configuration files and the tomography run they describe.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::droplet::DropletFunction;
use crate::error::{Error, Result};
use crate::lisa::{labels_for, reconstruct, DropletLabel};
use crate::nmr::{preparation_for, run_sequence, thermal_state, PulseSequence, SpinSystemParams};
use crate::spin::{Operator, C64};
use crate::states::named_state;
use crate::tomo::{
    rms_error, scan, scan_averaged, Backend, NoiseModel, RmsReport, SampleSet, SamplingPath,
    ScanOptions, TomographyGrid,
};

/// Spin system given inline or as a path to a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSource {
    File(PathBuf),
    Inline(SpinSystemParams),
}

/// Operator to be sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    /// `DQx`, `TQy`, `I+I+`, or a dense Cartesian string like `zx`.
    Named(String),
    /// Product operator prepared from thermal equilibrium by its built-in sequence.
    Prepared(String),
    /// Arbitrary sequence text applied to the thermal state.
    Sequence(String),
    /// Droplet coefficient JSON file.
    Coefficients(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub beta_step_deg: f64,
    pub alpha_step_deg: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            beta_step_deg: 15.0,
            alpha_step_deg: 15.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub flip_error: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemSource,
    pub target: TargetSpec,
    #[serde(default)]
    pub path: SamplingPath,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Droplets to sample; all non-empty labels when absent.
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Result of a configured tomography run.
#[derive(Clone, Debug)]
pub struct TomographyRun {
    pub samples: SampleSet,
    pub reference: SampleSet,
    pub report: RmsReport,
}

impl ExperimentConfig {
    pub fn new(system: SystemSource, target: TargetSpec) -> Self {
        Self {
            system,
            target,
            path: SamplingPath::default(),
            backend: Backend::default(),
            grid: GridSpec::default(),
            noise: NoiseSpec::default(),
            labels: None,
            out: default_out(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut c: Self = serde_json::from_str(text)?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&std::fs::read_to_string(path)?, &base)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tomography_grid()?;
        let n = &self.noise;
        if (n.sigma != 0.0 || n.flip_error != 0.0) && n.seed.is_none() {
            return Err(Error::InvalidArgument(
                "a seed is required when sigma > 0 or the flip error is nonzero".into(),
            ));
        }
        self.scan_options().validate()
    }

    pub fn tomography_grid(&self) -> Result<TomographyGrid> {
        TomographyGrid::from_steps(self.grid.beta_step_deg, self.grid.alpha_step_deg)
    }

    pub fn system_params(&self) -> Result<SpinSystemParams> {
        match &self.system {
            SystemSource::Inline(p) => {
                p.validate()?;
                Ok(p.clone())
            }
            SystemSource::File(path) => SpinSystemParams::read_json(&self.resolve(path)),
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            path: self.path,
            backend: self.backend,
            noise: NoiseModel {
                sigma: self.noise.sigma,
                flip_error: self.noise.flip_error,
                seed: self.noise.seed.unwrap_or(0),
            },
        }
    }

    pub fn droplet_labels(&self, n: usize) -> Result<Vec<DropletLabel>> {
        match &self.labels {
            Some(list) => list.iter().map(|s| s.parse()).collect(),
            None => Ok(labels_for(n)?
                .into_iter()
                .filter(|l| *l != DropletLabel::Empty)
                .collect()),
        }
    }

    /// The target as weighted Hermitian parts `Σ_i c_i ρ_i`.
    pub fn target_parts(&self, params: &SpinSystemParams) -> Result<Vec<(C64, Operator)>> {
        let one = C64::new(1.0, 0.0);
        let parts = match &self.target {
            TargetSpec::Named(name) => named_state(name)?.hermitian_parts()?,
            TargetSpec::Prepared(target) => {
                let prep = preparation_for(params, target)?;
                vec![(
                    one,
                    run_sequence(&thermal_state(params)?, &prep.sequence, params)?,
                )]
            }
            TargetSpec::Sequence(text) => {
                let seq = PulseSequence::parse(text, params)?;
                vec![(one, run_sequence(&thermal_state(params)?, &seq, params)?)]
            }
            TargetSpec::Coefficients(path) => {
                let d = DropletFunction::read_json(&self.resolve(path))?;
                hermitian_split(&reconstruct(&d)?)
            }
        };
        if let Some((_, op)) = parts.iter().find(|(_, op)| op.n_spins() != params.n) {
            return Err(Error::InvalidArgument(format!(
                "target acts on {} spins but the system has {}",
                op.n_spins(),
                params.n
            )));
        }
        Ok(parts)
    }

    pub fn run(&self) -> Result<TomographyRun> {
        self.validate()?;
        let params = self.system_params()?;
        let grid = self.tomography_grid()?;
        let labels = self.droplet_labels(params.n)?;
        let parts = self.target_parts(&params)?;
        let opts = self.scan_options();
        let samples = if parts.len() == 1 && parts[0].0 == C64::new(1.0, 0.0) {
            scan(&parts[0].1, &labels, &grid, &opts)?
        } else {
            scan_averaged(&parts, &labels, &grid, &opts)?
        };
        let mut total = Operator::zeros(params.n);
        for (c, op) in &parts {
            total += &(op * *c);
        }
        let reference = scan(&total, &labels, &grid, &ScanOptions::analytic())?;
        let report = rms_error(&samples, &reference)?;
        Ok(TomographyRun {
            samples,
            reference,
            report,
        })
    }
}

/// `A = H_1 + i H_2` with Hermitian `H_1`, `H_2`; a Hermitian `A` stays whole.
pub fn hermitian_split(a: &Operator) -> Vec<(C64, Operator)> {
    let one = C64::new(1.0, 0.0);
    if a.is_hermitian(1e-12) {
        return vec![(one, a.clone())];
    }
    let adj = a.adjoint();
    let h1 = (a + &adj) * 0.5;
    let h2 = (a - &adj) * C64::new(0.0, -0.5);
    vec![(one, h1), (C64::new(0.0, 1.0), h2)]
}
