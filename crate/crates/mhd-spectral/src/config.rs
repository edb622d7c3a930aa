//! JSON experiment configs and verdict records. Unknown keys are rejected at
//! every level.

use std::collections::BTreeMap;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::basis::BasisCoefficients;
use crate::error::{Error, Result};
use crate::experiments::LambdaSource;
use crate::fourier::FourierField;
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SimulateMhd,
    SimulatePerturbation,
    LinearInstability,
    LinearDecay,
    NonlinearStability,
    NonlinearInstability,
}

fn default_kappa() -> usize {
    2
}
fn default_n_max() -> usize {
    128
}
fn default_dt() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_kappa")]
    pub kappa: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub data: serde_json::Value,
    #[serde(default)]
    pub lambda_source: LambdaSource,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, used when none is given on the command line.
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa != 2 {
            return Err(Error::Config(format!("only κ = 2 experiments are supported, got {}", self.kappa)));
        }
        if self.n_max < 6 {
            return Err(Error::Config(format!("n_max must be at least 6, got {}", self.n_max)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Basis truncation `K = n_max − 2`.
    pub fn basis_size(&self) -> usize {
        self.n_max - self.kappa
    }

    /// Parses `data` into the record for this experiment.
    pub fn data_as<T: DeserializeOwned + Default>(&self) -> Result<T> {
        if self.data.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.data.clone()).map_err(|e| Error::Config(format!("data: {e}")))
    }
}

/// Model parameters either by preset name or explicitly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Preset(String),
    Explicit(ModelParams),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Preset("degregorio".into())
    }
}

impl ModelSpec {
    pub fn params(&self) -> Result<ModelParams> {
        match self {
            ModelSpec::Preset(name) => {
                ModelParams::preset(name).ok_or_else(|| Error::Config(format!("unknown model preset {name:?}")))
            }
            ModelSpec::Explicit(p) if p.is_finite() => Ok(*p),
            ModelSpec::Explicit(_) => Err(Error::Config("non-finite model parameters".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateMhdData {
    /// Defaults to the preset's own model, or De Gregorio without a preset.
    pub model: Option<ModelSpec>,
    /// `degregorio-groundstate`, `excited-state` or `clm-sine`.
    pub preset: Option<String>,
    pub omega_plus: Option<FourierField>,
    pub omega_minus: Option<FourierField>,
    /// Amplitude of a seeded random odd perturbation added to the initial data.
    #[serde(default)]
    pub noise: f64,
    pub halving_threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationData {
    pub eta_plus: Option<BasisCoefficients>,
    pub eta_minus: Option<BasisCoefficients>,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub linear_only: bool,
    /// Relative slack for envelope / decay comparisons.
    pub slack: Option<f64>,
    /// Margin C in `I₀(t) ≤ C e^{−t/2} I₀(0)`.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstabilityData {
    /// Second mode index k of `e_{2,1} + c·e_{2,k}`.
    pub mode: usize,
    /// Coefficient c; by default `c²` sits at the middle of the admissible window.
    pub coefficient: Option<f64>,
    pub eps_list: Vec<f64>,
    pub k_lip: f64,
    pub m: u32,
}

impl Default for InstabilityData {
    fn default() -> Self {
        InstabilityData { mode: 2, coefficient: None, eps_list: vec![1e-2, 1e-3, 1e-4], k_lip: 10.0, m: 4 }
    }
}

/// Seeded ensemble of random small data for `sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepData {
    /// Initial `I₀(0)` for each amplitude level.
    pub amplitudes: Vec<f64>,
    /// Seeds per amplitude, counted up from the run seed.
    pub runs: usize,
    /// Highest basis index carrying random data.
    pub band: usize,
    pub margin: f64,
}

impl Default for SweepData {
    fn default() -> Self {
        SweepData { amplitudes: vec![1e-3], runs: 4, band: 8, margin: 2.0 }
    }
}

/// `{verdict, margins, fitted_rates, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Option<bool>,
    pub margins: BTreeMap<String, f64>,
    pub fitted_rates: BTreeMap<String, f64>,
    pub params: serde_json::Value,
}

/// Run manifest written next to every trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: ExperimentKind,
    pub params: serde_json::Value,
    pub dt: f64,
    pub n_max: usize,
    pub t_end: f64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let ok = r#"{"experiment":"linear-decay","t_end":1.0}"#;
        assert!(ExperimentConfig::from_json(ok).is_ok());
        let bad = r#"{"experiment":"linear-decay","t_end":1.0,"colour":"red"}"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
        let c = ExperimentConfig::from_json(r#"{"experiment":"linear-decay","t_end":1.0,"data":{"wat":1}}"#).unwrap();
        assert!(c.data_as::<PerturbationData>().is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"simulate-mhd","t_end":2}"#).unwrap();
        assert_eq!((c.kappa, c.n_max, c.dt, c.seed), (2, 128, 1e-3, 0));
        assert_eq!(c.lambda_source, LambdaSource::Computed);
        assert!(ExperimentConfig::from_json(r#"{"experiment":"simulate-mhd","t_end":-1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"nope","t_end":1}"#).is_err());
    }

    #[test]
    fn model_spec_forms() {
        let d: SimulateMhdData = serde_json::from_str(r#"{"model":"mhd-dvz"}"#).unwrap();
        assert_eq!(d.model.unwrap().params().unwrap(), ModelParams::MHD_DVZ);
        let d: SimulateMhdData = serde_json::from_str(r#"{"model":{"a":2,"p":1,"q":1}}"#).unwrap();
        assert_eq!(d.model.unwrap().params().unwrap(), ModelParams::ARXIV);
        let d: SimulateMhdData = serde_json::from_str(r#"{"model":"bogus"}"#).unwrap();
        assert!(d.model.unwrap().params().is_err());
        assert_eq!(ModelSpec::default().params().unwrap(), ModelParams::DE_GREGORIO);
    }
}
