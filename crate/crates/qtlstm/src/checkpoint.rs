//! Versioned model checkpoints.
//!
//! A checkpoint is a JSON document holding everything needed to rebuild the
//! trained forecaster and rerun the data pipeline: the LSTM shape, either
//! the circuit/mapping parameters (generated-weight mode) or the raw θ
//! (classical mode), the fitted normalization statistics, the data recipe
//! and the validation loss recorded at save time. JSON float round-tripping
//! is exact, so reloading reproduces the saved parameters bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{DataRecipe, NormStats};
use crate::error::{Error, Result};
use crate::lstm::{FlatParams, LstmSpec};
use crate::mapping::{Activation, MappingNet};
use crate::model::QtModel;
use crate::sim::AnsatzCircuit;
use crate::train::TrainMode;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Circuit and mapping-network parameters of a generated-weight model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QtParams {
    pub n_qubits: usize,
    pub n_block: usize,
    pub phi: Vec<f64>,
    pub layer_dims: Vec<usize>,
    pub gamma: Vec<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub mode: TrainMode,
    pub seed: u64,
    pub lstm: LstmSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qt: Option<QtParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    pub normalization: NormStats,
    pub data: DataRecipe,
    /// Validation MSE (normalized units) at save time; reloading and
    /// regenerating θ must reproduce it to 1e-9.
    pub val_loss: f64,
}

impl Checkpoint {
    pub fn from_qt(
        model: &QtModel,
        normalization: NormStats,
        data: DataRecipe,
        seed: u64,
        val_loss: f64,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            mode: TrainMode::Qt,
            seed,
            lstm: *model.spec(),
            qt: Some(QtParams {
                n_qubits: model.circuit().n_qubits(),
                n_block: model.circuit().n_block(),
                phi: model.circuit().phi().to_vec(),
                layer_dims: model.net().layer_dims().to_vec(),
                gamma: model.net().gamma().to_vec(),
                activation: model.net().activation(),
            }),
            theta: None,
            normalization,
            data,
            val_loss,
        }
    }

    pub fn from_classical(
        spec: LstmSpec,
        theta: &FlatParams,
        normalization: NormStats,
        data: DataRecipe,
        seed: u64,
        val_loss: f64,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            mode: TrainMode::Classical,
            seed,
            lstm: spec,
            qt: None,
            theta: Some(theta.as_slice().to_vec()),
            normalization,
            data,
            val_loss,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Checkpoint(format!("serialization failed: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&raw)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {}, this build reads {CHECKPOINT_VERSION}",
                ckpt.version
            )));
        }
        match ckpt.mode {
            TrainMode::Qt if ckpt.qt.is_none() => {
                return Err(Error::Checkpoint(
                    "qt checkpoint is missing circuit/mapping parameters".into(),
                ))
            }
            TrainMode::Classical if ckpt.theta.is_none() => {
                return Err(Error::Checkpoint(
                    "classical checkpoint is missing theta".into(),
                ))
            }
            _ => {}
        }
        Ok(ckpt)
    }

    /// Rebuilds the generated-weight model, when this checkpoint holds one.
    pub fn qt_model(&self) -> Result<Option<QtModel>> {
        let Some(params) = &self.qt else {
            return Ok(None);
        };
        let circuit = AnsatzCircuit::new(params.n_qubits, params.n_block, params.phi.clone())?;
        let net = MappingNet::new(
            params.layer_dims.clone(),
            params.gamma.clone(),
            params.activation,
        )?;
        Ok(Some(QtModel::new(circuit, net, self.lstm)?))
    }

    /// The flat LSTM weights this checkpoint encodes: regenerated from
    /// (φ, γ) in qt mode, read back directly in classical mode.
    pub fn rebuild_theta(&self) -> Result<FlatParams> {
        match self.mode {
            TrainMode::Qt => {
                let model = self.qt_model()?.ok_or_else(|| {
                    Error::Checkpoint("qt checkpoint is missing circuit/mapping parameters".into())
                })?;
                model.generate_theta()
            }
            TrainMode::Classical => {
                let theta = self.theta.clone().ok_or_else(|| {
                    Error::Checkpoint("classical checkpoint is missing theta".into())
                })?;
                FlatParams::new(theta, &self.lstm)
            }
        }
    }
}
