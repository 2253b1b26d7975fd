//! Composition of the three differentiable stages: circuit probabilities →
//! mapping network → flat LSTM weights. Only the circuit angles φ and the
//! mapping weights γ are ever trained; θ is regenerated from them on demand
//! and never stored as trainable state.

use crate::error::{Error, Result};
use crate::lstm::{self, FlatParams, LstmSpec, SequenceBatch};
use crate::mapping::{build_inputs, default_layer_dims, prob_scale, MappingNet};
use crate::sim::AnsatzCircuit;

/// Trainable-parameter counts of the two training routes over the same LSTM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainableCounts {
    /// |φ| + |γ|: what the generated-weight route trains.
    pub qt: usize,
    /// M: what direct training touches.
    pub classical: usize,
}

/// The full generated-weight model: circuit, mapping network and the LSTM
/// shape they must cover.
#[derive(Debug, Clone, PartialEq)]
pub struct QtModel {
    circuit: AnsatzCircuit,
    net: MappingNet,
    spec: LstmSpec,
}

impl QtModel {
    /// Assembles a model, checking that the circuit indexes enough basis
    /// states for every LSTM weight and that the mapping input width is N+1.
    pub fn new(circuit: AnsatzCircuit, net: MappingNet, spec: LstmSpec) -> Result<Self> {
        let needed = spec.required_qubits();
        if circuit.n_qubits() != needed {
            return Err(Error::Argument(format!(
                "circuit has {} qubits but {} LSTM weights need {}",
                circuit.n_qubits(),
                spec.param_count(),
                needed
            )));
        }
        if net.input_dim() != circuit.n_qubits() + 1 {
            return Err(Error::Shape {
                what: "mapping net input width",
                expected: circuit.n_qubits() + 1,
                actual: net.input_dim(),
            });
        }
        Ok(QtModel { circuit, net, spec })
    }

    /// Fresh model with default mapping widths, all parameters seeded.
    pub fn seeded(spec: LstmSpec, n_block: usize, seed: u64) -> Result<Self> {
        let n_qubits = spec.required_qubits();
        Self::with_mapping_dims(spec, n_block, default_layer_dims(n_qubits), seed)
    }

    /// Fresh seeded model with explicit mapping layer widths.
    pub fn with_mapping_dims(
        spec: LstmSpec,
        n_block: usize,
        layer_dims: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let n_qubits = spec.required_qubits();
        let circuit = AnsatzCircuit::seeded(n_qubits, n_block, seed)?;
        // Decorrelate the two parameter streams.
        let net = MappingNet::seeded(layer_dims, seed ^ 0x9e37_79b9_7f4a_7c15)?;
        Self::new(circuit, net, spec)
    }

    pub fn circuit(&self) -> &AnsatzCircuit {
        &self.circuit
    }

    pub fn circuit_mut(&mut self) -> &mut AnsatzCircuit {
        &mut self.circuit
    }

    pub fn net(&self) -> &MappingNet {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut MappingNet {
        &mut self.net
    }

    pub fn spec(&self) -> &LstmSpec {
        &self.spec
    }

    pub fn trainable_counts(&self) -> TrainableCounts {
        TrainableCounts {
            qt: self.circuit.phi().len() + self.net.gamma().len(),
            classical: self.spec.param_count(),
        }
    }

    /// Runs the circuit and maps each of the first M basis rows to one LSTM
    /// weight. Pure: the same (φ, γ) always produce the same θ.
    pub fn generate_theta(&self) -> Result<FlatParams> {
        let m = self.spec.param_count();
        let probs = self.circuit.probabilities()?;
        let rows = build_inputs(&probs, m)?;
        let mut theta = Vec::with_capacity(m);
        for row in &rows {
            theta.push(self.net.forward(row)?);
        }
        FlatParams::new(theta, &self.spec)
    }

    /// Loss on the batch plus exact gradients for φ and γ, chained through
    /// all three stages: LSTM backprop gives ∂L/∂θ, the mapping net pulls it
    /// back to γ and to each probability entry, and the circuit adjoint pass
    /// pulls the probability cotangent back to φ.
    pub fn loss_and_grads(&self, batch: &SequenceBatch) -> Result<QtGradients> {
        let m = self.spec.param_count();
        let probs = self.circuit.probabilities()?;
        let rows = build_inputs(&probs, m)?;
        let mut theta = Vec::with_capacity(m);
        for row in &rows {
            theta.push(self.net.forward(row)?);
        }
        let theta = FlatParams::new(theta, &self.spec)?;

        let (loss, d_theta) = lstm::backward(&theta, &self.spec, batch)?;

        let scale = prob_scale(self.circuit.n_qubits());
        let mut d_gamma = vec![0.0; self.net.gamma().len()];
        let mut d_probs = vec![0.0; self.circuit.dim()];
        for (i, row) in rows.iter().enumerate() {
            let d_scaled = self
                .net
                .backward_accumulate(row, d_theta[i], &mut d_gamma)?;
            // The stored input is p_i·2^N, so the raw-probability gradient
            // picks up the scale factor. Rows past M generate no weight and
            // carry no gradient.
            d_probs[i] = d_scaled * scale;
        }
        let d_phi = self.circuit.backprop_probabilities(&d_probs)?;

        Ok(QtGradients {
            loss,
            d_phi,
            d_gamma,
        })
    }
}

/// Result of one differentiable pass over a batch.
#[derive(Debug, Clone)]
pub struct QtGradients {
    pub loss: f64,
    pub d_phi: Vec<f64>,
    pub d_gamma: Vec<f64>,
}
