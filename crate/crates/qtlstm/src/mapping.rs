//! Feed-forward mapping network: turns one (basis bits, measured probability)
//! pair into one classical LSTM weight.
//!
//! Input rows are the N-bit big-endian encoding of the basis index followed
//! by the measured probability of that basis state. Raw probabilities average
//! 2^−N and would vanish numerically, so the probability entry is multiplied
//! by 2^N before it enters the network; [`MappingInput::prob`] always holds
//! the scaled value and [`PROB*`] helpers expose the factor. Hidden layers
//! use tanh, the scalar output layer is linear and unbounded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ProbabilityVector;

/// Scale factor applied to the probability entry of every mapping input.
pub fn prob_scale(n_qubits: usize) -> f64 {
    (1u64 << n_qubits) as f64
}

/// One row of the mapping-network input: N basis bits plus the scaled
/// measurement probability, a length-(N+1) vector once flattened.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingInput {
    /// Big-endian bits of the basis index, each exactly 0 or 1.
    pub bits: Vec<u8>,
    /// Measured probability of this basis state, already multiplied by 2^N.
    pub prob: f64,
}

impl MappingInput {
    /// Flattened length of the input vector.
    pub fn len(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn write_into(&self, buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend(self.bits.iter().map(|&b| f64::from(b)));
        buf.push(self.prob);
    }
}

/// Builds the first `m` mapping inputs from a measurement distribution.
/// Basis states with index ≥ m exist in the distribution but generate no
/// weight; they are simply discarded.
pub fn build_inputs(probs: &ProbabilityVector, m: usize) -> Result<Vec<MappingInput>> {
    let dim = probs.len();
    if m > dim {
        return Err(Error::Capacity {
            needed: m,
            available: dim,
        });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let scale = prob_scale(n_qubits);
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let bits = (0..n_qubits)
            .map(|q| ((i >> (n_qubits - 1 - q)) & 1) as u8)
            .collect();
        rows.push(MappingInput {
            bits,
            prob: probs[i] * scale,
        });
    }
    Ok(rows)
}

/// Activation used on hidden layers; the output layer is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation value itself.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// Total weight-plus-bias count for a stack of dense layers.
pub fn gamma_len(layer_dims: &[usize]) -> usize {
    layer_dims
        .windows(2)
        .map(|pair| (pair[0] + 1) * pair[1])
        .sum()
}

/// Default layer widths for an N-qubit model: two tanh hidden layers of
/// width 2·N feeding the scalar output, keeping the weight count polynomial
/// in N.
pub fn default_layer_dims(n_qubits: usize) -> Vec<usize> {
    let width = 2 * n_qubits;
    vec![n_qubits + 1, width, width, 1]
}

/// The mapping network M_γ with a flat weight vector. Layer l stores its
/// out×in weight matrix row-major followed by the out biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingNet {
    layer_dims: Vec<usize>,
    gamma: Vec<f64>,
    activation: Activation,
}

impl MappingNet {
    pub fn new(layer_dims: Vec<usize>, gamma: Vec<f64>, activation: Activation) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::Argument(
                "mapping net needs at least an input and an output layer".into(),
            ));
        }
        if *layer_dims.last().unwrap() != 1 {
            return Err(Error::Argument(format!(
                "mapping net must end in a scalar output, got width {}",
                layer_dims.last().unwrap()
            )));
        }
        if layer_dims.contains(&0) {
            return Err(Error::Argument("zero-width mapping layer".into()));
        }
        let expected = gamma_len(&layer_dims);
        if gamma.len() != expected {
            return Err(Error::Shape {
                what: "mapping net weights",
                expected,
                actual: gamma.len(),
            });
        }
        Ok(MappingNet {
            layer_dims,
            gamma,
            activation,
        })
    }

    /// Fresh network with weights drawn uniformly from
    /// [−1/√fan_in, +1/√fan_in] per layer.
    pub fn seeded(layer_dims: Vec<usize>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gamma = Vec::with_capacity(gamma_len(&layer_dims));
        for pair in layer_dims.windows(2) {
            let bound = 1.0 / (pair[0] as f64).sqrt();
            for _ in 0..(pair[0] + 1) * pair[1] {
                gamma.push(rng.random_range(-bound..bound));
            }
        }
        Self::new(layer_dims, gamma, Activation::Tanh)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_mut(&mut self) -> &mut [f64] {
        &mut self.gamma
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    fn check_input(&self, x: &MappingInput) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape {
                what: "mapping net input",
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates the network to a single weight value.
    pub fn forward(&self, x: &MappingInput) -> Result<f64> {
        self.check_input(x)?;
        let mut a = Vec::with_capacity(self.input_dim());
        x.write_into(&mut a);
        let mut next = Vec::new();
        let n_layers = self.layer_dims.len() - 1;
        let mut offset = 0;
        for l in 0..n_layers {
            let (n_in, n_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let weights = &self.gamma[offset..offset + n_in * n_out];
            let biases = &self.gamma[offset + n_in * n_out..offset + (n_in + 1) * n_out];
            next.clear();
            for r in 0..n_out {
                let row = &weights[r * n_in..(r + 1) * n_in];
                let z = biases[r] + row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
                next.push(if l + 1 == n_layers {
                    z
                } else {
                    self.activation.apply(z)
                });
            }
            std::mem::swap(&mut a, &mut next);
            offset += (n_in + 1) * n_out;
        }
        Ok(a[0])
    }

    /// Gradient of `upstream · forward(x)` with respect to every entry of
    /// gamma and with respect to the probability entry of the input. The bit
    /// entries are constants of the problem, so no gradient flows to them.
    pub fn backward(&self, x: &MappingInput, upstream: f64) -> Result<(Vec<f64>, f64)> {
        let mut d_gamma = vec![0.0; self.gamma.len()];
        let d_prob = self.backward_accumulate(x, upstream, &mut d_gamma)?;
        Ok((d_gamma, d_prob))
    }

    /// Like [`backward`](Self::backward) but adds the gamma gradient into a
    /// caller-owned buffer, so per-weight evaluations over all M rows can
    /// share one accumulator.
    pub fn backward_accumulate(
        &self,
        x: &MappingInput,
        upstream: f64,
        d_gamma: &mut [f64],
    ) -> Result<f64> {
        self.check_input(x)?;
        if d_gamma.len() != self.gamma.len() {
            return Err(Error::Shape {
                what: "gamma gradient buffer",
                expected: self.gamma.len(),
                actual: d_gamma.len(),
            });
        }
        let n_layers = self.layer_dims.len() - 1;

        // Forward, keeping every layer's activations.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        let mut a = Vec::with_capacity(self.input_dim());
        x.write_into(&mut a);
        activations.push(a);
        let mut offset = 0;
        for l in 0..n_layers {
            let (n_in, n_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let weights = &self.gamma[offset..offset + n_in * n_out];
            let biases = &self.gamma[offset + n_in * n_out..offset + (n_in + 1) * n_out];
            let prev = activations.last().unwrap();
            let mut out = Vec::with_capacity(n_out);
            for r in 0..n_out {
                let row = &weights[r * n_in..(r + 1) * n_in];
                let z = biases[r] + row.iter().zip(prev).map(|(w, v)| w * v).sum::<f64>();
                out.push(if l + 1 == n_layers {
                    z
                } else {
                    self.activation.apply(z)
                });
            }
            activations.push(out);
            offset += (n_in + 1) * n_out;
        }

        // Reverse pass.
        let mut delta = vec![upstream];
        for l in (0..n_layers).rev() {
            let (n_in, n_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            offset -= (n_in + 1) * n_out;
            let weights = &self.gamma[offset..offset + n_in * n_out];
            let prev = &activations[l];
            let (dw, db) = d_gamma[offset..offset + (n_in + 1) * n_out].split_at_mut(n_in * n_out);
            let mut prev_delta = vec![0.0; n_in];
            for r in 0..n_out {
                let dr = delta[r];
                db[r] += dr;
                for c in 0..n_in {
                    dw[r * n_in + c] += dr * prev[c];
                    prev_delta[c] += weights[r * n_in + c] * dr;
                }
            }
            if l > 0 {
                for (pd, act) in prev_delta.iter_mut().zip(prev) {
                    *pd *= self.activation.derivative_from_output(*act);
                }
            }
            delta = prev_delta;
        }
        // delta is now the gradient w.r.t. the input vector; only its last
        // coordinate (the probability) is a live variable.
        Ok(delta[self.input_dim() - 1])
    }
}
