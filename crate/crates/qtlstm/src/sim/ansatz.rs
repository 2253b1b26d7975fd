//! Hardware-efficient ansatz: per-block one U3 rotation on every qubit
//! followed by a ring of CU3 entanglers (qubit k controls qubit (k+1) mod N),
//! the whole block repeated `n_block` times. Single-qubit circuits skip the
//! ring, so a block holds 6·N angles for N ≥ 2 and 3 for N = 1.
//!
//! Besides the forward pass the module computes exact derivatives of every
//! measurement probability with respect to every angle by reverse-mode
//! (adjoint) differentiation through the statevector: the final state is
//! rewound gate by gate with daggered matrices while a cotangent vector is
//! pulled back alongside it. Cost is O(|φ|·2^N) and the result is exact up
//! to floating-point rounding, with no sampling involved.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::state::{u3_matrix_dagger, u3_matrix_derivatives, Matrix2, StateVector};

/// Measurement distribution over the 2^N basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Wraps a raw distribution, checking every entry lies in [0, 1] and the
    /// total is 1 within 1e-10.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (i, p) in probs.iter().enumerate() {
            if !(-1e-12..=1.0 + 1e-12).contains(p) {
                return Err(Error::Data(format!(
                    "probability {p} at basis index {i} is outside [0, 1]"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Data(format!(
                "probabilities sum to {total}, expected 1 within 1e-10"
            )));
        }
        Ok(ProbabilityVector { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// One gate of the ansatz, referencing its (μ, φ, λ) triple inside the flat
/// angle vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateRef {
    pub kind: GateKind,
    pub phi_offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    U3 { qubit: usize },
    Cu3 { control: usize, target: usize },
}

/// The parameterized circuit: qubit count, block count and the flat angle
/// vector driving every rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    n_block: usize,
    phi: Vec<f64>,
}

/// Number of angles in one block of the ansatz.
pub fn angles_per_block(n_qubits: usize) -> usize {
    if n_qubits == 1 {
        3
    } else {
        6 * n_qubits
    }
}

/// Total angle count for a circuit of the given shape.
pub fn angle_count(n_qubits: usize, n_block: usize) -> usize {
    angles_per_block(n_qubits) * n_block
}

impl AnsatzCircuit {
    /// Builds a circuit from an explicit angle vector.
    pub fn new(n_qubits: usize, n_block: usize, phi: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Argument("circuit needs at least one qubit".into()));
        }
        if n_block == 0 {
            return Err(Error::Argument("n_block must be at least 1".into()));
        }
        let expected = angle_count(n_qubits, n_block);
        if phi.len() != expected {
            return Err(Error::Shape {
                what: "ansatz angle vector",
                expected,
                actual: phi.len(),
            });
        }
        if let Some(bad) = phi.iter().find(|a| !a.is_finite()) {
            return Err(Error::Argument(format!("non-finite angle {bad} in phi")));
        }
        Ok(AnsatzCircuit {
            n_qubits,
            n_block,
            phi,
        })
    }

    /// Builds a circuit with angles drawn uniformly from [−π, π]. Full-range
    /// initialization keeps the start away from the stationary all-zeros
    /// point.
    pub fn seeded(n_qubits: usize, n_block: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = (0..angle_count(n_qubits, n_block))
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        Self::new(n_qubits, n_block, phi)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_block(&self) -> usize {
        self.n_block
    }

    /// Dimension of the simulated state, 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_mut(&mut self) -> &mut [f64] {
        &mut self.phi
    }

    fn angles_at(&self, offset: usize) -> (f64, f64, f64) {
        (self.phi[offset], self.phi[offset + 1], self.phi[offset + 2])
    }

    /// The gate sequence in application order.
    pub fn gates(&self) -> Vec<GateRef> {
        let n = self.n_qubits;
        let per_block = angles_per_block(n);
        let mut gates = Vec::with_capacity(self.n_block * if n == 1 { 1 } else { 2 * n });
        for block in 0..self.n_block {
            let base = block * per_block;
            for q in 0..n {
                gates.push(GateRef {
                    kind: GateKind::U3 { qubit: q },
                    phi_offset: base + 3 * q,
                });
            }
            if n > 1 {
                for q in 0..n {
                    gates.push(GateRef {
                        kind: GateKind::Cu3 {
                            control: q,
                            target: (q + 1) % n,
                        },
                        phi_offset: base + 3 * n + 3 * q,
                    });
                }
            }
        }
        gates
    }

    /// Runs the circuit on |0…0⟩ and returns the final state.
    pub fn forward_state(&self) -> Result<StateVector> {
        let mut state = StateVector::zero_state(self.n_qubits);
        for gate in self.gates() {
            let (mu, varphi, lambda) = self.angles_at(gate.phi_offset);
            match gate.kind {
                GateKind::U3 { qubit } => state.apply_u3(qubit, mu, varphi, lambda)?,
                GateKind::Cu3 { control, target } => {
                    state.apply_cu3(control, target, mu, varphi, lambda)?
                }
            }
        }
        Ok(state)
    }

    /// Runs the circuit and returns |⟨i|ψ(φ)⟩|² for every basis index i.
    pub fn probabilities(&self) -> Result<ProbabilityVector> {
        ProbabilityVector::new(self.forward_state()?.probabilities())
    }

    /// Pulls a probability-space cotangent back to angle space: given
    /// v = ∂L/∂p this returns ∂L/∂φ, exactly.
    pub fn backprop_probabilities(&self, prob_cotangent: &[f64]) -> Result<Vec<f64>> {
        if prob_cotangent.len() != self.dim() {
            return Err(Error::Shape {
                what: "probability cotangent",
                expected: self.dim(),
                actual: prob_cotangent.len(),
            });
        }
        let final_state = self.forward_state()?;
        Ok(self.backprop_from_state(&final_state, prob_cotangent))
    }

    /// Adjoint pass starting from an already-computed final state.
    fn backprop_from_state(&self, final_state: &StateVector, prob_cotangent: &[f64]) -> Vec<f64> {
        let mut psi = final_state.clone();
        // ∂L/∂ψ_i* = v_i ψ_i for L = Σ v_i |ψ_i|².
        let lambda_amps: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(prob_cotangent)
            .map(|(a, v)| a * v)
            .collect();
        let mut lambda = StateVector::from_amplitudes(lambda_amps)
            .expect("cotangent has the same power-of-two length as the state");

        let mut grad = vec![0.0; self.phi.len()];
        for gate in self.gates().into_iter().rev() {
            let (mu, varphi, lam) = self.angles_at(gate.phi_offset);
            let dagger = u3_matrix_dagger(mu, varphi, lam);
            let derivs = u3_matrix_derivatives(mu, varphi, lam);
            match gate.kind {
                GateKind::U3 { qubit } => {
                    psi.apply_single(qubit, &dagger).expect("validated qubit");
                    for (k, d) in derivs.iter().enumerate() {
                        grad[gate.phi_offset + k] = 2.0 * inner_single(&lambda, &psi, qubit, d).re;
                    }
                    lambda
                        .apply_single(qubit, &dagger)
                        .expect("validated qubit");
                }
                GateKind::Cu3 { control, target } => {
                    psi.apply_controlled(control, target, &dagger)
                        .expect("validated qubits");
                    for (k, d) in derivs.iter().enumerate() {
                        grad[gate.phi_offset + k] =
                            2.0 * inner_controlled(&lambda, &psi, control, target, d).re;
                    }
                    lambda
                        .apply_controlled(control, target, &dagger)
                        .expect("validated qubits");
                }
            }
        }
        grad
    }

    /// Full Jacobian ∂p_i/∂φ_k, one row per basis index. Columns sum to zero
    /// across rows because the probabilities always total 1.
    pub fn grad_probabilities(&self) -> Result<Vec<Vec<f64>>> {
        let final_state = self.forward_state()?;
        let dim = self.dim();
        let mut cotangent = vec![0.0; dim];
        let mut rows = Vec::with_capacity(dim);
        for i in 0..dim {
            cotangent[i] = 1.0;
            rows.push(self.backprop_from_state(&final_state, &cotangent));
            cotangent[i] = 0.0;
        }
        Ok(rows)
    }
}

/// ⟨λ| (D ⊗ I on `qubit`) |ψ⟩ where D is a 2x2 matrix acting on `qubit`.
fn inner_single(lambda: &StateVector, psi: &StateVector, qubit: usize, d: &Matrix2) -> Complex64 {
    let mask = 1usize << (psi.n_qubits() - 1 - qubit);
    let la = lambda.amplitudes();
    let pa = psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i0 in 0..pa.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        acc += la[i0].conj() * (d[0] * pa[i0] + d[1] * pa[i1]);
        acc += la[i1].conj() * (d[2] * pa[i0] + d[3] * pa[i1]);
    }
    acc
}

/// Same inner product for the controlled version: the derivative of a
/// controlled gate vanishes on the control-|0⟩ subspace, so only control-|1⟩
/// pairs contribute.
fn inner_controlled(
    lambda: &StateVector,
    psi: &StateVector,
    control: usize,
    target: usize,
    d: &Matrix2,
) -> Complex64 {
    let n = psi.n_qubits();
    let cmask = 1usize << (n - 1 - control);
    let tmask = 1usize << (n - 1 - target);
    let la = lambda.amplitudes();
    let pa = psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i0 in 0..pa.len() {
        if i0 & tmask != 0 || i0 & cmask == 0 {
            continue;
        }
        let i1 = i0 | tmask;
        acc += la[i0].conj() * (d[0] * pa[i0] + d[1] * pa[i1]);
        acc += la[i1].conj() * (d[2] * pa[i0] + d[3] * pa[i1]);
    }
    acc
}
