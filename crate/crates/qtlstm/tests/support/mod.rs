//! Shared oracles for the integration suites. Everything here recomputes
//! results through a route independent of the library's own kernels: dense
//! matrix algebra for circuits and central finite differences for gradients.

#![allow(dead_code)]

use num_complex::Complex64;
use qtlstm::sim::{AnsatzCircuit, GateKind};

/// U3 entries written out locally so the oracle does not share the library's
/// matrix constructor.
fn oracle_u3_entries(mu: f64, varphi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let c = (0.5 * mu).cos();
    let s = (0.5 * mu).sin();
    let i = Complex64::i();
    [
        [Complex64::new(c, 0.0), -((i * lambda).exp()) * s],
        [(i * varphi).exp() * s, (i * (varphi + lambda)).exp() * c],
    ]
}

/// Full 2^N × 2^N matrix of one gate, built entrywise from bit logic with
/// qubit 0 as the most significant bit.
fn dense_gate_matrix(
    n_qubits: usize,
    gate_kind: GateKind,
    angles: (f64, f64, f64),
) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n_qubits;
    let (mu, varphi, lambda) = angles;
    let m = oracle_u3_entries(mu, varphi, lambda);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut out = vec![vec![zero; dim]; dim];
    match gate_kind {
        GateKind::U3 { qubit } => {
            let pos = n_qubits - 1 - qubit;
            let mask = 1usize << pos;
            for r in 0..dim {
                for c in 0..dim {
                    if r & !mask == c & !mask {
                        out[r][c] = m[(r >> pos) & 1][(c >> pos) & 1];
                    }
                }
            }
        }
        GateKind::Cu3 { control, target } => {
            let cpos = n_qubits - 1 - control;
            let tpos = n_qubits - 1 - target;
            let tmask = 1usize << tpos;
            for r in 0..dim {
                for c in 0..dim {
                    if (c >> cpos) & 1 == 0 {
                        if r == c {
                            out[r][c] = one;
                        }
                    } else if (r >> cpos) & 1 == 1 && r & !tmask == c & !tmask {
                        out[r][c] = m[(r >> tpos) & 1][(c >> tpos) & 1];
                    }
                }
            }
        }
    }
    out
}

fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Runs the circuit by brute-force dense matrix products applied to |0…0⟩.
pub fn oracle_final_state(circuit: &AnsatzCircuit) -> Vec<Complex64> {
    let dim = circuit.dim();
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    state[0] = Complex64::new(1.0, 0.0);
    for gate in circuit.gates() {
        let phi = circuit.phi();
        let angles = (
            phi[gate.phi_offset],
            phi[gate.phi_offset + 1],
            phi[gate.phi_offset + 2],
        );
        let m = dense_gate_matrix(circuit.n_qubits(), gate.kind, angles);
        state = matvec(&m, &state);
    }
    state
}

pub fn oracle_probabilities(circuit: &AnsatzCircuit) -> Vec<f64> {
    oracle_final_state(circuit)
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}

/// Applies a single gate to an arbitrary state through the dense matrix.
pub fn dense_apply(
    n_qubits: usize,
    kind: GateKind,
    angles: (f64, f64, f64),
    state: &[Complex64],
) -> Vec<Complex64> {
    matvec(&dense_gate_matrix(n_qubits, kind, angles), state)
}

/// Straight-line re-implementation of the mapping network's forward pass:
/// plain nested loops over the flat weight vector, tanh on hidden layers,
/// linear output.
pub fn oracle_net_forward(layer_dims: &[usize], gamma: &[f64], x: &[f64]) -> f64 {
    let mut activations = x.to_vec();
    let mut offset = 0;
    for layer in 0..layer_dims.len() - 1 {
        let n_in = layer_dims[layer];
        let n_out = layer_dims[layer + 1];
        let mut next = vec![0.0; n_out];
        for (r, slot) in next.iter_mut().enumerate() {
            let mut z = gamma[offset + n_in * n_out + r]; // bias
            for (c, a) in activations.iter().enumerate() {
                z += gamma[offset + r * n_in + c] * a;
            }
            *slot = if layer + 1 == layer_dims.len() - 1 {
                z
            } else {
                z.tanh()
            };
        }
        activations = next;
        offset += (n_in + 1) * n_out;
    }
    activations[0]
}

/// Central finite difference of a vector-valued function with respect to
/// coordinate `k`: (f(x + ε·e_k) − f(x − ε·e_k)) / 2ε.
pub fn central_diff<F>(mut f: F, x: &[f64], eps: f64, k: usize) -> Vec<f64>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut probe = x.to_vec();
    probe[k] = x[k] + eps;
    let plus = f(&probe);
    probe[k] = x[k] - eps;
    let minus = f(&probe);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * eps))
        .collect()
}

/// Largest relative deviation between an analytic gradient and its numeric
/// estimate; denominators are floored so near-zero entries compare by
/// absolute difference.
pub fn max_rel_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / n.abs().max(floor))
        .fold(0.0, f64::max)
}
