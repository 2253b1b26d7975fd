//! Statevector simulation of a small qubit register.
//!
//! The state of an `n`-qubit register is tracked exactly as `2^n` complex
//! amplitudes. Basis indices are labelled big-endian: qubit 0 is the most
//! significant bit of the index, so for two qubits the amplitude order is
//! |00⟩, |01⟩, |10⟩, |11⟩. Every module in this crate that touches basis
//! indices (gates, probability rows, mapping inputs) uses this convention.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A 2x2 complex matrix in row-major order: `[m00, m01, m10, m11]`.
pub type Matrix2 = [Complex64; 4];

/// Builds the general single-qubit rotation
///
/// ```text
/// ⎡ cos(μ/2)            −e^{iλ} sin(μ/2)      ⎤
/// ⎣ e^{iφ} sin(μ/2)      e^{i(φ+λ)} cos(μ/2)  ⎦
/// ```
///
/// with angles in radians. Any unary gate can be written in this form.
pub fn u3_matrix(mu: f64, varphi: f64, lambda: f64) -> Matrix2 {
    let c = (0.5 * mu).cos();
    let s = (0.5 * mu).sin();
    [
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, varphi),
        Complex64::from_polar(c, varphi + lambda),
    ]
}

/// Conjugate transpose of [`u3_matrix`], used to rewind gates in the
/// adjoint-mode gradient pass.
pub fn u3_matrix_dagger(mu: f64, varphi: f64, lambda: f64) -> Matrix2 {
    let m = u3_matrix(mu, varphi, lambda);
    [m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()]
}

/// Entrywise derivatives of [`u3_matrix`] with respect to each of its three
/// angles, in the order (μ, φ, λ).
pub fn u3_matrix_derivatives(mu: f64, varphi: f64, lambda: f64) -> [Matrix2; 3] {
    let c = (0.5 * mu).cos();
    let s = (0.5 * mu).sin();
    let i = Complex64::i();
    let e_l = Complex64::from_polar(1.0, lambda);
    let e_v = Complex64::from_polar(1.0, varphi);
    let e_vl = Complex64::from_polar(1.0, varphi + lambda);
    let zero = Complex64::new(0.0, 0.0);
    let d_mu = [
        Complex64::new(-0.5 * s, 0.0),
        -e_l * (0.5 * c),
        e_v * (0.5 * c),
        e_vl * (-0.5 * s),
    ];
    let d_varphi = [zero, zero, i * e_v * s, i * e_vl * c];
    let d_lambda = [zero, -i * e_l * s, zero, i * e_vl * c];
    [d_mu, d_varphi, d_lambda]
}

/// Exact quantum state of `n_qubits` qubits: `2^n_qubits` complex amplitudes
/// with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Initializes |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "state needs at least one qubit");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    /// Builds a state from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Squared-magnitude of each amplitude, indexed by basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Σ|amp|², which any sequence of gate applications must keep at 1.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` inside a basis index (qubit 0 = MSB).
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies an arbitrary 2x2 matrix to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, m: &Matrix2) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let dim = self.amplitudes.len();
        for i0 in 0..dim {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let a0 = self.amplitudes[i0];
            let a1 = self.amplitudes[i1];
            self.amplitudes[i0] = m[0] * a0 + m[1] * a1;
            self.amplitudes[i1] = m[2] * a0 + m[3] * a1;
        }
        Ok(())
    }

    /// Applies a 2x2 matrix to `target` on the subspace where `control` is
    /// |1⟩; the control-|0⟩ subspace is untouched.
    pub fn apply_controlled(&mut self, control: usize, target: usize, m: &Matrix2) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidGate(format!(
                "controlled gate needs distinct qubits, got control = target = {control}"
            )));
        }
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        let dim = self.amplitudes.len();
        for i0 in 0..dim {
            if i0 & tmask != 0 || i0 & cmask == 0 {
                continue;
            }
            let i1 = i0 | tmask;
            let a0 = self.amplitudes[i0];
            let a1 = self.amplitudes[i1];
            self.amplitudes[i0] = m[0] * a0 + m[1] * a1;
            self.amplitudes[i1] = m[2] * a0 + m[3] * a1;
        }
        Ok(())
    }

    /// Applies the general single-qubit rotation `U3(μ, φ, λ)` to `qubit`.
    pub fn apply_u3(&mut self, qubit: usize, mu: f64, varphi: f64, lambda: f64) -> Result<()> {
        self.apply_single(qubit, &u3_matrix(mu, varphi, lambda))
    }

    /// Applies `U3(μ, φ, λ)` to `target` conditioned on `control` being |1⟩.
    pub fn apply_cu3(
        &mut self,
        control: usize,
        target: usize,
        mu: f64,
        varphi: f64,
        lambda: f64,
    ) -> Result<()> {
        self.apply_controlled(control, target, &u3_matrix(mu, varphi, lambda))
    }
}
