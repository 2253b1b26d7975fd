//! Compares the adjoint-mode probability Jacobian against central finite
//! differences on a three-qubit circuit.

use qtlstm::sim::AnsatzCircuit;

fn main() -> qtlstm::Result<()> {
    let n_qubits = 3;
    let n_block = 2;
    let circuit = AnsatzCircuit::seeded(n_qubits, n_block, 123)?;
    let analytic = circuit.grad_probabilities()?;

    let eps = 1e-5;
    let mut max_err = 0.0f64;
    for k in 0..circuit.phi().len() {
        let mut plus = circuit.phi().to_vec();
        plus[k] += eps;
        let mut minus = circuit.phi().to_vec();
        minus[k] -= eps;
        let p_plus = AnsatzCircuit::new(n_qubits, n_block, plus)?.probabilities()?;
        let p_minus = AnsatzCircuit::new(n_qubits, n_block, minus)?.probabilities()?;
        for i in 0..circuit.dim() {
            let numeric = (p_plus[i] - p_minus[i]) / (2.0 * eps);
            let err = (analytic[i][k] - numeric).abs() / numeric.abs().max(1e-6);
            max_err = max_err.max(err);
        }
    }
    println!(
        "adjoint Jacobian ({} probabilities × {} angles)",
        circuit.dim(),
        circuit.phi().len()
    );
    println!("max relative deviation from finite differences: {max_err:.3e}");

    // Columns must sum to zero: probabilities always total 1.
    let worst_column: f64 = (0..circuit.phi().len())
        .map(|k| analytic.iter().map(|row| row[k]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    println!("largest |column sum| (should be ~0): {worst_column:.3e}");
    Ok(())
}
