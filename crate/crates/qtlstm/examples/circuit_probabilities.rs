//! Builds the block ansatz at a few sizes and prints its measurement
//! distribution: one U3 per qubit then a CU3 ring, repeated n_block times.

use qtlstm::sim::{angle_count, AnsatzCircuit};

fn main() -> qtlstm::Result<()> {
    for (n_qubits, n_block) in [(1usize, 1usize), (3, 2), (5, 3)] {
        let circuit = AnsatzCircuit::seeded(n_qubits, n_block, 7)?;
        let probs = circuit.probabilities()?;
        println!(
            "{n_qubits} qubits × {n_block} blocks: {} angles, {} gates",
            angle_count(n_qubits, n_block),
            circuit.gates().len()
        );
        if n_qubits <= 3 {
            for (i, p) in probs.as_slice().iter().enumerate() {
                println!("  p(|{:0width$b}⟩) = {p:.6}", i, width = n_qubits);
            }
        }
        let total: f64 = probs.as_slice().iter().sum();
        println!("  Σp = {total:.15}");
    }
    Ok(())
}
