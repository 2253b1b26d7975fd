//! Drives the statevector simulator directly: a U3 half-rotation plus a
//! CU3 entangler turn |00⟩ into a Bell pair.

use std::f64::consts::{FRAC_PI_2, PI};

use qtlstm::sim::StateVector;

fn main() -> qtlstm::Result<()> {
    let mut state = StateVector::zero_state(2);
    println!("start: |00⟩");

    // Hadamard-like rotation on qubit 0.
    state.apply_u3(0, FRAC_PI_2, 0.0, PI)?;
    // Controlled X as CU3(π, 0, π), qubit 0 controlling qubit 1.
    state.apply_cu3(0, 1, PI, 0.0, PI)?;

    println!("after U3(π/2, 0, π) on qubit 0 and CU3(π, 0, π):");
    for (i, amp) in state.amplitudes().iter().enumerate() {
        println!("  |{:02b}⟩  amplitude {:+.6} {:+.6}i", i, amp.re, amp.im);
    }
    let probs = state.probabilities();
    println!("measurement probabilities: {probs:?}");
    println!("norm² = {:.15}", state.norm_sqr());
    Ok(())
}
