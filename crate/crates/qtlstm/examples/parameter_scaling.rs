//! How the trainable-parameter count scales as the driven LSTM grows: the
//! circuit-plus-mapping core stays polynomial in N = ⌈log₂ M⌉ while M grows
//! exponentially in N.

use qtlstm::lstm::LstmSpec;
use qtlstm::mapping::{default_layer_dims, gamma_len};
use qtlstm::sim::angle_count;

fn main() {
    let n_block = 2;
    println!(
        "{:>6} {:>6} {:>9} {:>7} {:>8} {:>9} {:>8}",
        "F", "H", "M", "qubits", "|phi|", "|gamma|", "ratio"
    );
    for (f, h) in [
        (4usize, 8usize),
        (8, 16),
        (8, 24),
        (16, 32),
        (40, 48),
        (151, 50),
        (64, 96),
    ] {
        let spec = LstmSpec::new(f, h);
        let m = spec.param_count();
        let n = spec.required_qubits();
        let phi = angle_count(n, n_block);
        let gamma = gamma_len(&default_layer_dims(n));
        println!(
            "{f:>6} {h:>6} {m:>9} {n:>7} {phi:>8} {gamma:>9} {:>7.2}%",
            100.0 * (phi + gamma) as f64 / m as f64
        );
    }
    println!();
    println!("qt trainable count by qubit budget alone (quadratic in N):");
    for n in 4..=20 {
        let qt = angle_count(n, n_block) + gamma_len(&default_layer_dims(n));
        println!(
            "  N = {n:>2}: covers M up to {:>9}, trains {qt:>6}",
            1u64 << n
        );
    }
}
