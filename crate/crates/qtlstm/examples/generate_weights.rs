//! Generates a full LSTM weight vector from circuit probabilities: the
//! weight-generation path in isolation, no training involved.

use qtlstm::lstm::LstmSpec;
use qtlstm::mapping::build_inputs;
use qtlstm::model::QtModel;

fn main() -> qtlstm::Result<()> {
    let spec = LstmSpec::new(8, 16); // M = 4·(128+256+16)+17 = 1617
    let model = QtModel::seeded(spec, 2, 9)?;
    let counts = model.trainable_counts();

    println!(
        "LSTM shape: {} inputs, {} hidden -> M = {} weights",
        spec.input_dim, spec.hidden_dim, counts.classical
    );
    println!(
        "circuit: {} qubits × {} blocks -> {} angles; mapping net {:?} -> {} weights",
        model.circuit().n_qubits(),
        model.circuit().n_block(),
        model.circuit().phi().len(),
        model.net().layer_dims(),
        model.net().gamma().len()
    );
    println!(
        "trainable {} vs generated {} ({:.1}%)",
        counts.qt,
        counts.classical,
        100.0 * counts.qt as f64 / counts.classical as f64
    );

    let theta = model.generate_theta()?;
    println!("first 8 generated weights: {:?}", &theta.as_slice()[..8]);

    // The inputs behind those weights: basis bits plus scaled probability.
    let probs = model.circuit().probabilities()?;
    let rows = build_inputs(&probs, 8)?;
    for (i, row) in rows.iter().enumerate() {
        println!(
            "  row {i}: bits {:?}, scaled prob {:.4} -> θ_{i} = {:+.6}",
            row.bits,
            row.prob,
            theta.as_slice()[i]
        );
    }

    // Regeneration is pure: same (φ, γ) -> same θ.
    let again = model.generate_theta()?;
    println!("regenerated identical: {}", theta == again);
    Ok(())
}
