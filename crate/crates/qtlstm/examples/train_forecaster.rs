//! Trains the generated-weight forecaster on synthetic river data and prints
//! the learning curve against the persistence baseline.

use qtlstm::data::{synth_flood_series, DataRecipe};
use qtlstm::lstm::{mse_loss, LstmSpec};
use qtlstm::model::QtModel;
use qtlstm::train::{train_qt, TrainConfig};

fn main() -> qtlstm::Result<()> {
    let table = synth_flood_series(2000, 1, 0.012, 1.5)?;
    let recipe = DataRecipe {
        level_column: "level".into(),
        feature_columns: vec![
            "level".into(),
            "discharge".into(),
            "reservoir_fill".into(),
            "rainfall".into(),
        ],
        lags: vec![1, 3, 5, 7],
        window: 30,
        horizon_steps: 24,
        train_fraction: 0.8,
        validation_fraction: 0.2,
    };
    let (mut data, _) = recipe.prepare(table)?;
    data.normalize()?;

    let spec = LstmSpec::new(recipe.n_features(), 24);
    let model = QtModel::seeded(spec, 2, 1)?;
    let counts = model.trainable_counts();
    println!(
        "LSTM weights M = {}, circuit qubits = {}, trainable = {} ({:.1}% of M)",
        counts.classical,
        spec.required_qubits(),
        counts.qt,
        100.0 * counts.qt as f64 / counts.classical as f64
    );

    // Persistence on the validation tail: the bar to clear.
    let split = data.split_index();
    let val_start = split - (split as f64 * 0.2).floor() as usize;
    let persistence = data.persistence_predictions(val_start..split);
    let persistence_mse = mse_loss(&persistence, &data.targets()[val_start..split])?;
    println!("persistence baseline val MSE = {persistence_mse:.6}");

    let config = TrainConfig::new(200, 1);
    let (_, report) = train_qt(model, &data, &config)?;
    for rec in report.epochs.iter().step_by(20) {
        println!(
            "epoch {:>4}: train {:.6}  val {:.6}",
            rec.epoch, rec.train_loss, rec.val_loss
        );
    }
    println!(
        "final val MSE {:.6} (best {:.6}) after {:.1}s — persistence {persistence_mse:.6}",
        report.final_val_loss, report.best_val_loss, report.wall_seconds
    );
    Ok(())
}
