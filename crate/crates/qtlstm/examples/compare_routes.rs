//! Trains the same LSTM twice — weights generated from the circuit core vs
//! direct weight training — and prints both learning outcomes side by side.

use qtlstm::data::{synth_flood_series, DataRecipe};
use qtlstm::lstm::LstmSpec;
use qtlstm::model::QtModel;
use qtlstm::train::{train_classical, train_qt, TrainConfig};

fn main() -> qtlstm::Result<()> {
    let table = synth_flood_series(1000, 3, 0.015, 1.5)?;
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
    let mut config = TrainConfig::new(120, 1);
    config.learning_rate = 1e-2; // full-batch runs want bigger steps

    let model = QtModel::seeded(spec, 2, config.seed)?;
    let (_, qt) = train_qt(model, &data, &config)?;
    let (_, classical) = train_classical(spec, &data, &config)?;

    println!(
        "{:<12} {:>10} {:>12} {:>12} {:>8}",
        "route", "trainable", "best val", "final val", "secs"
    );
    for report in [&classical, &qt] {
        println!(
            "{:<12} {:>10} {:>12.6} {:>12.6} {:>8.1}",
            report.mode.to_string(),
            report.trainable_count,
            report.best_val_loss,
            report.final_val_loss,
            report.wall_seconds
        );
    }
    println!(
        "\nthe generated-weight route trained {} of {} parameters ({:.1}%)",
        qt.trainable_count,
        qt.classical_param_count,
        100.0 * qt.trainable_count as f64 / qt.classical_param_count as f64
    );
    Ok(())
}
