//! Turns level forecasts into the four-way flood-warning report: train
//! briefly, predict the held-out region, threshold at 100 cm.

use qtlstm::data::{synth_flood_series, DataRecipe};
use qtlstm::lstm::{self, LstmSpec};
use qtlstm::metrics::{classify_warnings, evaluate_regression, DEFAULT_THRESHOLD_CM};
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
    let mut config = TrainConfig::new(200, 1);
    config.learning_rate = 1e-2; // full-batch runs want bigger steps
    let model = QtModel::seeded(spec, 2, config.seed)?;
    let (trained, report) = train_qt(model, &data, &config)?;
    println!(
        "trained {} parameters for {} epochs (final val MSE {:.5})",
        report.trainable_count,
        report.epochs.len(),
        report.final_val_loss
    );

    // Forecast the chronological test region and denormalize to cm.
    let stats = data.normalization().unwrap();
    let theta = trained.generate_theta()?;
    let batch = data.batch(data.split_index()..data.len())?;
    let preds = lstm::forward(&theta, &spec, &batch)?;
    let preds_cm = stats.denormalize_level(&preds);
    let actuals_cm = stats.denormalize_level(batch.targets());

    let metrics = evaluate_regression(&preds_cm, &actuals_cm)?;
    println!(
        "test region: {} samples, MSE {:.2} cm², MAE {:.2} cm",
        metrics.n_samples, metrics.mse, metrics.mae
    );

    let report = classify_warnings(&preds_cm, &actuals_cm, DEFAULT_THRESHOLD_CM)?;
    println!("warning classification at {} cm:", report.threshold_cm);
    println!("  true warnings      {:6.2}%", report.true_warning_pct);
    println!("  false alerts       {:6.2}%", report.false_alert_pct);
    println!("  missed warnings    {:6.2}%", report.missed_warning_pct);
    println!(
        "  correct no-warning {:6.2}%",
        report.correct_no_warning_pct
    );
    println!(
        "  (sums to {:.2})",
        report.percentages().iter().sum::<f64>()
    );
    Ok(())
}
