//! Command-line surface: data synthesis, training, evaluation, prediction
//! export and the side-by-side comparison of the two training routes.
//!
//! Exit codes: 0 success, 1 usage/config problems, 2 data/schema/file
//! problems, 3 numerical divergence during training.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checkpoint::Checkpoint;
use crate::config::{RunConfig, CONFIG_ENV_VAR};
use crate::data::{load_csv, synth_flood_series, DataRecipe, WindowedDataset};
use crate::error::{Error, Result};
use crate::lstm::{self, LstmSpec};
use crate::mapping::default_layer_dims;
use crate::metrics::{classify_warnings, evaluate_regression, RegressionMetrics, WarningReport};
use crate::model::QtModel;
use crate::train::{train_classical, train_qt, TrainMode, TrainReport};

#[derive(Debug, Parser)]
#[command(
    name = "qtlstm",
    version,
    about = "Time-series forecasting with LSTM weights generated from a simulated quantum circuit"
)]
pub struct Cli {
    /// Config file; defaults to $QTLSTM_CONFIG if set, else built-in
    /// defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic flood-like dataset and write it as CSV.
    SynthData(SynthDataArgs),
    /// Train a forecaster; writes a checkpoint and a learning-curve CSV.
    Train(TrainArgs),
    /// Evaluate a checkpoint: regression metrics plus the warning report.
    Evaluate(EvaluateArgs),
    /// Write (timestamp, actual, predicted) rows for plotting.
    Predict(PredictArgs),
    /// Train both routes on one dataset and print a side-by-side table.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SynthDataArgs {
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub spike_rate: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training route: qt or classical.
    #[arg(long)]
    pub mode: String,
    /// Dataset CSV; overrides data_csv from the config file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Directory for the checkpoint and learning-curve files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Dataset CSV; overrides data_csv from the config file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Warning threshold in cm; overrides the config value.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Samples to evaluate: train, test or all.
    #[arg(long, default_value = "test")]
    pub region: String,
    /// Also write the metrics as a key,value CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Samples to export: train, test or all.
    #[arg(long, default_value = "all")]
    pub region: String,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Dataset CSV; overrides data_csv from the config file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Directory for checkpoints, learning curves and the comparison CSV.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Maps an error to the documented process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 1,
        Error::Divergence { .. } => 3,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = load_run_config(cli.config.as_deref())?;
    match cli.command {
        Command::SynthData(args) => synth_data(&config, &args),
        Command::Train(args) => train(&config, &args),
        Command::Evaluate(args) => evaluate(&config, &args),
        Command::Predict(args) => predict(&config, &args),
        Command::Compare(args) => compare(&config, &args),
    }
}

fn load_run_config(flag: Option<&Path>) -> Result<RunConfig> {
    if let Some(path) = flag {
        return RunConfig::from_file(path);
    }
    if let Ok(path) = std::env::var(CONFIG_ENV_VAR) {
        return RunConfig::from_file(Path::new(&path));
    }
    Ok(RunConfig::default())
}

fn synth_data(config: &RunConfig, args: &SynthDataArgs) -> Result<()> {
    let length = args.length.unwrap_or(config.synth_length);
    let seed = args.seed.unwrap_or(config.synth_seed);
    let spike_rate = args.spike_rate.unwrap_or(config.synth_spike_rate);
    let noise = args.noise.unwrap_or(config.synth_noise);
    let table = synth_flood_series(length, seed, spike_rate, noise)?;
    table.write_csv(&args.out)?;
    println!(
        "wrote {} rows (seed {seed}, spike_rate {spike_rate}, noise {noise}) to {}",
        table.n_rows(),
        args.out.display()
    );
    Ok(())
}

fn resolve_data_path(config: &RunConfig, flag: &Option<PathBuf>) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| config.data_csv.clone())
        .ok_or_else(|| {
            Error::Config("no dataset given: pass --data or set data_csv in the config".into())
        })
}

/// Loads and prepares a dataset (unnormalized) according to a recipe.
fn prepared_dataset(path: &Path, recipe: &DataRecipe) -> Result<WindowedDataset> {
    let table = load_csv(path, &recipe.csv_schema())?;
    let (dataset, filled) = recipe.prepare(table)?;
    if filled > 0 {
        println!("imputed {filled} missing cells in {}", path.display());
    }
    Ok(dataset)
}

fn sample_range(data: &WindowedDataset, region: &str) -> Result<std::ops::Range<usize>> {
    match region {
        "train" => Ok(0..data.split_index()),
        "test" => Ok(data.split_index()..data.len()),
        "all" => Ok(0..data.len()),
        other => Err(Error::Config(format!(
            "unknown region {other}, expected train, test or all"
        ))),
    }
}

struct TrainedArtifacts {
    checkpoint: Checkpoint,
    report: TrainReport,
}

fn train_one_mode(
    config: &RunConfig,
    mode: TrainMode,
    data_path: &Path,
    overrides: Option<&TrainArgs>,
) -> Result<TrainedArtifacts> {
    let recipe = config.recipe();
    let mut dataset = prepared_dataset(data_path, &recipe)?;
    let stats = dataset.normalize()?.clone();
    if !stats.constant_columns().is_empty() {
        println!(
            "constant feature columns normalized to zero: {}",
            stats.constant_columns().join(", ")
        );
    }

    let mut train_config = config.train_config()?;
    if let Some(args) = overrides {
        if let Some(epochs) = args.epochs {
            train_config.epochs = epochs;
        }
        if let Some(seed) = args.seed {
            train_config.seed = seed;
        }
        if let Some(lr) = args.learning_rate {
            train_config.learning_rate = lr;
        }
    }

    let spec = LstmSpec::new(recipe.n_features(), config.hidden_dim);
    let (checkpoint, report) = match mode {
        TrainMode::Qt => {
            let layer_dims = match &config.mapping_hidden_dims {
                Some(hidden) => {
                    let mut dims = vec![spec.required_qubits() + 1];
                    dims.extend_from_slice(hidden);
                    dims.push(1);
                    dims
                }
                None => default_layer_dims(spec.required_qubits()),
            };
            let model =
                QtModel::with_mapping_dims(spec, config.n_block, layer_dims, train_config.seed)?;
            let (model, report) = train_qt(model, &dataset, &train_config)?;
            let ckpt = Checkpoint::from_qt(
                &model,
                stats,
                recipe.clone(),
                train_config.seed,
                report.final_val_loss,
            );
            (ckpt, report)
        }
        TrainMode::Classical => {
            let (theta, report) = train_classical(spec, &dataset, &train_config)?;
            let ckpt = Checkpoint::from_classical(
                spec,
                &theta,
                stats,
                recipe.clone(),
                train_config.seed,
                report.final_val_loss,
            );
            (ckpt, report)
        }
    };
    Ok(TrainedArtifacts { checkpoint, report })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn train(config: &RunConfig, args: &TrainArgs) -> Result<()> {
    let mode: TrainMode = args.mode.parse()?;
    let data_path = resolve_data_path(config, &args.data)?;
    let artifacts = train_one_mode(config, mode, &data_path, Some(args))?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let ckpt_path = args.out_dir.join(format!("checkpoint_{mode}.json"));
    let curve_path = args.out_dir.join(format!("learning_curve_{mode}.csv"));
    artifacts.checkpoint.save(&ckpt_path)?;
    write_text(&curve_path, &artifacts.report.learning_curve_csv())?;

    let report = &artifacts.report;
    println!(
        "{mode}: {} epochs, trainable {} / LSTM weights {}, best val MSE {:.6e}, final val MSE {:.6e}, {:.1}s",
        report.epochs.len(),
        report.trainable_count,
        report.classical_param_count,
        report.best_val_loss,
        report.final_val_loss,
        report.wall_seconds
    );
    println!("wrote {}", ckpt_path.display());
    println!("wrote {}", curve_path.display());
    Ok(())
}

struct Evaluation {
    metrics: RegressionMetrics,
    warnings: WarningReport,
}

fn evaluate_checkpoint(
    ckpt: &Checkpoint,
    data_path: &Path,
    region: &str,
    threshold: f64,
) -> Result<Evaluation> {
    let mut dataset = prepared_dataset(data_path, &ckpt.data)?;
    dataset.apply_normalization(&ckpt.normalization)?;
    let range = sample_range(&dataset, region)?;
    if range.is_empty() {
        return Err(Error::Data(format!("region {region} holds no samples")));
    }
    let theta = ckpt.rebuild_theta()?;
    let batch = dataset.batch(range.clone())?;
    let preds_norm = lstm::forward(&theta, &ckpt.lstm, &batch)?;
    let preds_cm = ckpt.normalization.denormalize_level(&preds_norm);
    let actuals_cm = ckpt.normalization.denormalize_level(batch.targets());
    Ok(Evaluation {
        metrics: evaluate_regression(&preds_cm, &actuals_cm)?,
        warnings: classify_warnings(&preds_cm, &actuals_cm, threshold)?,
    })
}

fn evaluation_csv(eval: &Evaluation) -> String {
    let m = &eval.metrics;
    let w = &eval.warnings;
    format!(
        "metric,value\n\
         n_samples,{}\n\
         mse_cm2,{}\n\
         mae_cm,{}\n\
         threshold_cm,{}\n\
         true_warning_pct,{}\n\
         false_alert_pct,{}\n\
         missed_warning_pct,{}\n\
         correct_no_warning_pct,{}\n",
        m.n_samples,
        m.mse,
        m.mae,
        w.threshold_cm,
        w.true_warning_pct,
        w.false_alert_pct,
        w.missed_warning_pct,
        w.correct_no_warning_pct
    )
}

fn print_evaluation(label: &str, eval: &Evaluation) {
    let m = &eval.metrics;
    let w = &eval.warnings;
    println!("{label}: {} samples", m.n_samples);
    println!("  MSE  {:.4} cm^2", m.mse);
    println!("  MAE  {:.4} cm", m.mae);
    println!(
        "  warnings at {} cm: true {:.2}%, false alert {:.2}%, missed {:.2}%, correct quiet {:.2}%",
        w.threshold_cm,
        w.true_warning_pct,
        w.false_alert_pct,
        w.missed_warning_pct,
        w.correct_no_warning_pct
    );
}

fn evaluate(config: &RunConfig, args: &EvaluateArgs) -> Result<()> {
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let data_path = resolve_data_path(config, &args.data)?;
    let threshold = args.threshold.unwrap_or(config.threshold_cm);
    let eval = evaluate_checkpoint(&ckpt, &data_path, &args.region, threshold)?;
    print_evaluation(&format!("{} ({})", ckpt.mode, args.region), &eval);
    if let Some(out) = &args.out {
        write_text(out, &evaluation_csv(&eval))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn predict(config: &RunConfig, args: &PredictArgs) -> Result<()> {
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let data_path = resolve_data_path(config, &args.data)?;
    let mut dataset = prepared_dataset(&data_path, &ckpt.data)?;
    dataset.apply_normalization(&ckpt.normalization)?;
    let range = sample_range(&dataset, &args.region)?;
    if range.is_empty() {
        return Err(Error::Data(format!(
            "region {} holds no samples",
            args.region
        )));
    }
    let theta = ckpt.rebuild_theta()?;
    let batch = dataset.batch(range.clone())?;
    let preds_norm = lstm::forward(&theta, &ckpt.lstm, &batch)?;
    let preds_cm = ckpt.normalization.denormalize_level(&preds_norm);
    let actuals_cm = ckpt.normalization.denormalize_level(batch.targets());

    let mut out = String::from("timestamp,actual_cm,predicted_cm\n");
    for (offset, s) in range.clone().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            dataset.timestamps()[s],
            actuals_cm[offset],
            preds_cm[offset]
        ));
    }
    write_text(&args.out, &out)?;
    println!(
        "wrote {} predictions ({}) to {}",
        range.len(),
        args.region,
        args.out.display()
    );
    Ok(())
}

fn compare(config: &RunConfig, args: &CompareArgs) -> Result<()> {
    let data_path = resolve_data_path(config, &args.data)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;

    let mut rows = Vec::new();
    for mode in [TrainMode::Classical, TrainMode::Qt] {
        let artifacts = train_one_mode(config, mode, &data_path, None)?;
        let ckpt_path = args.out_dir.join(format!("checkpoint_{mode}.json"));
        let curve_path = args.out_dir.join(format!("learning_curve_{mode}.csv"));
        artifacts.checkpoint.save(&ckpt_path)?;
        write_text(&curve_path, &artifacts.report.learning_curve_csv())?;
        let eval = evaluate_checkpoint(
            &artifacts.checkpoint,
            &data_path,
            "test",
            config.threshold_cm,
        )?;
        rows.push((mode, artifacts.report, eval));
    }

    println!(
        "{:<10} {:>10} {:>10} {:>12} {:>12} {:>10} {:>8} {:>8} {:>8} {:>8}",
        "mode",
        "trainable",
        "weights",
        "val_mse",
        "test_mse",
        "test_mae",
        "true%",
        "false%",
        "miss%",
        "quiet%"
    );
    let mut csv = String::from(
        "mode,trainable_params,lstm_weights,final_val_mse,test_mse_cm2,test_mae_cm,\
         true_warning_pct,false_alert_pct,missed_warning_pct,correct_no_warning_pct\n",
    );
    for (mode, report, eval) in &rows {
        println!(
            "{:<10} {:>10} {:>10} {:>12.6} {:>12.4} {:>10.4} {:>8.2} {:>8.2} {:>8.2} {:>8.2}",
            mode.to_string(),
            report.trainable_count,
            report.classical_param_count,
            report.final_val_loss,
            eval.metrics.mse,
            eval.metrics.mae,
            eval.warnings.true_warning_pct,
            eval.warnings.false_alert_pct,
            eval.warnings.missed_warning_pct,
            eval.warnings.correct_no_warning_pct
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            mode,
            report.trainable_count,
            report.classical_param_count,
            report.final_val_loss,
            eval.metrics.mse,
            eval.metrics.mae,
            eval.warnings.true_warning_pct,
            eval.warnings.false_alert_pct,
            eval.warnings.missed_warning_pct,
            eval.warnings.correct_no_warning_pct
        ));
    }
    let csv_path = args.out_dir.join("compare.csv");
    write_text(&csv_path, &csv)?;
    println!("wrote {}", csv_path.display());
    Ok(())
}
