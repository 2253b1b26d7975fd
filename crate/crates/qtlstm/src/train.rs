//! Training loops for both routes over the same LSTM: the generated-weight
//! model (only φ and γ are updated, θ is regenerated every step) and the
//! classical baseline (θ updated directly). One seed fully determines a run:
//! parameter initialization, batch order and therefore every loss value.
//!
//! The training split is everything before the dataset's chronological split
//! index; its tail (`validation_fraction`, default 20%) is held out for the
//! per-epoch validation loss.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::WindowedDataset;
use crate::error::{Error, Result};
use crate::lstm::{self, FlatParams, LstmSpec, SequenceBatch};
use crate::model::QtModel;

/// Which route trained a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    Qt,
    Classical,
}

impl std::fmt::Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrainMode::Qt => write!(f, "qt"),
            TrainMode::Classical => write!(f, "classical"),
        }
    }
}

impl std::str::FromStr for TrainMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qt" => Ok(TrainMode::Qt),
            "classical" => Ok(TrainMode::Classical),
            other => Err(Error::Config(format!(
                "unknown mode {other}, expected qt or classical"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Adaptive moment estimation with the standard decay constants.
    #[default]
    Adam,
    /// Plain gradient descent.
    Sgd,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adam" => Ok(Optimizer::Adam),
            "sgd" => Ok(Optimizer::Sgd),
            other => Err(Error::Config(format!(
                "unknown optimizer {other}, expected adam or sgd"
            ))),
        }
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
    /// Optional global-norm clip; the probability→θ→loss chain can spike
    /// early in training.
    pub gradient_clip: Option<f64>,
    /// Chronological tail of the training range held out for validation.
    pub validation_fraction: f64,
}

/// Default batching rule: full-batch for desk-scale datasets, mini-batches
/// of 64 beyond that.
pub fn auto_batch_size(n_fit_samples: usize) -> usize {
    if n_fit_samples <= 4096 {
        n_fit_samples
    } else {
        64
    }
}

impl TrainConfig {
    pub fn new(epochs: usize, seed: u64) -> Self {
        TrainConfig {
            epochs,
            batch_size: 0, // resolved against the dataset by `validated`
            learning_rate: 1e-3,
            optimizer: Optimizer::Adam,
            seed,
            gradient_clip: None,
            validation_fraction: 0.2,
        }
    }

    fn validated(&self, n_fit: usize) -> Result<TrainConfig> {
        if self.epochs == 0 {
            return Err(Error::Argument("epochs must be positive".into()));
        }
        if self.learning_rate < 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::Argument(format!(
                "invalid learning rate {}",
                self.learning_rate
            )));
        }
        if let Some(c) = self.gradient_clip {
            if c <= 0.0 || !c.is_finite() {
                return Err(Error::Argument(format!("invalid gradient clip {c}")));
            }
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Argument(format!(
                "validation_fraction must lie in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        let mut resolved = self.clone();
        if resolved.batch_size == 0 {
            resolved.batch_size = auto_batch_size(n_fit);
        }
        Ok(resolved)
    }
}

/// Loss pair recorded after each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Outcome of a run: the learning curve plus the parameter arithmetic that
/// the run was about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub mode: TrainMode,
    pub epochs: Vec<EpochRecord>,
    /// Best validation loss seen so far; never increases over the run.
    pub best_val_loss: f64,
    pub final_val_loss: f64,
    /// Parameters the optimizer actually touched.
    pub trainable_count: usize,
    /// Weight count M of the LSTM being driven.
    pub classical_param_count: usize,
    pub wall_seconds: f64,
}

impl TrainReport {
    /// Learning curve as CSV text: `epoch,train_loss,val_loss`.
    pub fn learning_curve_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for rec in &self.epochs {
            out.push_str(&format!(
                "{},{},{}\n",
                rec.epoch, rec.train_loss, rec.val_loss
            ));
        }
        out
    }
}

/// Train/validation index ranges inside the dataset's training split.
fn fit_val_ranges(
    data: &WindowedDataset,
    validation_fraction: f64,
) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let split = data.split_index();
    if split < 2 {
        return Err(Error::Data(
            "training range too small to hold out a validation tail".into(),
        ));
    }
    let val_len = ((split as f64 * validation_fraction).floor() as usize).clamp(1, split - 1);
    let fit_end = split - val_len;
    Ok((0..fit_end, fit_end..split))
}

struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for k in 0..params.len() {
            self.m[k] = ADAM_BETA1 * self.m[k] + (1.0 - ADAM_BETA1) * grad[k];
            self.v[k] = ADAM_BETA2 * self.v[k] + (1.0 - ADAM_BETA2) * grad[k] * grad[k];
            let m_hat = self.m[k] / bc1;
            let v_hat = self.v[k] / bc2;
            params[k] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

enum OptimizerState {
    Adam(AdamState),
    Sgd,
}

impl OptimizerState {
    fn new(kind: Optimizer, n: usize) -> Self {
        match kind {
            Optimizer::Adam => OptimizerState::Adam(AdamState::new(n)),
            Optimizer::Sgd => OptimizerState::Sgd,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        match self {
            OptimizerState::Adam(state) => state.step(params, grad, lr),
            OptimizerState::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= lr * g;
                }
            }
        }
    }
}

fn clip_global_norm(grad: &mut [f64], clip: Option<f64>) {
    if let Some(limit) = clip {
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm > limit {
            let scale = limit / norm;
            grad.iter_mut().for_each(|g| *g *= scale);
        }
    }
}

/// Deterministic epoch ordering of the fit samples.
fn epoch_order(
    rng: &mut ChaCha8Rng,
    fit: &std::ops::Range<usize>,
    batch_size: usize,
) -> Vec<usize> {
    let mut order: Vec<usize> = fit.clone().collect();
    if batch_size < order.len() {
        // Fisher-Yates; only worth shuffling when actually mini-batching.
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
    }
    order
}

/// One trainable route plugged into the shared epoch loop.
trait TrainDriver {
    /// Consumes one batch: computes the loss, applies the update, returns
    /// the pre-update loss.
    fn step(&mut self, chunk: &[usize]) -> Result<f64>;
    /// Validation loss under the current parameters.
    fn validate(&mut self) -> Result<f64>;
}

fn run_epochs(
    mode: TrainMode,
    config: &TrainConfig,
    fit: std::ops::Range<usize>,
    trainable_count: usize,
    classical_param_count: usize,
    driver: &mut dyn TrainDriver,
) -> Result<TrainReport> {
    let start = Instant::now();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5851_f42d_4c95_7f2d);
    let mut records = Vec::with_capacity(config.epochs);
    let mut best_val = f64::INFINITY;
    let n_fit = fit.len() as f64;

    for epoch in 1..=config.epochs {
        let order = epoch_order(&mut shuffle_rng, &fit, config.batch_size);
        let mut train_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let loss = driver.step(chunk)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            train_loss += loss * chunk.len() as f64 / n_fit;
        }
        let val_loss = driver.validate()?;
        if !val_loss.is_finite() {
            return Err(Error::Divergence {
                epoch,
                loss: val_loss,
            });
        }
        best_val = best_val.min(val_loss);
        records.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
    }

    let final_val_loss = records.last().map(|r| r.val_loss).unwrap_or(f64::NAN);
    Ok(TrainReport {
        mode,
        epochs: records,
        best_val_loss: best_val,
        final_val_loss,
        trainable_count,
        classical_param_count,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

struct QtDriver<'a> {
    model: QtModel,
    data: &'a WindowedDataset,
    val_batch: SequenceBatch,
    opt: OptimizerState,
    learning_rate: f64,
    gradient_clip: Option<f64>,
    n_phi: usize,
    packed: Vec<f64>,
    grad: Vec<f64>,
}

impl TrainDriver for QtDriver<'_> {
    fn step(&mut self, chunk: &[usize]) -> Result<f64> {
        let batch = self.data.batch_of(chunk)?;
        let grads = self.model.loss_and_grads(&batch)?;
        self.grad[..self.n_phi].copy_from_slice(&grads.d_phi);
        self.grad[self.n_phi..].copy_from_slice(&grads.d_gamma);
        clip_global_norm(&mut self.grad, self.gradient_clip);
        self.packed[..self.n_phi].copy_from_slice(self.model.circuit().phi());
        self.packed[self.n_phi..].copy_from_slice(self.model.net().gamma());
        self.opt
            .step(&mut self.packed, &self.grad, self.learning_rate);
        self.model
            .circuit_mut()
            .phi_mut()
            .copy_from_slice(&self.packed[..self.n_phi]);
        self.model
            .net_mut()
            .gamma_mut()
            .copy_from_slice(&self.packed[self.n_phi..]);
        Ok(grads.loss)
    }

    fn validate(&mut self) -> Result<f64> {
        let theta = self.model.generate_theta()?;
        let preds = lstm::forward(&theta, self.model.spec(), &self.val_batch)?;
        lstm::mse_loss(&preds, self.val_batch.targets())
    }
}

/// Trains the generated-weight model: every step regenerates θ from (φ, γ),
/// backpropagates the batch MSE through all three stages and updates only
/// φ and γ.
pub fn train_qt(
    model: QtModel,
    data: &WindowedDataset,
    config: &TrainConfig,
) -> Result<(QtModel, TrainReport)> {
    let (fit, val) = fit_val_ranges(data, config.validation_fraction)?;
    let config = config.validated(fit.len())?;
    let val_batch = data.batch(val)?;

    let n_phi = model.circuit().phi().len();
    let counts = model.trainable_counts();
    let mut driver = QtDriver {
        model,
        data,
        val_batch,
        opt: OptimizerState::new(config.optimizer, counts.qt),
        learning_rate: config.learning_rate,
        gradient_clip: config.gradient_clip,
        n_phi,
        packed: vec![0.0; counts.qt],
        grad: vec![0.0; counts.qt],
    };

    let report = run_epochs(
        TrainMode::Qt,
        &config,
        fit,
        counts.qt,
        counts.classical,
        &mut driver,
    )?;
    Ok((driver.model, report))
}

/// Seeded initialization for directly-trained LSTM weights: uniform in
/// [−1/√H, +1/√H].
pub fn init_classical_theta(spec: &LstmSpec, seed: u64) -> FlatParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1.0 / (spec.hidden_dim as f64).sqrt();
    let theta = (0..spec.param_count())
        .map(|_| rng.random_range(-bound..bound))
        .collect();
    FlatParams::new(theta, spec).expect("generated exactly param_count values")
}

struct ClassicalDriver<'a> {
    theta: FlatParams,
    spec: LstmSpec,
    data: &'a WindowedDataset,
    val_batch: SequenceBatch,
    opt: OptimizerState,
    learning_rate: f64,
    gradient_clip: Option<f64>,
}

impl TrainDriver for ClassicalDriver<'_> {
    fn step(&mut self, chunk: &[usize]) -> Result<f64> {
        let batch = self.data.batch_of(chunk)?;
        let (loss, mut grad) = lstm::backward(&self.theta, &self.spec, &batch)?;
        clip_global_norm(&mut grad, self.gradient_clip);
        self.opt
            .step(self.theta.as_mut_slice(), &grad, self.learning_rate);
        Ok(loss)
    }

    fn validate(&mut self) -> Result<f64> {
        let preds = lstm::forward(&self.theta, &self.spec, &self.val_batch)?;
        lstm::mse_loss(&preds, self.val_batch.targets())
    }
}

/// Trains the LSTM directly on θ with the identical loop, as the comparison
/// baseline.
pub fn train_classical(
    spec: LstmSpec,
    data: &WindowedDataset,
    config: &TrainConfig,
) -> Result<(FlatParams, TrainReport)> {
    let (fit, val) = fit_val_ranges(data, config.validation_fraction)?;
    let config = config.validated(fit.len())?;
    let val_batch = data.batch(val)?;

    let m = spec.param_count();
    let mut driver = ClassicalDriver {
        theta: init_classical_theta(&spec, config.seed),
        spec,
        data,
        val_batch,
        opt: OptimizerState::new(config.optimizer, m),
        learning_rate: config.learning_rate,
        gradient_clip: config.gradient_clip,
    };

    let report = run_epochs(TrainMode::Classical, &config, fit, m, m, &mut driver)?;
    Ok((driver.theta, report))
}

/// Validation loss of an already-trained parameter vector on the dataset's
/// held-out validation tail, exactly as the training loop computes it.
pub fn validation_loss(
    theta: &FlatParams,
    spec: &LstmSpec,
    data: &WindowedDataset,
    validation_fraction: f64,
) -> Result<f64> {
    let (_, val) = fit_val_ranges(data, validation_fraction)?;
    let batch = data.batch(val)?;
    let preds = lstm::forward(theta, spec, &batch)?;
    lstm::mse_loss(&preds, batch.targets())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_windows, synth_flood_series, WindowSpec};

    fn tiny_dataset() -> WindowedDataset {
        let table = synth_flood_series(260, 5, 0.02, 1.0).unwrap();
        let mut data = make_windows(
            &table,
            &WindowSpec {
                window: 8,
                horizon_steps: 4,
                feature_columns: vec!["level".into(), "rainfall".into()],
                level_column: "level".into(),
                train_fraction: 0.8,
            },
        )
        .unwrap();
        data.normalize().unwrap();
        data
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let data = tiny_dataset();
        let spec = LstmSpec::new(2, 3);
        let mut config = TrainConfig::new(4, 11);
        config.learning_rate = 0.0;
        let (_, report) = train_classical(spec, &data, &config).unwrap();
        let first = report.epochs.first().unwrap();
        let last = report.epochs.last().unwrap();
        assert_eq!(first.train_loss, last.train_loss);
        assert_eq!(first.val_loss, last.val_loss);

        let model = QtModel::seeded(spec, 1, 11).unwrap();
        let before = model.clone();
        let (after, report) = train_qt(model, &data, &config).unwrap();
        assert_eq!(before.circuit().phi(), after.circuit().phi());
        assert_eq!(before.net().gamma(), after.net().gamma());
        assert_eq!(
            report.epochs.first().unwrap().val_loss,
            report.epochs.last().unwrap().val_loss
        );
    }

    #[test]
    fn same_seed_gives_identical_loss_curves() {
        let data = tiny_dataset();
        let spec = LstmSpec::new(2, 3);
        let config = TrainConfig::new(5, 23);
        let run = || {
            let model = QtModel::seeded(spec, 1, config.seed).unwrap();
            train_qt(model, &data, &config).unwrap().1
        };
        let (a, b) = (run(), run());
        assert_eq!(a.epochs, b.epochs);
    }

    #[test]
    fn best_val_loss_is_the_running_minimum() {
        let data = tiny_dataset();
        let spec = LstmSpec::new(2, 3);
        let config = TrainConfig::new(6, 2);
        let (_, report) = train_classical(spec, &data, &config).unwrap();
        let min = report
            .epochs
            .iter()
            .map(|r| r.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(report.best_val_loss, min);
        assert!(report.epochs.iter().all(|r| r.val_loss.is_finite()));
    }

    #[test]
    fn qt_training_regenerates_identical_predictions() {
        // After training, θ derived from (φ, γ) must reproduce the model's
        // predictions bit for bit: θ is never stored, only regenerated.
        let data = tiny_dataset();
        let spec = LstmSpec::new(2, 2);
        let config = TrainConfig::new(3, 9);
        let model = QtModel::seeded(spec, 1, 9).unwrap();
        let (trained, _) = train_qt(model, &data, &config).unwrap();
        let batch = data.batch(0..6).unwrap();
        let theta_a = trained.generate_theta().unwrap();
        let theta_b = trained.generate_theta().unwrap();
        assert_eq!(theta_a, theta_b);
        let pred_a = lstm::forward(&theta_a, trained.spec(), &batch).unwrap();
        let pred_b = lstm::forward(&theta_b, trained.spec(), &batch).unwrap();
        for (a, b) in pred_a.iter().zip(&pred_b) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn auto_batching_rule() {
        assert_eq!(auto_batch_size(100), 100);
        assert_eq!(auto_batch_size(4096), 4096);
        assert_eq!(auto_batch_size(4097), 64);
    }

    #[test]
    fn learning_curve_csv_shape() {
        let data = tiny_dataset();
        let config = TrainConfig::new(3, 1);
        let (_, report) = train_classical(LstmSpec::new(2, 2), &data, &config).unwrap();
        let csv = report.learning_curve_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epoch,train_loss,val_loss");
        assert_eq!(lines.len(), 4);
        assert!(csv.ends_with('\n'));
    }
}
