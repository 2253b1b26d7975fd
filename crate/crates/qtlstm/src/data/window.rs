//! Sliding-window samples with max-over-horizon targets, chronological
//! train/test split and min-max normalization fitted on the training region
//! only.

use serde::{Deserialize, Serialize};

use crate::data::series::{SeriesTable, Timestamp};
use crate::error::{Error, Result};
use crate::lstm::SequenceBatch;

/// How to cut a [`SeriesTable`] into supervised samples.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    /// Input steps per sample.
    pub window: usize,
    /// Steps ahead over which the target takes the maximum level.
    pub horizon_steps: usize,
    /// Model inputs, in order; must include `level_column`.
    pub feature_columns: Vec<String>,
    pub level_column: String,
    /// Fraction of samples (chronologically first) forming the train split.
    pub train_fraction: f64,
}

/// Min-max statistics of one feature column, fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl ColumnStats {
    pub fn is_constant(&self) -> bool {
        self.max == self.min
    }

    pub fn normalize(&self, v: f64) -> f64 {
        if self.is_constant() {
            0.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        if self.is_constant() {
            self.min
        } else {
            self.min + v * (self.max - self.min)
        }
    }
}

/// Per-column statistics for the whole feature set, plus which column is the
/// level (the target's unit system).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub columns: Vec<ColumnStats>,
    pub level_index: usize,
}

impl NormStats {
    pub fn level(&self) -> &ColumnStats {
        &self.columns[self.level_index]
    }

    /// Maps normalized level-unit values back to their original scale.
    pub fn denormalize_level(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .map(|&v| self.level().denormalize(v))
            .collect()
    }

    /// Names of columns that were constant on the training region.
    pub fn constant_columns(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.is_constant())
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Supervised dataset: S windows of T×F inputs, one scalar target each, a
/// chronological split index and (after [`WindowedDataset::normalize`]) the
/// statistics that map everything to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    inputs: Vec<f64>, // S×T×F row-major
    targets: Vec<f64>,
    timestamps: Vec<Timestamp>, // per sample: start of the forecast horizon
    feature_names: Vec<String>,
    level_index: usize,
    window: usize,
    horizon_steps: usize,
    split_index: usize,
    normalization: Option<NormStats>,
}

/// Cuts the usable region of `table` into sliding windows. Sample s reads
/// rows [s, s+window) and its target is the maximum of the level column over
/// the following `horizon_steps` rows, so every input strictly precedes
/// every row the target looks at.
pub fn make_windows(table: &SeriesTable, spec: &WindowSpec) -> Result<WindowedDataset> {
    if spec.window == 0 || spec.horizon_steps == 0 {
        return Err(Error::Argument(
            "window and horizon_steps must be at least 1".into(),
        ));
    }
    if !(0.0..1.0).contains(&spec.train_fraction) || spec.train_fraction == 0.0 {
        return Err(Error::Argument(format!(
            "train_fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let level_index = spec
        .feature_columns
        .iter()
        .position(|c| *c == spec.level_column)
        .ok_or_else(|| {
            Error::Schema(format!(
                "level column {} must be one of the feature columns",
                spec.level_column
            ))
        })?;

    let start = table.usable_from();
    let usable = table.n_rows() - start;
    if usable < spec.window + spec.horizon_steps + 1 {
        return Err(Error::Data(format!(
            "need more than {} usable rows for window {} + horizon {}, have {usable}",
            spec.window + spec.horizon_steps,
            spec.window,
            spec.horizon_steps
        )));
    }

    let n_features = spec.feature_columns.len();
    let mut feature_data: Vec<Vec<f64>> = Vec::with_capacity(n_features);
    for name in &spec.feature_columns {
        let col = table.column(name)?;
        let mut dense = Vec::with_capacity(usable);
        for (offset, v) in col.values[start..].iter().enumerate() {
            match v {
                Some(x) if x.is_finite() => dense.push(*x),
                _ => {
                    return Err(Error::Data(format!(
                        "column {name} has an unresolved gap at row {}",
                        start + offset
                    )))
                }
            }
        }
        feature_data.push(dense);
    }
    let level = &feature_data[level_index];

    let n_samples = usable - spec.window - spec.horizon_steps + 1;
    let mut inputs = Vec::with_capacity(n_samples * spec.window * n_features);
    let mut targets = Vec::with_capacity(n_samples);
    let mut timestamps = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        for t in s..s + spec.window {
            for col in &feature_data {
                inputs.push(col[t]);
            }
        }
        let horizon = &level[s + spec.window..s + spec.window + spec.horizon_steps];
        targets.push(horizon.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        timestamps.push(table.timestamps()[start + s + spec.window].clone());
    }

    let split_index =
        ((n_samples as f64 * spec.train_fraction).floor() as usize).clamp(1, n_samples - 1);

    Ok(WindowedDataset {
        inputs,
        targets,
        timestamps,
        feature_names: spec.feature_columns.clone(),
        level_index,
        window: spec.window,
        horizon_steps: spec.horizon_steps,
        split_index,
        normalization: None,
    })
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn horizon_steps(&self) -> usize {
        self.horizon_steps
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn level_index(&self) -> usize {
        self.level_index
    }

    /// First sample of the test split.
    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn normalization(&self) -> Option<&NormStats> {
        self.normalization.as_ref()
    }

    fn input_cell(&self, sample: usize, step: usize, feature: usize) -> f64 {
        self.inputs[(sample * self.window + step) * self.n_features() + feature]
    }

    /// Rescales the dataset with previously fitted statistics, e.g. when
    /// evaluating a checkpoint: the test data must pass through the exact
    /// transform the training run fitted.
    pub fn apply_normalization(&mut self, stats: &NormStats) -> Result<()> {
        if self.normalization.is_some() {
            return Err(Error::Argument("dataset is already normalized".into()));
        }
        if stats.columns.len() != self.n_features() || stats.level_index != self.level_index {
            return Err(Error::Shape {
                what: "normalization statistics",
                expected: self.n_features(),
                actual: stats.columns.len(),
            });
        }
        for (stat, name) in stats.columns.iter().zip(&self.feature_names) {
            if stat.name != *name {
                return Err(Error::Schema(format!(
                    "normalization column {} does not match feature {name}",
                    stat.name
                )));
            }
        }
        let n_features = self.n_features();
        for (i, v) in self.inputs.iter_mut().enumerate() {
            *v = stats.columns[i % n_features].normalize(*v);
        }
        for t in self.targets.iter_mut() {
            *t = stats.level().normalize(*t);
        }
        self.normalization = Some(stats.clone());
        Ok(())
    }

    /// Rescales every feature to [0, 1] with min-max statistics computed
    /// from the training inputs only; targets use the level column's
    /// statistics so the cm threshold survives the transform. Constant
    /// columns normalize to zero and are reported by
    /// [`NormStats::constant_columns`].
    pub fn normalize(&mut self) -> Result<&NormStats> {
        if self.normalization.is_some() {
            return Err(Error::Argument("dataset is already normalized".into()));
        }
        let n_features = self.n_features();
        let train_cells = self.split_index * self.window * n_features;
        let mut stats: Vec<ColumnStats> = self
            .feature_names
            .iter()
            .map(|name| ColumnStats {
                name: name.clone(),
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            })
            .collect();
        for (i, v) in self.inputs[..train_cells].iter().enumerate() {
            let s = &mut stats[i % n_features];
            s.min = s.min.min(*v);
            s.max = s.max.max(*v);
        }
        for (i, v) in self.inputs.iter_mut().enumerate() {
            *v = stats[i % n_features].normalize(*v);
        }
        let level = &stats[self.level_index];
        for t in self.targets.iter_mut() {
            *t = level.normalize(*t);
        }
        self.normalization = Some(NormStats {
            columns: stats,
            level_index: self.level_index,
        });
        Ok(self.normalization.as_ref().unwrap())
    }

    /// Assembles the samples in `range` into one batch.
    pub fn batch(&self, range: std::ops::Range<usize>) -> Result<SequenceBatch> {
        let indices: Vec<usize> = range.collect();
        self.batch_of(&indices)
    }

    /// Assembles an arbitrary set of samples into one batch.
    pub fn batch_of(&self, indices: &[usize]) -> Result<SequenceBatch> {
        let n_features = self.n_features();
        let sample_len = self.window * n_features;
        let mut inputs = Vec::with_capacity(indices.len() * sample_len);
        let mut targets = Vec::with_capacity(indices.len());
        for &s in indices {
            if s >= self.len() {
                return Err(Error::Argument(format!(
                    "sample index {s} out of range for {} samples",
                    self.len()
                )));
            }
            inputs.extend_from_slice(&self.inputs[s * sample_len..(s + 1) * sample_len]);
            targets.push(self.targets[s]);
        }
        SequenceBatch::new(inputs, targets, self.window, n_features)
    }

    /// The persistence forecast: for each sample, the level observed at the
    /// last input step. The minimal bar any trained forecaster must clear.
    pub fn persistence_predictions(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        range
            .map(|s| self.input_cell(s, self.window - 1, self.level_index))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::series::{Column, SeriesTable};

    fn table_of(level: Vec<f64>) -> SeriesTable {
        SeriesTable::new(
            (0..level.len() as i64).map(Timestamp::Index).collect(),
            vec![Column {
                name: "level".into(),
                values: level.into_iter().map(Some).collect(),
            }],
        )
        .unwrap()
    }

    fn spec(window: usize, horizon: usize) -> WindowSpec {
        WindowSpec {
            window,
            horizon_steps: horizon,
            feature_columns: vec!["level".into()],
            level_column: "level".into(),
            train_fraction: 0.8,
        }
    }

    #[test]
    fn constant_series_gives_constant_targets() {
        let data = make_windows(&table_of(vec![7.5; 40]), &spec(5, 3)).unwrap();
        assert!(data.targets().iter().all(|&t| t == 7.5));
    }

    #[test]
    fn sample_count_formula() {
        // length − window − horizon + 1
        let data = make_windows(&table_of((0..40).map(f64::from).collect()), &spec(5, 3)).unwrap();
        assert_eq!(data.len(), 40 - 5 - 3 + 1);
    }

    #[test]
    fn too_short_table_is_a_data_error() {
        let r = make_windows(&table_of(vec![1.0; 8]), &spec(5, 3));
        assert!(matches!(r, Err(Error::Data(_))));
    }

    #[test]
    fn spike_lands_in_exactly_the_horizons_that_cover_it() {
        let mut level = vec![1.0; 30];
        level[20] = 99.0;
        let data = make_windows(&table_of(level), &spec(5, 3)).unwrap();
        for s in 0..data.len() {
            let horizon = (s + 5)..(s + 5 + 3);
            let expected = if horizon.contains(&20) { 99.0 } else { 1.0 };
            assert_eq!(data.targets()[s], expected, "sample {s}");
        }
    }

    #[test]
    fn inputs_strictly_precede_targets() {
        let data = make_windows(&table_of((0..50).map(f64::from).collect()), &spec(10, 4)).unwrap();
        // Target of sample s is max over rows [s+10, s+14); last input row
        // is s+9. On the ramp the target must therefore exceed every input.
        for s in 0..data.len() {
            let last_input = data.input_cell(s, 9, 0);
            assert!(data.targets()[s] > last_input);
        }
    }

    #[test]
    fn split_is_chronological() {
        let data = make_windows(&table_of((0..60).map(f64::from).collect()), &spec(5, 2)).unwrap();
        let split = data.split_index();
        assert!(split > 0 && split < data.len());
        let max_train = data.timestamps()[..split].iter().max().unwrap();
        let min_test = data.timestamps()[split..].iter().min().unwrap();
        assert!(max_train < min_test);
    }

    #[test]
    fn normalize_maps_training_range_to_unit_interval() {
        let mut data = make_windows(
            &table_of(vec![0.0, 50.0, 100.0, 0.0, 50.0, 100.0, 0.0, 50.0]),
            &{
                let mut s = spec(2, 1);
                s.train_fraction = 0.99; // all but the last sample
                s
            },
        )
        .unwrap();
        let stats = data.normalize().unwrap().level().clone();
        assert_eq!(stats.min, 0.0);
        assert_eq!(stats.max, 100.0);
        assert_eq!(stats.normalize(50.0), 0.5);
    }

    #[test]
    fn constant_column_normalizes_to_zero_and_is_flagged() {
        let mut table = table_of((0..30).map(f64::from).collect());
        // piggyback a constant covariate
        {
            let base = table.column("level").unwrap().values.len();
            let mut t2 = SeriesTable::new(
                (0..base as i64).map(Timestamp::Index).collect(),
                vec![
                    Column {
                        name: "level".into(),
                        values: table.column("level").unwrap().values.clone(),
                    },
                    Column {
                        name: "flat".into(),
                        values: vec![Some(3.0); base],
                    },
                ],
            )
            .unwrap();
            std::mem::swap(&mut table, &mut t2);
        }
        let mut data = make_windows(
            &table,
            &WindowSpec {
                window: 4,
                horizon_steps: 2,
                feature_columns: vec!["level".into(), "flat".into()],
                level_column: "level".into(),
                train_fraction: 0.8,
            },
        )
        .unwrap();
        let stats = data.normalize().unwrap();
        assert_eq!(stats.constant_columns(), vec!["flat"]);
        for s in 0..data.len() {
            for t in 0..4 {
                assert_eq!(data.input_cell(s, t, 1), 0.0);
            }
        }
    }

    #[test]
    fn normalize_round_trips_within_tolerance() {
        let level: Vec<f64> = (0..50)
            .map(|v| (v as f64 * 0.7).sin() * 80.0 + 60.0)
            .collect();
        let mut data = make_windows(&table_of(level), &spec(6, 3)).unwrap();
        let raw_targets = data.targets().to_vec();
        data.normalize().unwrap();
        let stats = data.normalization().unwrap();
        let back = stats.denormalize_level(data.targets());
        for (orig, round) in raw_targets.iter().zip(&back) {
            assert!((orig - round).abs() < 1e-12);
        }
    }

    #[test]
    fn persistence_reads_the_last_observed_level() {
        let data = make_windows(&table_of((0..30).map(f64::from).collect()), &spec(5, 2)).unwrap();
        let preds = data.persistence_predictions(0..3);
        // Sample s handles rows [s, s+5); last observed level is s+4.
        assert_eq!(preds, vec![4.0, 5.0, 6.0]);
    }
}
