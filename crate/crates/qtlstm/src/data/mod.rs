//! Time-series ingestion and preparation: CSV tables, lag features, sliding
//! windows with max-over-horizon targets, train-split normalization and a
//! synthetic flood-like generator.

mod series;
mod synth;
mod window;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use series::{lag_column_name, load_csv, Column, CsvSchema, SeriesTable, Timestamp};
pub use synth::synth_flood_series;
pub use window::{make_windows, ColumnStats, NormStats, WindowSpec, WindowedDataset};

/// Everything needed to turn a raw CSV into model-ready windows, in a form
/// that travels inside checkpoints so evaluation rebuilds the identical
/// pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRecipe {
    pub level_column: String,
    /// Base feature columns as they appear in the CSV; lag columns are
    /// derived on top of these.
    pub feature_columns: Vec<String>,
    /// Lags (in steps) of the level column appended as extra features.
    pub lags: Vec<usize>,
    pub window: usize,
    pub horizon_steps: usize,
    pub train_fraction: f64,
    /// Chronological tail of the training range held out for validation.
    pub validation_fraction: f64,
}

impl DataRecipe {
    pub fn csv_schema(&self) -> CsvSchema {
        CsvSchema {
            level_column: self.level_column.clone(),
            feature_columns: self.feature_columns.clone(),
        }
    }

    /// Model input columns: the base features followed by the lagged copies
    /// of the level column.
    pub fn model_features(&self) -> Vec<String> {
        let mut features = self.feature_columns.clone();
        for &lag in &self.lags {
            features.push(lag_column_name(&self.level_column, lag));
        }
        features
    }

    /// Width F of the model input.
    pub fn n_features(&self) -> usize {
        self.feature_columns.len() + self.lags.len()
    }

    fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            window: self.window,
            horizon_steps: self.horizon_steps,
            feature_columns: self.model_features(),
            level_column: self.level_column.clone(),
            train_fraction: self.train_fraction,
        }
    }

    /// Full preparation short of normalization: impute gaps, append lag
    /// columns, cut windows. Returns the dataset and how many gap cells were
    /// imputed.
    pub fn prepare(&self, mut table: SeriesTable) -> Result<(WindowedDataset, usize)> {
        let filled = table.fill_missing()?;
        if !self.lags.is_empty() {
            table.add_lag_features(&self.level_column, &self.lags)?;
        }
        let dataset = make_windows(&table, &self.window_spec())?;
        Ok((dataset, filled))
    }
}
