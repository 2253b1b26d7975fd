//! Flat key = value run configuration.
//!
//! One text file drives data preparation, model shape, training and
//! evaluation. Lines are `key = value`; blank lines and lines starting with
//! `#` are ignored. Unknown keys are rejected so typos surface immediately.
//! Every key has a default (listed in the README); command-line flags
//! override file values.

use std::path::{Path, PathBuf};

use crate::data::DataRecipe;
use crate::error::{Error, Result};
use crate::train::TrainConfig;

/// Environment variable naming the default config file.
pub const CONFIG_ENV_VAR: &str = "QTLSTM_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Dataset CSV; may instead come from the `--data` flag.
    pub data_csv: Option<PathBuf>,
    pub level_column: String,
    pub feature_columns: Vec<String>,
    pub lags: Vec<usize>,
    pub window: usize,
    pub horizon_steps: usize,
    pub train_fraction: f64,
    pub validation_fraction: f64,

    pub hidden_dim: usize,
    pub n_block: usize,
    /// Hidden widths of the mapping net; `None` uses the 2·N default.
    pub mapping_hidden_dims: Option<Vec<usize>>,

    pub epochs: usize,
    /// 0 selects the automatic rule (full batch up to 4096 fit samples,
    /// else 64).
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: String,
    pub seed: u64,
    pub gradient_clip: Option<f64>,

    pub threshold_cm: f64,

    pub synth_length: usize,
    pub synth_seed: u64,
    pub synth_spike_rate: f64,
    pub synth_noise: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_csv: None,
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
            hidden_dim: 24,
            n_block: 2,
            mapping_hidden_dims: None,
            epochs: 200,
            batch_size: 0,
            learning_rate: 1e-3,
            optimizer: "adam".into(),
            seed: 1,
            gradient_clip: None,
            threshold_cm: 100.0,
            synth_length: 2000,
            synth_seed: 1,
            synth_spike_rate: 0.012,
            synth_noise: 1.5,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_list_usize(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse::<usize>(key, s))
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = RunConfig::default();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected key = value, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            config.set(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data_csv" => self.data_csv = Some(PathBuf::from(value)),
            "level_column" => self.level_column = value.to_string(),
            "feature_columns" => {
                self.feature_columns = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "lags" => self.lags = parse_list_usize(key, value)?,
            "window" => self.window = parse(key, value)?,
            "horizon_steps" => self.horizon_steps = parse(key, value)?,
            "train_fraction" => self.train_fraction = parse(key, value)?,
            "validation_fraction" => self.validation_fraction = parse(key, value)?,
            "hidden_dim" => self.hidden_dim = parse(key, value)?,
            "n_block" => self.n_block = parse(key, value)?,
            "mapping_hidden_dims" => self.mapping_hidden_dims = Some(parse_list_usize(key, value)?),
            "epochs" => self.epochs = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "optimizer" => self.optimizer = value.to_string(),
            "seed" => self.seed = parse(key, value)?,
            "gradient_clip" => self.gradient_clip = Some(parse(key, value)?),
            "threshold_cm" => self.threshold_cm = parse(key, value)?,
            "synth_length" => self.synth_length = parse(key, value)?,
            "synth_seed" => self.synth_seed = parse(key, value)?,
            "synth_spike_rate" => self.synth_spike_rate = parse(key, value)?,
            "synth_noise" => self.synth_noise = parse(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown config key {other}")));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.feature_columns.is_empty() {
            return Err(Error::Config("feature_columns must not be empty".into()));
        }
        if !self.feature_columns.contains(&self.level_column) {
            return Err(Error::Config(format!(
                "level_column {} must appear in feature_columns",
                self.level_column
            )));
        }
        if self.window == 0 || self.horizon_steps == 0 {
            return Err(Error::Config(
                "window and horizon_steps must be positive".into(),
            ));
        }
        if self.hidden_dim == 0 || self.n_block == 0 {
            return Err(Error::Config(
                "hidden_dim and n_block must be positive".into(),
            ));
        }
        self.optimizer.parse::<crate::train::Optimizer>()?;
        Ok(())
    }

    pub fn recipe(&self) -> DataRecipe {
        DataRecipe {
            level_column: self.level_column.clone(),
            feature_columns: self.feature_columns.clone(),
            lags: self.lags.clone(),
            window: self.window,
            horizon_steps: self.horizon_steps,
            train_fraction: self.train_fraction,
            validation_fraction: self.validation_fraction,
        }
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            optimizer: self.optimizer.parse()?,
            seed: self.seed,
            gradient_clip: self.gradient_clip,
            validation_fraction: self.validation_fraction,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(name: &str, body: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("qtlstm_config_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn defaults_parse_from_an_empty_file() {
        let path = write_config("empty.conf", "# nothing but comments\n\n");
        let config = RunConfig::from_file(&path).unwrap();
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn keys_override_defaults() {
        let path = write_config(
            "override.conf",
            "epochs = 12\nlags = 2, 4\nseed = 99\nlearning_rate = 0.01\n",
        );
        let config = RunConfig::from_file(&path).unwrap();
        assert_eq!(config.epochs, 12);
        assert_eq!(config.lags, vec![2, 4]);
        assert_eq!(config.seed, 99);
        assert_eq!(config.learning_rate, 0.01);
        assert_eq!(config.window, 30);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let path = write_config("typo.conf", "epocs = 12\n");
        assert!(matches!(RunConfig::from_file(&path), Err(Error::Config(_))));
    }

    #[test]
    fn bad_value_is_rejected() {
        let path = write_config("badvalue.conf", "epochs = soon\n");
        assert!(matches!(RunConfig::from_file(&path), Err(Error::Config(_))));
    }

    #[test]
    fn level_column_must_be_a_feature() {
        let path = write_config(
            "nolevel.conf",
            "level_column = stage\nfeature_columns = level,discharge\n",
        );
        assert!(matches!(RunConfig::from_file(&path), Err(Error::Config(_))));
    }

    #[test]
    fn recipe_features_append_lag_columns() {
        let config = RunConfig::default();
        let recipe = config.recipe();
        let features = recipe.model_features();
        assert_eq!(features.len(), 8);
        assert_eq!(features[4], "level_lag1");
        assert_eq!(features[7], "level_lag7");
    }
}
