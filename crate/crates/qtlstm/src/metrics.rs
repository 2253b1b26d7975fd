//! Forecast evaluation: regression error on the cm scale and the four-way
//! flood-warning classification against a level threshold.

use crate::error::{Error, Result};

/// MSE and MAE over denormalized (cm-scale) predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionMetrics {
    pub mse: f64,
    pub mae: f64,
    pub n_samples: usize,
}

pub fn evaluate_regression(preds: &[f64], actuals: &[f64]) -> Result<RegressionMetrics> {
    if preds.is_empty() {
        return Err(Error::Argument("no samples to evaluate".into()));
    }
    if preds.len() != actuals.len() {
        return Err(Error::Shape {
            what: "regression operands",
            expected: actuals.len(),
            actual: preds.len(),
        });
    }
    let n = preds.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    for (p, a) in preds.iter().zip(actuals) {
        let d = a - p;
        sq += d * d;
        abs += d.abs();
    }
    Ok(RegressionMetrics {
        mse: sq / n,
        mae: abs / n,
        n_samples: preds.len(),
    })
}

/// Per-sample warning outcome percentages. A sample warns when its value
/// strictly exceeds the threshold; the four categories are exhaustive, so
/// the percentages always total 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarningReport {
    /// Predicted and actual both warn.
    pub true_warning_pct: f64,
    /// Predicted warns, actual does not.
    pub false_alert_pct: f64,
    /// Actual warns, prediction misses it.
    pub missed_warning_pct: f64,
    /// Neither warns.
    pub correct_no_warning_pct: f64,
    pub threshold_cm: f64,
    pub n_samples: usize,
}

/// Default flood threshold in cm.
pub const DEFAULT_THRESHOLD_CM: f64 = 100.0;

pub fn classify_warnings(preds: &[f64], actuals: &[f64], threshold: f64) -> Result<WarningReport> {
    if preds.is_empty() {
        return Err(Error::Argument("no samples to classify".into()));
    }
    if preds.len() != actuals.len() {
        return Err(Error::Shape {
            what: "warning operands",
            expected: actuals.len(),
            actual: preds.len(),
        });
    }
    let mut counts = [0usize; 4];
    for (p, a) in preds.iter().zip(actuals) {
        let idx = match (*p > threshold, *a > threshold) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[idx] += 1;
    }
    let n = preds.len() as f64;
    let pct = |c: usize| 100.0 * c as f64 / n;
    Ok(WarningReport {
        true_warning_pct: pct(counts[0]),
        false_alert_pct: pct(counts[1]),
        missed_warning_pct: pct(counts[2]),
        correct_no_warning_pct: pct(counts[3]),
        threshold_cm: threshold,
        n_samples: preds.len(),
    })
}

impl WarningReport {
    pub fn percentages(&self) -> [f64; 4] {
        [
            self.true_warning_pct,
            self.false_alert_pct,
            self.missed_warning_pct,
            self.correct_no_warning_pct,
        ]
    }
}
