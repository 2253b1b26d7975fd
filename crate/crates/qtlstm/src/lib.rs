//! Parameter-efficient LSTM forecasting through generated weights.
//!
//! A classical LSTM with M weights is driven by a much smaller trainable
//! core: an exactly simulated N-qubit circuit (N = ⌈log₂ M⌉) whose 2^N
//! measurement probabilities, paired with their basis-bit encodings, pass
//! through a small mapping network that emits one LSTM weight per basis
//! state. Training backpropagates the forecast loss through the LSTM, the
//! mapping network and the circuit, updating only the circuit angles φ and
//! mapping weights γ — a parameter count polynomial in log₂ M instead of M.
//! After training, the generated weights form an ordinary LSTM that runs
//! anywhere.
//!
//! The crate ships the whole experiment loop for flood-level forecasting:
//! data synthesis and CSV ingestion, lag features and sliding windows,
//! training for both the generated-weight route and the directly-trained
//! baseline, regression metrics and the four-way flood-warning report.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --release --example circuit_probabilities
//! cargo run --release --example gradient_check
//! cargo run --release --example generate_weights
//! cargo run --release --example parameter_scaling
//! cargo run --release --example synth_dataset
//! cargo run --release --example train_forecaster
//! cargo run --release --example compare_routes
//! cargo run --release --example flood_warnings
//! ```
//!
//! or with the bundled CLI:
//!
//! ```text
//! qtlstm synth-data --out flood.csv
//! qtlstm train --mode qt --data flood.csv --out-dir runs
//! qtlstm evaluate --checkpoint runs/checkpoint_qt.json --data flood.csv
//! ```

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod data;
mod error;
pub mod lstm;
pub mod mapping;
pub mod metrics;
pub mod model;
pub mod sim;
pub mod train;

pub use error::{Error, Result};
