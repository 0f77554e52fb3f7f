//! Full-batch training with Adam and early stopping, plus the evaluation
//! metrics and trimmed run statistics.

mod adam;
mod metrics;
mod train;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use metrics::{argmax_rows, evaluate, trimmed_stats, Metrics, TrimmedStats};
pub use train::{train, train_with_context, RunResult, TrainConfig};
