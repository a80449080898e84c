//! Semi-supervised training: augmentation, pseudo-label gating, the
//! three-term loss, EMA, the MC-dropout baseline, and the training loop.

mod augment;
mod config;
mod ema;
mod loss;
mod mc_dropout;
mod pseudo;
mod record;
mod train;

pub use augment::{strong_augment, strong_augment_rows, weak_augment, weak_augment_rows};
pub use config::{AugmentConfig, DivergenceKind, JsOrder, SslConfig};
pub use ema::{ema_update, EmaShadow};
pub use loss::{divergence, divergence_var, loss_total, loss_total_var, sample_rows, LossBreakdown, LossInputs, LossVars};
pub use mc_dropout::{mc_dropout_predict, McDropoutConfig, McDropoutModel, SupervisedFit};
pub use pseudo::{select_pseudo_labels, PseudoLabelBatch};
pub use record::{read_metrics_csv, write_metrics_csv, RunRecord, METRICS_HEADER};
pub use train::{accuracy, eval_stream, train_np, train_np_model, LabeledPool, SslData, TrainOutcome, UnlabeledPool};
