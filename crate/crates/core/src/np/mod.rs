//! Neural-process classifier: latent and deterministic paths, FIFO memory
//! banks, attention over class centers, and `T`-sample prediction.

mod attention;
mod bank;
mod checkpoint;
mod model;
mod prediction;

pub use attention::{attention_aggregate, ClassCenters};
pub use checkpoint::{
    config_hash, Checkpoint, ContextRecord, ParamRecord, TensorRecord, CHECKPOINT_FORMAT_VERSION, MODEL_KIND_NP,
};
pub use bank::{MemoryBank, DEFAULT_BANK_CAPACITY};
pub use model::{one_hot, InferenceContext, LatentMode, NpConfig, NpModel, TrainForward};
pub use prediction::Prediction;
