//! Synthetic datasets, stratified semi-supervised splits and exponentially
//! imbalanced subsampling.

mod generate;
mod io;
mod split;

pub use generate::{class_counts, generate, standard_normal, Dataset, DatasetSpec, GeneratorKind};
pub use io::{load_dataset, read_dataset_csv, save_dataset, sidecar_path, write_dataset_csv};
pub use split::{imbalanced_counts, make_imbalanced, split_ssl, LabelBudget, SslSplit};
