//! Incremental overlapping community detection by randomized
//! speaker-listener label propagation.

pub mod bsp;
pub mod cover;
pub mod dist;
pub mod error;
pub mod eval;
pub mod graph;
pub mod incremental;
pub mod io;
pub mod labels;
pub mod postprocess;
pub mod rng;
pub mod slpa;
pub mod snapshot;

pub use cover::Cover;
pub use error::{Error, Result};
pub use graph::{apply_batch, BatchMode, EditBatch, Graph, VertexId};
pub use incremental::{correction_propagate, predict_cost, PcFormula, UpdateMetrics};
pub use labels::{run, LabelState};
pub use postprocess::{postprocess, Thresholds};
pub use rng::RngStream;
pub use snapshot::{load_snapshot, save_snapshot, Snapshot};
