//! Dynamic-network embedding toolkit: per-snapshot static embedders plus
//! temporal models that smooth or transform them across snapshots, and a
//! link-prediction harness for comparing the results.

pub mod bcgd;
pub mod embed;
pub mod linkpred;
pub mod retrofit;
pub mod transform;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod seeds;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use graph::{Snapshot, SnapshotSpec, TemporalGraph, VertexLabels};
pub use linkpred::{evaluate, EvalConfig, HyperConfig, MetricsReport, ModelKind};
