//! Joint function placement and multipath stream mapping for DAG workloads on
//! heterogeneous edge networks.
//!
//! The pipeline is: validate an [`EdgeNetwork`] and a [`WorkloadDag`], append
//! a dummy tail with [`augment_dummy_tail`], enumerate every simple path once
//! with [`build_catalog`], then embed with [`dpe_embed`] or one of the
//! baselines.

pub mod baselines;
pub mod embedder;
pub mod error;
pub mod experiment;
pub mod model;
pub mod pathfind;
pub mod report;
pub mod splitter;
pub mod workload;

pub type ServerId = usize;
pub type FunctionId = usize;
pub type LinkId = usize;

pub use embedder::{
    brute_force_embed, dpe_embed, EdgeAssignment, EdgeMapping, EmbeddingResult, TransitModel,
};
pub use error::{Error, Result};
pub use model::{
    augment_dummy_tail, AugmentedDag, DagDocument, EdgeNetwork, FunctionNode, Link,
    NetworkDocument, Server, StreamEdge, WorkloadDag,
};
pub use pathfind::{build_catalog, build_catalog_with_cap, PathCatalog, PathSet, SimplePath};
pub use splitter::{optimal_split, SplitProblem, SplitSolution};
