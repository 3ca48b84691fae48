//! Edge network and workload DAG types.

mod dag;
mod network;

pub use dag::{
    augment_dummy_tail, processing_time, AugmentedDag, DagDocument, FunctionNode, StreamEdge,
    WorkloadDag,
};
pub use network::{EdgeNetwork, Link, NetworkDocument, Server};
