//! Joint function placement and stream mapping.
//!
//! [`dpe_embed`] is the dynamic program over the topological order;
//! [`brute_force_embed`] enumerates every placement vector and is used as an
//! optimality oracle on small instances.

mod brute;
mod dp;
mod replay;

use serde::ser::{Serialize, SerializeStruct, Serializer};

pub use brute::{brute_force_embed, brute_force_with, BRUTE_FORCE_LIMIT};
pub use dp::{
    dpe_embed, dynamic_embed, entry_finish_times, solve_subproblem, ScheduleState, SubproblemResult,
};
pub use replay::{evaluate_placement, replay};

use crate::pathfind::{PathCatalog, SimplePath};
use crate::splitter::{
    bottleneck_time, optimal_split, routing_time, Branch, Routing, SplitProblem,
};
use crate::{FunctionId, ServerId};

/// How a stream crosses the network between two distinct servers.
pub trait TransitModel: Sync {
    /// Seconds to move `bits` from `from` to `to` (`from != to`).
    fn transit(&self, from: ServerId, to: ServerId, bits: f64) -> f64;

    /// The concrete path assignment behind [`TransitModel::transit`].
    fn mapping(&self, from: ServerId, to: ServerId, bits: f64) -> EdgeMapping;
}

/// Splits every stream optimally over all simple paths of the server pair.
#[derive(Debug, Clone, Copy)]
pub struct MultipathSplit<'a> {
    catalog: &'a PathCatalog,
}

impl<'a> MultipathSplit<'a> {
    pub fn new(catalog: &'a PathCatalog) -> Self {
        MultipathSplit { catalog }
    }
}

impl TransitModel for MultipathSplit<'_> {
    fn transit(&self, from: ServerId, to: ServerId, bits: f64) -> f64 {
        bottleneck_time(bits, self.catalog.pair(from, to).conductance())
    }

    fn mapping(&self, from: ServerId, to: ServerId, bits: f64) -> EdgeMapping {
        let set = self.catalog.pair(from, to);
        let problem = SplitProblem::new(set.coefficients().to_vec(), bits)
            .expect("catalog pairs of a connected network have at least one path");
        let split = optimal_split(&problem);
        EdgeMapping::Routed {
            paths: set.paths().to_vec(),
            coefficients: set.coefficients().to_vec(),
            allocations: split.allocations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeMapping {
    /// Both endpoints on one server; nothing crosses the network.
    SameServer,
    Routed {
        paths: Vec<SimplePath>,
        /// Seconds per bit of each path.
        coefficients: Vec<f64>,
        /// Bits sent along each path.
        allocations: Vec<f64>,
    },
}

impl EdgeMapping {
    pub fn transit_time(&self) -> f64 {
        match self {
            EdgeMapping::SameServer => routing_time(Routing::SameServer),
            EdgeMapping::Routed {
                coefficients,
                allocations,
                ..
            } => {
                let branches: Vec<_> = coefficients
                    .iter()
                    .zip(allocations)
                    .map(|(&coefficient, &bits)| Branch { coefficient, bits })
                    .collect();
                routing_time(Routing::Branches(&branches))
            }
        }
    }

    pub fn total_bits(&self) -> f64 {
        match self {
            EdgeMapping::SameServer => 0.0,
            EdgeMapping::Routed { allocations, .. } => allocations.iter().sum(),
        }
    }

    pub fn paths(&self) -> &[SimplePath] {
        match self {
            EdgeMapping::SameServer => &[],
            EdgeMapping::Routed { paths, .. } => paths,
        }
    }

    pub fn allocations(&self) -> &[f64] {
        match self {
            EdgeMapping::SameServer => &[],
            EdgeMapping::Routed { allocations, .. } => allocations,
        }
    }
}

/// Mapping of one edge of the augmented DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAssignment {
    pub src: FunctionId,
    pub dst: FunctionId,
    pub mapping: EdgeMapping,
}

/// A complete embedding. Vectors are indexed by function id (the dummy tail
/// included) and `edge_mappings` follows the edge order of the augmented DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub placements: Vec<ServerId>,
    pub edge_mappings: Vec<EdgeAssignment>,
    pub finish_times: Vec<f64>,
    pub makespan: f64,
}

impl Serialize for EmbeddingResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct EdgeView<'a> {
            src: FunctionId,
            dst: FunctionId,
            paths: Vec<&'a [ServerId]>,
            z: &'a [f64],
        }
        let edges: Vec<_> = self
            .edge_mappings
            .iter()
            .map(|e| EdgeView {
                src: e.src,
                dst: e.dst,
                paths: e.mapping.paths().iter().map(SimplePath::nodes).collect(),
                z: e.mapping.allocations(),
            })
            .collect();
        let mut s = serializer.serialize_struct("EmbeddingResult", 4)?;
        s.serialize_field("placements", &self.placements)?;
        s.serialize_field("edges", &edges)?;
        s.serialize_field("finish_times", &self.finish_times)?;
        s.serialize_field("makespan", &self.makespan)?;
        s.end()
    }
}
