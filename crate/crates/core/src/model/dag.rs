use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::network::Server;
use crate::error::{Error, Result};
use crate::FunctionId;

/// A DAG function with its required floating point operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionNode {
    pub id: FunctionId,
    pub flops: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_dummy: bool,
}

impl FunctionNode {
    pub fn new(id: FunctionId, flops: f64) -> Self {
        FunctionNode {
            id,
            flops,
            is_dummy: false,
        }
    }
}

/// A data stream `src -> dst` of `bits` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamEdge {
    pub src: FunctionId,
    pub dst: FunctionId,
    pub bits: f64,
}

impl StreamEdge {
    pub fn new(src: FunctionId, dst: FunctionId, bits: f64) -> Self {
        StreamEdge { src, dst, bits }
    }
}

/// Processing time of `f` on `server` in seconds. The dummy tail costs
/// nothing wherever it is placed.
pub fn processing_time(f: &FunctionNode, server: &Server) -> f64 {
    if f.is_dummy {
        0.0
    } else {
        f.flops / server.psi
    }
}

/// Validated workload DAG. The order of `functions` is the topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadDag {
    functions: Vec<FunctionNode>,
    edges: Vec<StreamEdge>,
}

impl WorkloadDag {
    pub fn new(functions: Vec<FunctionNode>, edges: Vec<StreamEdge>) -> Result<Self> {
        let dag = WorkloadDag { functions, edges };
        dag.validate()?;
        Ok(dag)
    }

    /// Checks ids, weights, acyclicity and that the stored order is
    /// topological. A cycle is reported before any order violation.
    pub fn validate(&self) -> Result<()> {
        let q = self.functions.len();
        if q == 0 {
            return Err(Error::EmptyDag);
        }
        let mut seen = vec![false; q];
        for f in &self.functions {
            if f.id >= q || seen[f.id] {
                return Err(Error::NonDenseIds(format!(
                    "function id {} in a dag of {q} functions",
                    f.id
                )));
            }
            seen[f.id] = true;
            if !(f.flops.is_finite() && f.flops >= 0.0) || (f.is_dummy && f.flops != 0.0) {
                return Err(Error::InvalidFlops { function: f.id });
            }
        }
        let mut pairs = HashSet::new();
        for e in &self.edges {
            let (src, dst) = (e.src, e.dst);
            if src >= q || dst >= q {
                return Err(Error::UnknownFunction { src, dst });
            }
            if src == dst {
                return Err(Error::SelfEdge { src, dst });
            }
            if !(e.bits.is_finite() && e.bits > 0.0) {
                return Err(Error::NonPositiveStream { src, dst });
            }
            if !pairs.insert((src, dst)) {
                return Err(Error::DuplicateEdge { src, dst });
            }
        }
        if let Some(cycle) = find_cycle(q, &self.edges) {
            return Err(Error::CycleDetected { cycle });
        }
        let position = self.positions();
        for e in &self.edges {
            if position[e.src] >= position[e.dst] {
                return Err(Error::OrderViolation {
                    src: e.src,
                    dst: e.dst,
                });
            }
        }
        Ok(())
    }

    pub fn functions(&self) -> &[FunctionNode] {
        &self.functions
    }

    pub fn edges(&self) -> &[StreamEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// `positions()[id]` is the index of function `id` in the stored order.
    pub fn positions(&self) -> Vec<usize> {
        let mut position = vec![0; self.functions.len()];
        for (i, f) in self.functions.iter().enumerate() {
            position[f.id] = i;
        }
        position
    }

    /// Functions without in-edges, in stored order.
    pub fn entries(&self) -> Vec<FunctionId> {
        let mut has_in = vec![false; self.functions.len()];
        for e in &self.edges {
            has_in[e.dst] = true;
        }
        self.functions
            .iter()
            .map(|f| f.id)
            .filter(|&id| !has_in[id])
            .collect()
    }

    /// Functions without out-edges, in stored order.
    pub fn destinations(&self) -> Vec<FunctionId> {
        let mut has_out = vec![false; self.functions.len()];
        for e in &self.edges {
            has_out[e.src] = true;
        }
        self.functions
            .iter()
            .map(|f| f.id)
            .filter(|&id| !has_out[id])
            .collect()
    }

    /// Stable reordering that moves every entry function to the front. The
    /// result is still a topological order.
    pub fn with_entries_first(&self) -> WorkloadDag {
        let entries: HashSet<_> = self.entries().into_iter().collect();
        let (mut front, back): (Vec<_>, Vec<_>) =
            self.functions.iter().partition(|f| entries.contains(&f.id));
        front.extend(back);
        WorkloadDag {
            functions: front,
            edges: self.edges.clone(),
        }
    }
}

fn find_cycle(q: usize, edges: &[StreamEdge]) -> Option<Vec<FunctionId>> {
    let mut succ = vec![Vec::new(); q];
    for e in edges {
        succ[e.src].push(e.dst);
    }
    for s in &mut succ {
        s.sort_unstable();
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; q];
    let mut stack: Vec<(FunctionId, usize)> = Vec::new();
    for root in 0..q {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push((root, 0));
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = succ[node].get(*next) {
                *next += 1;
                match color[child] {
                    0 => {
                        color[child] = 1;
                        stack.push((child, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(n, _)| n == child).unwrap();
                        let mut cycle: Vec<_> = stack[start..].iter().map(|&(n, _)| n).collect();
                        cycle.push(child);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[node] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// JSON document for a DAG, including the output sizes of destination
/// functions used to weight the dummy-tail edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DagDocument {
    pub functions: Vec<FunctionNode>,
    pub edges: Vec<StreamEdge>,
    #[serde(default)]
    pub dst_out: BTreeMap<FunctionId, f64>,
}

impl DagDocument {
    pub fn into_parts(self) -> Result<(WorkloadDag, BTreeMap<FunctionId, f64>)> {
        Ok((WorkloadDag::new(self.functions, self.edges)?, self.dst_out))
    }

    pub fn from_parts(dag: &WorkloadDag, dst_out: &BTreeMap<FunctionId, f64>) -> Self {
        DagDocument {
            functions: dag.functions.clone(),
            edges: dag.edges.clone(),
            dst_out: dst_out.clone(),
        }
    }

    /// Validates and appends the dummy tail.
    pub fn augment(self) -> Result<AugmentedDag> {
        let (dag, dst_out) = self.into_parts()?;
        augment_dummy_tail(&dag, &dst_out)
    }
}

/// A workload DAG with its dummy tail function appended.
///
/// Function ids `0..Q` are the original functions and `Q` is the dummy.
/// Edge indices `0..|E|` are the original edges in input order, followed by
/// the dummy edges in the stored order of their source functions.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDag {
    base: WorkloadDag,
    dummy: FunctionId,
    dummy_edges: Vec<StreamEdge>,
    nodes: Vec<FunctionNode>,
    order: Vec<FunctionId>,
    edges: Vec<StreamEdge>,
    preds: Vec<Vec<(FunctionId, usize)>>,
    succs: Vec<Vec<(FunctionId, usize)>>,
}

/// Appends the zero-cost dummy tail `f_{Q+1}` with one edge from every
/// destination function, weighted by that function's output size.
pub fn augment_dummy_tail(
    dag: &WorkloadDag,
    dst_out_sizes: &BTreeMap<FunctionId, f64>,
) -> Result<AugmentedDag> {
    dag.validate()?;
    if let Some(f) = dag.functions.iter().find(|f| f.is_dummy) {
        return Err(Error::AlreadyAugmented { function: f.id });
    }
    let dsts = dag.destinations();
    let dst_set: HashSet<_> = dsts.iter().copied().collect();
    if let Some(&function) = dst_out_sizes.keys().find(|id| !dst_set.contains(id)) {
        return Err(Error::UnexpectedOutputSize { function });
    }
    let q = dag.len();
    let mut dummy_edges = Vec::with_capacity(dsts.len());
    for &d in &dsts {
        let bits = *dst_out_sizes
            .get(&d)
            .ok_or(Error::MissingOutputSize { function: d })?;
        if !(bits.is_finite() && bits > 0.0) {
            return Err(Error::NonPositiveStream { src: d, dst: q });
        }
        dummy_edges.push(StreamEdge::new(d, q, bits));
    }

    let mut nodes = vec![FunctionNode::new(0, 0.0); q + 1];
    for f in &dag.functions {
        nodes[f.id] = *f;
    }
    nodes[q] = FunctionNode {
        id: q,
        flops: 0.0,
        is_dummy: true,
    };
    let mut order: Vec<_> = dag.functions.iter().map(|f| f.id).collect();
    order.push(q);

    let edges: Vec<_> = dag.edges.iter().chain(&dummy_edges).copied().collect();
    let mut preds = vec![Vec::new(); q + 1];
    let mut succs = vec![Vec::new(); q + 1];
    for (k, e) in edges.iter().enumerate() {
        preds[e.dst].push((e.src, k));
        succs[e.src].push((e.dst, k));
    }
    for p in preds.iter_mut().chain(succs.iter_mut()) {
        p.sort_unstable();
    }
    Ok(AugmentedDag {
        base: dag.clone(),
        dummy: q,
        dummy_edges,
        nodes,
        order,
        edges,
        preds,
        succs,
    })
}

impl AugmentedDag {
    pub fn base(&self) -> &WorkloadDag {
        &self.base
    }

    pub fn dummy(&self) -> FunctionId {
        self.dummy
    }

    pub fn dummy_edges(&self) -> &[StreamEdge] {
        &self.dummy_edges
    }

    /// Number of functions including the dummy (`Q + 1`).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Topological order of all functions; the dummy is last.
    pub fn order(&self) -> &[FunctionId] {
        &self.order
    }

    pub fn node(&self, id: FunctionId) -> &FunctionNode {
        &self.nodes[id]
    }

    /// All edges `E'` (original edges, then dummy edges).
    pub fn edges(&self) -> &[StreamEdge] {
        &self.edges
    }

    /// `(predecessor, edge index)` pairs, ascending by predecessor id.
    pub fn predecessors(&self, id: FunctionId) -> &[(FunctionId, usize)] {
        &self.preds[id]
    }

    /// `(successor, edge index)` pairs, ascending by successor id.
    pub fn successors(&self, id: FunctionId) -> &[(FunctionId, usize)] {
        &self.succs[id]
    }

    pub fn is_entry(&self, id: FunctionId) -> bool {
        self.preds[id].is_empty()
    }

    pub fn edge_index(&self, src: FunctionId, dst: FunctionId) -> Option<usize> {
        self.succs
            .get(src)?
            .iter()
            .find(|&&(d, _)| d == dst)
            .map(|&(_, k)| k)
    }

    /// Fails unless every entry function precedes every non-entry function in
    /// the stored order.
    pub fn check_entries_leading(&self) -> Result<()> {
        let mut seen_non_entry = false;
        for &f in &self.order {
            if self.is_entry(f) {
                if seen_non_entry {
                    return Err(Error::EntriesNotLeading { function: f });
                }
            } else {
                seen_non_entry = true;
            }
        }
        Ok(())
    }

    /// The augmented graph as a plain DAG, dummy included (flagged).
    pub fn flatten(&self) -> WorkloadDag {
        WorkloadDag {
            functions: self.order.iter().map(|&f| self.nodes[f]).collect(),
            edges: self.edges.clone(),
        }
    }
}
