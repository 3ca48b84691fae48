//! Dynamic program over the topological order.
//!
//! For every function `f` and every server `n`, `best_finish[f][n]` is the
//! earliest finish time of `f` on `n`:
//!
//! ```text
//! T*(f, n) = max_{pred i} min_m ( T*(i, m) + transit(i -> f, m, n) ) + c_f / ψ_n
//! ```
//!
//! with entry functions finishing at `c_f / ψ_n + ready[n]`. The inner
//! minimum picks the predecessor's server independently for every `n`. A
//! predecessor feeding several functions has to end up on a single server, so
//! the first time such a predecessor is resolved its placement is committed
//! (at the server minimizing the resolving function's finish time) and every
//! later evaluation reuses it. The committed placement is applied to the
//! resolving function's own row as well, which keeps every stored value
//! reachable by a consistent embedding.

use super::{EdgeAssignment, EdgeMapping, EmbeddingResult, MultipathSplit, TransitModel};
use crate::error::{Error, Result};
use crate::model::{processing_time, AugmentedDag, EdgeNetwork};
use crate::pathfind::{PathCatalog, SimplePath};
use crate::splitter::{optimal_split, SplitProblem, SplitSolution};
use crate::{FunctionId, ServerId};

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleState {
    /// `best_finish[f][n]`: earliest finish of `f` on server `n`, once known.
    pub best_finish: Vec<Option<Vec<f64>>>,
    /// Committed placement of functions that feed several successors.
    pub decided_placement: Vec<Option<ServerId>>,
    /// Time each server becomes free for entry functions.
    pub server_ready: Vec<f64>,
}

impl ScheduleState {
    pub fn new(functions: usize, server_ready: Vec<f64>) -> Self {
        ScheduleState {
            best_finish: vec![None; functions],
            decided_placement: vec![None; functions],
            server_ready,
        }
    }

    pub fn idle(functions: usize, servers: usize) -> Self {
        Self::new(functions, vec![0.0; servers])
    }

    /// Commits `f` to `server` unless it is already committed. Returns whether
    /// the commit took effect.
    pub fn commit(&mut self, f: FunctionId, server: ServerId) -> bool {
        if self.decided_placement[f].is_some() {
            return false;
        }
        self.decided_placement[f] = Some(server);
        true
    }
}

/// Fills `best_finish[f]` for an entry function.
pub fn entry_finish_times(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    state: &mut ScheduleState,
    f: FunctionId,
) -> Result<()> {
    if !dag.is_entry(f) {
        return Err(Error::NotEntry(f));
    }
    let node = dag.node(f);
    let row = net
        .servers()
        .iter()
        .map(|s| processing_time(node, s) + state.server_ready[s.id])
        .collect();
    state.best_finish[f] = Some(row);
    Ok(())
}

/// Best `T*(pred, m) + transit(m, fixed_dst)` over admissible source servers
/// `m`, with the chosen `m`. Ties go to the smallest server id.
fn source_cost<M: TransitModel>(
    model: &M,
    state: &ScheduleState,
    pred: FunctionId,
    bits: f64,
    fixed_dst: ServerId,
) -> Result<(f64, ServerId)> {
    let row = state.best_finish[pred]
        .as_ref()
        .ok_or(Error::UnpopulatedPredecessor(pred))?;
    let hop = |m: ServerId| {
        if m == fixed_dst {
            0.0
        } else {
            model.transit(m, fixed_dst, bits)
        }
    };
    if let Some(m) = state.decided_placement[pred] {
        return Ok((row[m] + hop(m), m));
    }
    let mut best = (f64::INFINITY, 0);
    for (m, &t) in row.iter().enumerate() {
        let v = t + hop(m);
        if v < best.0 {
            best = (v, m);
        }
    }
    Ok(best)
}

/// Optimum of one (predecessor, function) subproblem with the function's
/// server fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult<'a> {
    /// Predecessor finish + transit + processing on `fixed_dst`.
    pub phi: f64,
    pub src_server: ServerId,
    /// Paths carrying the stream; empty when co-located.
    pub paths: &'a [SimplePath],
    /// `None` when co-located.
    pub split: Option<SplitSolution>,
    pub transit: f64,
}

/// Solves the subproblem for `edge = (f_i, f_j)` with `f_j` on `fixed_dst`,
/// splitting the stream over every simple path.
pub fn solve_subproblem<'a>(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    catalog: &'a PathCatalog,
    state: &ScheduleState,
    edge: (FunctionId, FunctionId),
    fixed_dst: ServerId,
) -> Result<SubproblemResult<'a>> {
    let (src, dst) = edge;
    let k = dag
        .edge_index(src, dst)
        .ok_or(Error::NoSuchEdge { src, dst })?;
    let bits = dag.edges()[k].bits;
    let model = MultipathSplit::new(catalog);
    let (arrival, src_server) = source_cost(&model, state, src, bits, fixed_dst)?;
    let processing = processing_time(dag.node(dst), net.server(fixed_dst));
    let (paths, split, transit): (&[SimplePath], _, _) = if src_server == fixed_dst {
        (&[], None, 0.0)
    } else {
        let set = catalog.pair(src_server, fixed_dst);
        let split = optimal_split(&SplitProblem::new(set.coefficients().to_vec(), bits)?);
        let transit = split.bottleneck_time;
        (set.paths(), Some(split), transit)
    };
    Ok(SubproblemResult {
        phi: arrival + processing,
        src_server,
        paths,
        split,
        transit,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

type Row = (Vec<f64>, Vec<Vec<ServerId>>);

/// `T*(f, n)` for every server, with the source server of each predecessor
/// (in `dag.predecessors(f)` order) per `n`.
fn evaluate_row<M: TransitModel>(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    model: &M,
    state: &ScheduleState,
    f: FunctionId,
) -> Result<Row> {
    let preds = dag.predecessors(f);
    let mut row = Vec::with_capacity(net.server_count());
    let mut sources = Vec::with_capacity(net.server_count());
    for server in net.servers() {
        let mut latest = f64::NEG_INFINITY;
        let mut chosen = Vec::with_capacity(preds.len());
        for &(pred, edge) in preds {
            let (arrival, m) = source_cost(model, state, pred, dag.edges()[edge].bits, server.id)?;
            latest = latest.max(arrival);
            chosen.push(m);
        }
        row.push(latest + processing_time(dag.node(f), server));
        sources.push(chosen);
    }
    Ok((row, sources))
}

/// Runs the dynamic program with an arbitrary transit model and recovers the
/// winning embedding by back-tracing from the dummy tail.
///
/// Requires every entry function to precede every non-entry function in the
/// stored order (see [`crate::model::WorkloadDag::with_entries_first`]).
pub fn dynamic_embed<M: TransitModel>(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    model: &M,
    ready: Option<&[f64]>,
) -> Result<EmbeddingResult> {
    let servers = net.server_count();
    let ready = match ready {
        Some(r) if r.len() != servers => {
            return Err(Error::ReadyLength {
                expected: servers,
                got: r.len(),
            })
        }
        Some(r) => r.to_vec(),
        None => vec![0.0; servers],
    };
    dag.check_entries_leading()?;

    let mut state = ScheduleState::new(dag.len(), ready);
    let mut choice: Vec<Vec<Vec<ServerId>>> = vec![Vec::new(); dag.len()];
    for &f in dag.order() {
        if dag.is_entry(f) {
            entry_finish_times(dag, net, &mut state, f)?;
            continue;
        }
        let (mut row, mut sources) = evaluate_row(dag, net, model, &state, f)?;
        let shared: Vec<(usize, FunctionId)> = dag
            .predecessors(f)
            .iter()
            .enumerate()
            .filter(|&(_, &(p, _))| {
                state.decided_placement[p].is_none() && dag.successors(p).len() > 1
            })
            .map(|(k, &(p, _))| (k, p))
            .collect();
        if !shared.is_empty() {
            let anchor = argmin(&row);
            for (k, p) in shared {
                state.commit(p, sources[anchor][k]);
            }
            (row, sources) = evaluate_row(dag, net, model, &state, f)?;
        }
        state.best_finish[f] = Some(row);
        choice[f] = sources;
    }

    let dummy = dag.dummy();
    let tail = state.best_finish[dummy]
        .as_ref()
        .expect("dummy tail is processed last");
    let anchor = argmin(tail);
    let makespan = tail[anchor];

    let mut placements: Vec<Option<ServerId>> = vec![None; dag.len()];
    placements[dummy] = Some(anchor);
    let mut mappings: Vec<Option<EdgeAssignment>> = vec![None; dag.edges().len()];
    for &f in dag.order().iter().rev() {
        let here = placements[f].expect("every function reaches the dummy tail");
        for (k, &(pred, edge)) in dag.predecessors(f).iter().enumerate() {
            let src = choice[f][here][k];
            debug_assert!(placements[pred].is_none_or(|p| p == src));
            placements[pred] = Some(src);
            let mapping = if src == here {
                EdgeMapping::SameServer
            } else {
                model.mapping(src, here, dag.edges()[edge].bits)
            };
            mappings[edge] = Some(EdgeAssignment {
                src: pred,
                dst: f,
                mapping,
            });
        }
    }
    let placements: Vec<ServerId> = placements.into_iter().map(Option::unwrap).collect();
    let finish_times = placements
        .iter()
        .enumerate()
        .map(|(f, &p)| state.best_finish[f].as_ref().unwrap()[p])
        .collect();
    Ok(EmbeddingResult {
        placements,
        edge_mappings: mappings.into_iter().map(Option::unwrap).collect(),
        finish_times,
        makespan,
    })
}

/// Embedding with optimal multipath splitting of every stream.
pub fn dpe_embed(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    catalog: &PathCatalog,
    ready: Option<&[f64]>,
) -> Result<EmbeddingResult> {
    dynamic_embed(dag, net, &MultipathSplit::new(catalog), ready)
}
