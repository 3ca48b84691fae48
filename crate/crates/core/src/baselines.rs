//! Comparison schedulers that never split a stream.
//!
//! Both route every cross-server stream whole over the minimum-coefficient
//! path of its server pair. [`placement_only_embed`] reuses the dynamic
//! program with that routing; [`heft_schedule`] is insertion-based HEFT list
//! scheduling, where functions sharing a server run one at a time.

use crate::embedder::{dynamic_embed, EdgeAssignment, EdgeMapping, EmbeddingResult, TransitModel};
use crate::error::{Error, Result};
use crate::model::{processing_time, AugmentedDag, EdgeNetwork};
use crate::pathfind::{PathCatalog, SimplePath};
use crate::{FunctionId, ServerId};

/// The single minimum-coefficient path of every ordered server pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveRoute {
    servers: usize,
    routes: Vec<Option<(SimplePath, f64)>>,
}

impl PassiveRoute {
    pub fn server_count(&self) -> usize {
        self.servers
    }

    /// `None` for same-server pairs.
    pub fn route(&self, src: ServerId, dst: ServerId) -> Option<&SimplePath> {
        self.routes[src * self.servers + dst]
            .as_ref()
            .map(|(p, _)| p)
    }

    /// Seconds per bit of the pair's route, 0 for same-server pairs.
    pub fn coefficient(&self, src: ServerId, dst: ServerId) -> f64 {
        self.routes[src * self.servers + dst]
            .as_ref()
            .map_or(0.0, |(_, a)| *a)
    }

    /// Mean coefficient over all ordered pairs, same-server pairs included.
    pub fn mean_coefficient(&self) -> f64 {
        let total: f64 = self.routes.iter().flatten().map(|(_, a)| a).sum();
        total / (self.servers * self.servers) as f64
    }
}

impl TransitModel for PassiveRoute {
    fn transit(&self, from: ServerId, to: ServerId, bits: f64) -> f64 {
        bits * self.coefficient(from, to)
    }

    fn mapping(&self, from: ServerId, to: ServerId, bits: f64) -> EdgeMapping {
        match &self.routes[from * self.servers + to] {
            None => EdgeMapping::SameServer,
            Some((path, a)) => EdgeMapping::Routed {
                paths: vec![path.clone()],
                coefficients: vec![*a],
                allocations: vec![bits],
            },
        }
    }
}

pub fn passive_routes(catalog: &PathCatalog) -> PassiveRoute {
    let n = catalog.server_count();
    let mut routes = Vec::with_capacity(n * n);
    for src in 0..n {
        for dst in 0..n {
            let set = catalog.pair(src, dst);
            routes.push(
                set.best_single()
                    .map(|k| (set.paths()[k].clone(), set.coefficients()[k])),
            );
        }
    }
    PassiveRoute { servers: n, routes }
}

/// The dynamic program with whole streams on passive routes.
pub fn placement_only_embed(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    routes: &PassiveRoute,
    ready: Option<&[f64]>,
) -> Result<EmbeddingResult> {
    dynamic_embed(dag, net, routes, ready)
}

/// HEFT priorities.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// Indexed by function id.
    pub upward_rank: Vec<f64>,
    /// Mean processing time over all servers, by function id.
    pub avg_exec: Vec<f64>,
    /// Indexed like `dag.edges()`.
    pub avg_comm: Vec<f64>,
}

pub fn rank_table(dag: &AugmentedDag, net: &EdgeNetwork, routes: &PassiveRoute) -> RankTable {
    let servers = net.server_count() as f64;
    let avg_exec: Vec<f64> = (0..dag.len())
        .map(|f| {
            let node = dag.node(f);
            net.servers()
                .iter()
                .map(|s| processing_time(node, s))
                .sum::<f64>()
                / servers
        })
        .collect();
    let mean = routes.mean_coefficient();
    let avg_comm: Vec<f64> = dag.edges().iter().map(|e| e.bits * mean).collect();
    let mut upward_rank = vec![0.0; dag.len()];
    for &f in dag.order().iter().rev() {
        let tail = dag
            .successors(f)
            .iter()
            .map(|&(s, edge)| avg_comm[edge] + upward_rank[s])
            .fold(0.0, f64::max);
        upward_rank[f] = avg_exec[f] + tail;
    }
    RankTable {
        upward_rank,
        avg_exec,
        avg_comm,
    }
}

/// Earliest start of a task of `duration` seconds at or after `from` that
/// fits between the sorted busy intervals.
fn earliest_slot(busy: &[(f64, f64)], from: f64, duration: f64) -> f64 {
    let mut start = from;
    for &(s, e) in busy {
        if start + duration <= s {
            break;
        }
        start = start.max(e);
    }
    start
}

/// Insertion-based HEFT. Functions are taken in decreasing upward rank (ties
/// in topological order) and each goes to the server giving the earliest
/// finish, ties to the smallest server id. Zero-length tasks, the dummy tail
/// among them, never occupy a server. `ready` is each server's initial
/// availability.
pub fn heft_schedule(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    routes: &PassiveRoute,
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
    let ranks = rank_table(dag, net, routes);
    let mut position = vec![0; dag.len()];
    for (k, &f) in dag.order().iter().enumerate() {
        position[f] = k;
    }
    let mut queue: Vec<FunctionId> = dag.order().to_vec();
    queue.sort_by(|&a, &b| {
        ranks.upward_rank[b]
            .total_cmp(&ranks.upward_rank[a])
            .then(position[a].cmp(&position[b]))
    });

    let mut busy: Vec<Vec<(f64, f64)>> = vec![Vec::new(); servers];
    let mut placements: Vec<Option<ServerId>> = vec![None; dag.len()];
    let mut finish = vec![0.0; dag.len()];
    for f in queue {
        let node = dag.node(f);
        let mut best: Option<(f64, f64, ServerId)> = None;
        for server in net.servers() {
            let n = server.id;
            let mut data_ready = ready[n];
            for &(pred, edge) in dag.predecessors(f) {
                let there = placements[pred].expect("ranks order predecessors first");
                let arrival = finish[pred] + routes.transit(there, n, dag.edges()[edge].bits);
                data_ready = data_ready.max(arrival);
            }
            let duration = processing_time(node, server);
            let start = if duration > 0.0 {
                earliest_slot(&busy[n], data_ready, duration)
            } else {
                data_ready
            };
            let eft = start + duration;
            if best.is_none_or(|(b, _, _)| eft < b) {
                best = Some((eft, start, n));
            }
        }
        let (eft, start, n) = best.expect("network has servers");
        if eft > start {
            let slots = &mut busy[n];
            let at = slots.partition_point(|&(s, _)| s < start);
            slots.insert(at, (start, eft));
        }
        placements[f] = Some(n);
        finish[f] = eft;
    }

    let placements: Vec<ServerId> = placements.into_iter().map(Option::unwrap).collect();
    let edge_mappings = dag
        .edges()
        .iter()
        .map(|e| EdgeAssignment {
            src: e.src,
            dst: e.dst,
            mapping: routes.mapping(placements[e.src], placements[e.dst], e.bits),
        })
        .collect();
    Ok(EmbeddingResult {
        makespan: finish[dag.dummy()],
        placements,
        edge_mappings,
        finish_times: finish,
    })
}

/// Edges `(src, dst)` whose destination starts before the source's data has
/// arrived, given each function starts at `finish - processing`.
pub fn precedence_violations(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    result: &EmbeddingResult,
    tol: f64,
) -> Vec<(FunctionId, FunctionId)> {
    let start = |f: FunctionId| {
        result.finish_times[f] - processing_time(dag.node(f), net.server(result.placements[f]))
    };
    result
        .edge_mappings
        .iter()
        .filter(|e| {
            let arrival = result.finish_times[e.src] + e.mapping.transit_time();
            start(e.dst) + tol * arrival.abs().max(1.0) < arrival
        })
        .map(|e| (e.src, e.dst))
        .collect()
}
