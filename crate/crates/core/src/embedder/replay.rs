use super::{EdgeAssignment, TransitModel};
use crate::model::{processing_time, AugmentedDag, EdgeNetwork};
use crate::ServerId;

/// Forward simulation of a finished embedding: finish times from the
/// concrete per-path allocations of every edge.
///
/// Entry functions finish at `processing + ready[server]`; every other
/// function finishes at the latest `predecessor finish + transit` plus its own
/// processing time.
pub fn replay(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    placements: &[ServerId],
    mappings: &[EdgeAssignment],
    ready: &[f64],
) -> Vec<f64> {
    forward(dag, net, placements, ready, |edge, _, _| {
        mappings[edge].mapping.transit_time()
    })
}

/// Finish times of a placement vector when every cross-server edge moves
/// through `model`.
pub fn evaluate_placement<M: TransitModel>(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    model: &M,
    placements: &[ServerId],
    ready: &[f64],
) -> Vec<f64> {
    forward(dag, net, placements, ready, |edge, from, to| {
        model.transit(from, to, dag.edges()[edge].bits)
    })
}

fn forward(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    placements: &[ServerId],
    ready: &[f64],
    transit: impl Fn(usize, ServerId, ServerId) -> f64,
) -> Vec<f64> {
    let mut finish = vec![0.0; dag.len()];
    for &f in dag.order() {
        let here = placements[f];
        let processing = processing_time(dag.node(f), net.server(here));
        let start = if dag.is_entry(f) {
            ready[here]
        } else {
            dag.predecessors(f)
                .iter()
                .map(|&(pred, edge)| {
                    let there = placements[pred];
                    let t = if there == here {
                        0.0
                    } else {
                        transit(edge, there, here)
                    };
                    finish[pred] + t
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        finish[f] = start + processing;
    }
    finish
}
