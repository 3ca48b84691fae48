use super::{
    evaluate_placement, EdgeAssignment, EdgeMapping, EmbeddingResult, MultipathSplit, TransitModel,
};
use crate::error::{Error, Result};
use crate::model::{AugmentedDag, EdgeNetwork};
use crate::pathfind::PathCatalog;
use crate::ServerId;

/// Largest number of placement vectors [`brute_force_embed`] will try.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

/// Exhaustive search over every placement vector of the augmented DAG, with
/// `model` moving each cross-server stream. Vectors are visited in
/// lexicographic order (function 0 most significant) and only strict
/// improvements replace the incumbent.
pub fn brute_force_with<M: TransitModel>(
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
    let placements = (servers as f64).powi(dag.len() as i32);
    if placements > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            placements,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut current: Vec<ServerId> = vec![0; dag.len()];
    let mut best: Option<(f64, Vec<ServerId>, Vec<f64>)> = None;
    loop {
        let finish = evaluate_placement(dag, net, model, &current, &ready);
        let makespan = finish[dag.dummy()];
        if best.as_ref().is_none_or(|(b, _, _)| makespan < *b) {
            best = Some((makespan, current.clone(), finish));
        }
        // odometer increment, last function fastest
        let mut k = current.len();
        loop {
            if k == 0 {
                let (makespan, placements, finish_times) = best.expect("at least one vector");
                let edge_mappings = dag
                    .edges()
                    .iter()
                    .map(|e| {
                        let (from, to) = (placements[e.src], placements[e.dst]);
                        EdgeAssignment {
                            src: e.src,
                            dst: e.dst,
                            mapping: if from == to {
                                EdgeMapping::SameServer
                            } else {
                                model.mapping(from, to, e.bits)
                            },
                        }
                    })
                    .collect();
                return Ok(EmbeddingResult {
                    placements,
                    edge_mappings,
                    finish_times,
                    makespan,
                });
            }
            k -= 1;
            current[k] += 1;
            if current[k] < servers {
                break;
            }
            current[k] = 0;
        }
    }
}

/// Exhaustive search with optimal multipath splitting on every edge.
pub fn brute_force_embed(
    dag: &AugmentedDag,
    net: &EdgeNetwork,
    catalog: &PathCatalog,
    ready: Option<&[f64]>,
) -> Result<EmbeddingResult> {
    brute_force_with(dag, net, &MultipathSplit::new(catalog), ready)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::embedder::dpe_embed;
    use crate::model::{augment_dummy_tail, FunctionNode, Link, Server, StreamEdge, WorkloadDag};
    use crate::pathfind::build_catalog;

    fn two_servers(psi: [f64; 2], b: f64) -> EdgeNetwork {
        EdgeNetwork::new(
            vec![Server { id: 0, psi: psi[0] }, Server { id: 1, psi: psi[1] }],
            vec![Link {
                id: 0,
                u: 0,
                v: 1,
                throughput: b,
            }],
        )
        .unwrap()
    }

    #[test]
    fn single_function_matches_dp() {
        let net = two_servers([1.0, 2.0], 1.0);
        let d = WorkloadDag::new(vec![FunctionNode::new(0, 2.0)], vec![]).unwrap();
        let d = augment_dummy_tail(&d, &BTreeMap::from([(0, 3.0)])).unwrap();
        let catalog = build_catalog(&net).unwrap();
        let brute = brute_force_embed(&d, &net, &catalog, None).unwrap();
        let dp = dpe_embed(&d, &net, &catalog, None).unwrap();
        assert_eq!(brute.placements, dp.placements);
        assert_eq!(brute.makespan, dp.makespan);
    }

    #[test]
    fn two_function_chain_by_hand() {
        // ψ = (1, 4), b = 1; f0 = 4 flop, f1 = 8 flop, stream 2 bits, output 1 bit.
        // Vectors (f0, f1, dummy):
        //   (0,0,0): 4 + 8 = 12          (1,1,1): 1 + 2 = 3
        //   (0,1,1): 4 + 2 + 2 = 8       (1,0,0): 1 + 2 + 8 = 11
        // plus every vector that moves the dummy away, each 1 s worse.
        let net = two_servers([1.0, 4.0], 1.0);
        let d = WorkloadDag::new(
            vec![FunctionNode::new(0, 4.0), FunctionNode::new(1, 8.0)],
            vec![StreamEdge::new(0, 1, 2.0)],
        )
        .unwrap();
        let d = augment_dummy_tail(&d, &BTreeMap::from([(1, 1.0)])).unwrap();
        let catalog = build_catalog(&net).unwrap();
        let r = brute_force_embed(&d, &net, &catalog, None).unwrap();
        assert_eq!(r.placements, vec![1, 1, 1]);
        assert_eq!(r.makespan, 3.0);
        assert_eq!(r.finish_times, vec![1.0, 3.0, 3.0]);
    }

    #[test]
    fn ties_keep_the_lexicographically_first_vector() {
        let net = two_servers([1.0, 1.0], 1.0);
        let d = WorkloadDag::new(vec![FunctionNode::new(0, 1.0)], vec![]).unwrap();
        let d = augment_dummy_tail(&d, &BTreeMap::from([(0, 1.0)])).unwrap();
        let catalog = build_catalog(&net).unwrap();
        let r = brute_force_embed(&d, &net, &catalog, None).unwrap();
        assert_eq!(r.placements, vec![0, 0]);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let net = two_servers([1.0, 1.0], 1.0);
        let funcs = (0..20).map(|i| FunctionNode::new(i, 1.0)).collect();
        let edges = (0..19).map(|i| StreamEdge::new(i, i + 1, 1.0)).collect();
        let d = WorkloadDag::new(funcs, edges).unwrap();
        let d = augment_dummy_tail(&d, &BTreeMap::from([(19, 1.0)])).unwrap();
        let catalog = build_catalog(&net).unwrap();
        assert!(matches!(
            brute_force_embed(&d, &net, &catalog, None),
            Err(Error::TooLarge { .. })
        ));
    }
}
