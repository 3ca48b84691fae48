#![allow(dead_code)]

use std::collections::BTreeMap;

use edge_embed::{
    augment_dummy_tail, AugmentedDag, EdgeNetwork, FunctionNode, Link, Server, StreamEdge,
    WorkloadDag,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn network(psi: &[f64], links: &[(usize, usize, f64)]) -> EdgeNetwork {
    EdgeNetwork::new(
        psi.iter()
            .enumerate()
            .map(|(id, &psi)| Server { id, psi })
            .collect(),
        links
            .iter()
            .enumerate()
            .map(|(id, &(u, v, b))| Link {
                id,
                u,
                v,
                throughput: b,
            })
            .collect(),
    )
    .unwrap()
}

pub fn complete(n: usize) -> EdgeNetwork {
    let mut links = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            links.push((u, v, 1.0));
        }
    }
    network(&vec![1.0; n], &links)
}

/// Connected network on `n` servers; each pair is linked with probability `p`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, p: f64) -> EdgeNetwork {
    loop {
        let psi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=4.0)).collect();
        let mut links = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    links.push((u, v, rng.gen_range(0.5..=8.0)));
                }
            }
        }
        let servers = psi
            .iter()
            .enumerate()
            .map(|(id, &psi)| Server { id, psi })
            .collect();
        let links = links
            .into_iter()
            .enumerate()
            .map(|(id, (u, v, b))| Link {
                id,
                u,
                v,
                throughput: b,
            })
            .collect();
        if let Ok(net) = EdgeNetwork::new(servers, links) {
            return net;
        }
    }
}

/// Random DAG on `q` functions in id order. `single_successor` limits every
/// function to one outgoing edge.
pub fn random_dag(rng: &mut ChaCha8Rng, q: usize, single_successor: bool) -> AugmentedDag {
    let mut edges = Vec::new();
    for i in 0..q.saturating_sub(1) {
        if single_successor {
            if rng.gen_bool(0.8) {
                edges.push(StreamEdge::new(
                    i,
                    rng.gen_range(i + 1..q),
                    rng.gen_range(0.1..=3.0),
                ));
            }
        } else {
            for j in i + 1..q {
                if rng.gen_bool(0.5) {
                    edges.push(StreamEdge::new(i, j, rng.gen_range(0.1..=3.0)));
                }
            }
        }
    }
    let functions = (0..q)
        .map(|i| FunctionNode::new(i, rng.gen_range(0.5..=5.0)))
        .collect();
    let dag = WorkloadDag::new(functions, edges)
        .unwrap()
        .with_entries_first();
    let dst_out: BTreeMap<_, _> = dag
        .destinations()
        .into_iter()
        .map(|f| (f, rng.gen_range(0.1..=3.0)))
        .collect();
    augment_dummy_tail(&dag, &dst_out).unwrap()
}

pub fn ready_times(rng: &mut ChaCha8Rng, servers: usize) -> Vec<f64> {
    (0..servers).map(|_| rng.gen_range(0.0..=4.0)).collect()
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}
