//! Fixtures shared by the criterion benches.

use edge_embed::workload::{generate_dag_batch, generate_network, WorkloadSpec};
use edge_embed::{AugmentedDag, EdgeNetwork};

/// Seeded network with `servers` servers and a batch of `dags` augmented DAGs
/// of exactly `size` functions each.
pub fn fixture(servers: usize, size: usize, dags: usize) -> (EdgeNetwork, Vec<AugmentedDag>) {
    let spec = WorkloadSpec {
        n_servers: servers,
        n_dags: dags,
        dag_size_range: (size, size),
        ..Default::default()
    };
    let net = generate_network(&spec).expect("default spec is valid");
    let batch = generate_dag_batch(&spec)
        .expect("default spec is valid")
        .iter()
        .map(|d| d.augment().expect("generated DAGs augment"))
        .collect();
    (net, batch)
}
