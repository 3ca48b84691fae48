//! Seeded synthetic workloads and JSON ingestion.
//!
//! Randomness comes from ChaCha8 seeded with `WorkloadSpec::seed`. Each
//! artifact draws from its own stream of that seed so changing one never
//! shifts another:
//!
//! | stream | draws |
//! |--------|-------|
//! | 0 | base network: ψ, link coin flips, throughputs |
//! | 1 | DAG structure: sizes, entry counts, predecessor sets |
//! | 2 | DAG weights: flops, stream sizes, output sizes |
//! | 3 + n | servers and links added by [`extend_network`] to an `n`-server network |

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    augment_dummy_tail, AugmentedDag, DagDocument, EdgeNetwork, FunctionNode, Link,
    NetworkDocument, Server, StreamEdge, WorkloadDag,
};
use crate::FunctionId;

/// Network draws before giving up on connectivity.
pub const CONNECTIVITY_ATTEMPTS: usize = 10_000;

const NETWORK_STREAM: u64 = 0;
const STRUCTURE_STREAM: u64 = 1;
const WEIGHT_STREAM: u64 = 2;
const EXTENSION_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub seed: u64,
    pub n_servers: usize,
    /// Probability of a link between any two servers.
    pub connectivity: f64,
    /// flop/s
    pub psi_range: (f64, f64),
    /// bit/s
    pub bandwidth_range: (f64, f64),
    pub n_dags: usize,
    /// Functions per DAG, inclusive.
    pub dag_size_range: (usize, usize),
    pub flops_range: (f64, f64),
    /// bits
    pub stream_range: (f64, f64),
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            seed: 0,
            n_servers: 6,
            connectivity: 0.5,
            psi_range: (2e10, 4e10),
            bandwidth_range: (3e7, 8e7),
            n_dags: 200,
            dag_size_range: (2, 20),
            flops_range: (1e9, 1e10),
            stream_range: (5e6, 1.5e7),
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, (lo, hi): (f64, f64)| {
            if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} must satisfy 0 < lo <= hi, got ({lo}, {hi})"
                )))
            }
        };
        positive("psi_range", self.psi_range)?;
        positive("bandwidth_range", self.bandwidth_range)?;
        positive("flops_range", self.flops_range)?;
        positive("stream_range", self.stream_range)?;
        let (lo, hi) = self.dag_size_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidSpec(format!(
                "dag_size_range must satisfy 1 <= lo <= hi, got ({lo}, {hi})"
            )));
        }
        if self.n_servers == 0 || self.n_dags == 0 {
            return Err(Error::InvalidSpec("counts must be at least 1".into()));
        }
        if !(self.connectivity > 0.0 && self.connectivity <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "connectivity must be in (0, 1], got {}",
                self.connectivity
            )));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Adds servers `first..spec.n_servers` to `servers`/`links`, drawing a coin
/// for every pair that involves a new server until the result is connected.
fn grow(
    rng: &mut ChaCha8Rng,
    spec: &WorkloadSpec,
    mut servers: Vec<Server>,
    links: Vec<Link>,
) -> Result<EdgeNetwork> {
    let first = servers.len();
    for id in first..spec.n_servers {
        servers.push(Server {
            id,
            psi: uniform(rng, spec.psi_range),
        });
    }
    for _ in 0..CONNECTIVITY_ATTEMPTS {
        let mut pairs = Vec::new();
        for v in first.max(1)..spec.n_servers {
            for u in 0..v {
                if rng.gen_bool(spec.connectivity) {
                    pairs.push((u, v));
                }
            }
        }
        let mut candidate = links.clone();
        for (u, v) in pairs {
            candidate.push(Link {
                id: candidate.len(),
                u,
                v,
                throughput: uniform(rng, spec.bandwidth_range),
            });
        }
        match EdgeNetwork::new(servers.clone(), candidate) {
            Ok(net) => return Ok(net),
            Err(Error::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConnectivityUnreachable {
        attempts: CONNECTIVITY_ATTEMPTS,
    })
}

/// Random network with `spec.n_servers` servers where each pair is linked
/// with probability `spec.connectivity`, redrawn until connected.
pub fn generate_network(spec: &WorkloadSpec) -> Result<EdgeNetwork> {
    spec.validate()?;
    grow(&mut spec.rng(NETWORK_STREAM), spec, Vec::new(), Vec::new())
}

/// `base` plus servers up to `spec.n_servers`. Existing servers and links are
/// kept unchanged, so the result is a superset of `base`.
pub fn extend_network(base: &EdgeNetwork, spec: &WorkloadSpec) -> Result<EdgeNetwork> {
    spec.validate()?;
    if spec.n_servers < base.server_count() {
        return Err(Error::InvalidSpec(format!(
            "cannot shrink a {}-server network to {}",
            base.server_count(),
            spec.n_servers
        )));
    }
    let mut rng = spec.rng(EXTENSION_STREAM + base.server_count() as u64);
    grow(
        &mut rng,
        spec,
        base.servers().to_vec(),
        base.links().to_vec(),
    )
}

/// A validated DAG with the output size of every destination function.
#[derive(Debug, Clone, PartialEq)]
pub struct DagInstance {
    pub dag: WorkloadDag,
    pub dst_out: BTreeMap<FunctionId, f64>,
}

impl DagInstance {
    pub fn from_document(doc: DagDocument) -> Result<Self> {
        let (dag, dst_out) = doc.into_parts()?;
        Ok(DagInstance { dag, dst_out })
    }

    pub fn to_document(&self) -> DagDocument {
        DagDocument::from_parts(&self.dag, &self.dst_out)
    }

    /// Augmented DAG with entry functions moved to the front of the order.
    pub fn augment(&self) -> Result<AugmentedDag> {
        augment_dummy_tail(&self.dag.with_entries_first(), &self.dst_out)
    }
}

/// Layered random DAGs. Function ids follow the topological order; the first
/// 1 to 3 functions are the entries, the next one consumes all of them and
/// every later function picks 1 to 3 distinct earlier predecessors, so each
/// DAG is one weakly connected component.
pub fn generate_dag_batch(spec: &WorkloadSpec) -> Result<Vec<DagInstance>> {
    spec.validate()?;
    let mut structure = spec.rng(STRUCTURE_STREAM);
    let mut weights = spec.rng(WEIGHT_STREAM);
    let (lo, hi) = spec.dag_size_range;
    (0..spec.n_dags)
        .map(|_| {
            let size = structure.gen_range(lo..=hi);
            let entries = if size == 1 {
                1
            } else {
                structure.gen_range(1..=(size - 1).min(3))
            };
            let mut arcs: Vec<(usize, usize)> = Vec::new();
            for j in entries..size {
                if j == entries {
                    arcs.extend((0..entries).map(|i| (i, j)));
                } else {
                    let k = structure.gen_range(1..=j.min(3));
                    let mut preds = sample(&mut structure, j, k).into_vec();
                    preds.sort_unstable();
                    arcs.extend(preds.into_iter().map(|i| (i, j)));
                }
            }
            let functions = (0..size)
                .map(|i| FunctionNode::new(i, uniform(&mut weights, spec.flops_range)))
                .collect();
            let edges = arcs
                .into_iter()
                .map(|(i, j)| StreamEdge::new(i, j, uniform(&mut weights, spec.stream_range)))
                .collect();
            let dag = WorkloadDag::new(functions, edges)?;
            let dst_out = dag
                .destinations()
                .into_iter()
                .map(|f| (f, uniform(&mut weights, spec.stream_range)))
                .collect();
            Ok(DagInstance { dag, dst_out })
        })
        .collect()
}

/// Parses a JSON array of DAG documents. Failures name the record index.
pub fn parse_dags(text: &str) -> Result<Vec<DagInstance>> {
    let records: Vec<serde_json::Value> = serde_json::from_str(text)?;
    records
        .into_iter()
        .enumerate()
        .map(|(index, value)| {
            let wrap = |e: Error| Error::Record {
                index,
                source: Box::new(e),
            };
            let doc: DagDocument =
                serde_json::from_value(value).map_err(|e| wrap(Error::from(e)))?;
            DagInstance::from_document(doc).map_err(wrap)
        })
        .collect()
}

pub fn import_dags(path: &Path) -> Result<Vec<DagInstance>> {
    parse_dags(&fs::read_to_string(path)?)
}

pub fn read_network(path: &Path) -> Result<EdgeNetwork> {
    let doc: NetworkDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
    EdgeNetwork::from_document(doc)
}

pub fn write_network(net: &EdgeNetwork, path: &Path) -> Result<()> {
    fs::write(
        path,
        serde_json::to_string_pretty(&net.to_document())? + "\n",
    )?;
    Ok(())
}

pub fn write_dags(dags: &[DagInstance], path: &Path) -> Result<()> {
    let docs: Vec<DagDocument> = dags.iter().map(DagInstance::to_document).collect();
    fs::write(path, serde_json::to_string_pretty(&docs)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_at_full_connectivity() {
        let spec = WorkloadSpec {
            n_servers: 4,
            connectivity: 1.0,
            ..Default::default()
        };
        let net = generate_network(&spec).unwrap();
        assert_eq!(net.link_count(), 6);
    }

    #[test]
    fn defaults_respect_ranges() {
        let spec = WorkloadSpec {
            n_servers: 10,
            ..Default::default()
        };
        let net = generate_network(&spec).unwrap();
        assert!(net.servers().iter().all(|s| (2e10..=4e10).contains(&s.psi)));
        assert!(net
            .links()
            .iter()
            .all(|l| (3e7..=8e7).contains(&l.throughput)));
        for inst in generate_dag_batch(&spec).unwrap() {
            assert!(inst
                .dag
                .functions()
                .iter()
                .all(|f| (1e9..=1e10).contains(&f.flops)));
            assert!(inst
                .dag
                .edges()
                .iter()
                .all(|e| (5e6..=1.5e7).contains(&e.bits)));
            assert!(inst.dst_out.values().all(|b| (5e6..=1.5e7).contains(b)));
            assert!((2..=20).contains(&inst.dag.len()));
        }
    }

    #[test]
    fn same_seed_same_output() {
        let spec = WorkloadSpec::default();
        assert_eq!(
            generate_network(&spec).unwrap(),
            generate_network(&spec).unwrap()
        );
        assert_eq!(
            generate_dag_batch(&spec).unwrap(),
            generate_dag_batch(&spec).unwrap()
        );
        let other = WorkloadSpec {
            seed: 1,
            ..Default::default()
        };
        assert_ne!(
            generate_dag_batch(&spec).unwrap(),
            generate_dag_batch(&other).unwrap()
        );
    }

    #[test]
    fn single_function_batches() {
        let spec = WorkloadSpec {
            dag_size_range: (1, 1),
            n_dags: 5,
            ..Default::default()
        };
        let batch = generate_dag_batch(&spec).unwrap();
        assert_eq!(batch.len(), 5);
        assert!(batch
            .iter()
            .all(|d| d.dag.len() == 1 && d.dag.edges().is_empty()));
    }

    #[test]
    fn generated_dags_are_weakly_connected_with_leading_entries() {
        for inst in generate_dag_batch(&WorkloadSpec::default()).unwrap() {
            let n = inst.dag.len();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for e in inst.dag.edges() {
                let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
                parent[a] = b;
            }
            let root = find(&mut parent, 0);
            assert!((0..n).all(|x| find(&mut parent, x) == root));
            let entries = inst.dag.entries();
            assert_eq!(entries, (0..entries.len()).collect::<Vec<_>>());
            assert!(inst.augment().is_ok());
        }
    }

    #[test]
    fn extension_keeps_the_base() {
        let spec = WorkloadSpec {
            n_servers: 4,
            ..Default::default()
        };
        let base = generate_network(&spec).unwrap();
        let bigger = extend_network(
            &base,
            &WorkloadSpec {
                n_servers: 6,
                ..spec.clone()
            },
        )
        .unwrap();
        assert_eq!(bigger.server_count(), 6);
        assert_eq!(&bigger.servers()[..4], base.servers());
        assert_eq!(&bigger.links()[..base.link_count()], base.links());
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            WorkloadSpec {
                psi_range: (0.0, 1.0),
                ..Default::default()
            },
            WorkloadSpec {
                dag_size_range: (3, 2),
                ..Default::default()
            },
            WorkloadSpec {
                n_dags: 0,
                ..Default::default()
            },
            WorkloadSpec {
                connectivity: 0.0,
                ..Default::default()
            },
        ];
        for spec in bad {
            assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn tiny_connectivity_gives_up() {
        let spec = WorkloadSpec {
            n_servers: 30,
            connectivity: 1e-6,
            ..Default::default()
        };
        assert_eq!(
            generate_network(&spec).unwrap_err(),
            Error::ConnectivityUnreachable {
                attempts: CONNECTIVITY_ATTEMPTS
            }
        );
    }

    #[test]
    fn import_examples() {
        let two = r#"[
            {"functions": [{"id": 0, "flops": 1.0}], "edges": [], "dst_out": {"0": 2.0}},
            {"functions": [{"id": 0, "flops": 1.0}, {"id": 1, "flops": 2.0}],
             "edges": [{"src": 0, "dst": 1, "bits": 3.0}], "dst_out": {"1": 1.0}}
        ]"#;
        assert_eq!(parse_dags(two).unwrap().len(), 2);
        assert!(parse_dags("[]").unwrap().is_empty());

        let cyclic = r#"[
            {"functions": [{"id": 0, "flops": 1.0}], "edges": [], "dst_out": {"0": 2.0}},
            {"functions": [{"id": 0, "flops": 1.0}, {"id": 1, "flops": 2.0}],
             "edges": [{"src": 0, "dst": 1, "bits": 3.0}, {"src": 1, "dst": 0, "bits": 3.0}],
             "dst_out": {}}
        ]"#;
        match parse_dags(cyclic).unwrap_err() {
            Error::Record { index, source } => {
                assert_eq!(index, 1);
                assert!(matches!(*source, Error::CycleDetected { .. }));
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_dags("{"), Err(Error::Schema(_))));
        assert!(matches!(
            parse_dags(r#"[{"functions": 3}]"#),
            Err(Error::Record { index: 0, .. })
        ));
    }
}
