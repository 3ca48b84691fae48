//! Runs every selected algorithm on every DAG of a batch and aggregates the
//! makespans.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{heft_schedule, passive_routes, placement_only_embed, PassiveRoute};
use crate::embedder::{brute_force_embed, dpe_embed, EmbeddingResult};
use crate::error::{Error, Result};
use crate::model::{AugmentedDag, EdgeNetwork};
use crate::pathfind::{build_catalog_with_cap, PathCatalog, DEFAULT_PATH_CAP};
use crate::workload::DagInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dpe,
    Heft,
    PlacementOnly,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dpe,
        Algorithm::Heft,
        Algorithm::PlacementOnly,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dpe => "dpe",
            Algorithm::Heft => "heft",
            Algorithm::PlacementOnly => "placement-only",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                format!("unknown algorithm `{s}` (expected dpe, heft, placement-only or brute)")
            })
    }
}

/// Everything an algorithm may need about one network, built once.
#[derive(Debug, Clone)]
pub struct Testbed<'a> {
    pub net: &'a EdgeNetwork,
    pub catalog: PathCatalog,
    pub routes: PassiveRoute,
}

impl<'a> Testbed<'a> {
    pub fn new(net: &'a EdgeNetwork, path_cap: usize) -> Result<Self> {
        let catalog = build_catalog_with_cap(net, path_cap)?;
        let routes = passive_routes(&catalog);
        Ok(Testbed {
            net,
            catalog,
            routes,
        })
    }

    pub fn embed(
        &self,
        algo: Algorithm,
        dag: &AugmentedDag,
        ready: Option<&[f64]>,
    ) -> Result<EmbeddingResult> {
        match algo {
            Algorithm::Dpe => dpe_embed(dag, self.net, &self.catalog, ready),
            Algorithm::Heft => heft_schedule(dag, self.net, &self.routes, ready),
            Algorithm::PlacementOnly => placement_only_embed(dag, self.net, &self.routes, ready),
            Algorithm::Brute => brute_force_embed(dag, self.net, &self.catalog, ready),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dag_id: usize,
    pub algo: Algorithm,
    pub makespan_s: f64,
    /// Zero unless timing was requested.
    pub runtime_s: f64,
    pub dag_size: usize,
    pub network: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    /// Record wall-clock runtimes. Off by default so reports are byte-stable.
    pub timing: bool,
    pub path_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: vec![Algorithm::Dpe, Algorithm::Heft, Algorithm::PlacementOnly],
            timing: false,
            path_cap: DEFAULT_PATH_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub makespan_s: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub network: String,
    pub algorithms: Vec<Algorithm>,
    /// Sorted by `(dag_id, algo)`.
    pub trials: Vec<TrialRecord>,
    pub mean_makespan: BTreeMap<Algorithm, f64>,
    pub cdf: BTreeMap<Algorithm, Vec<CdfPoint>>,
    /// `(a, b)` maps to `(mean_b - mean_a) / mean_b`.
    pub reduction: BTreeMap<(Algorithm, Algorithm), f64>,
    pub runtime_total_s: BTreeMap<Algorithm, f64>,
}

impl ReportBundle {
    pub fn from_trials(
        network: String,
        algorithms: &[Algorithm],
        mut trials: Vec<TrialRecord>,
    ) -> Self {
        trials.sort_by_key(|t| (t.dag_id, t.algo));
        let mut algorithms = algorithms.to_vec();
        algorithms.sort();
        algorithms.dedup();
        let mut mean_makespan = BTreeMap::new();
        let mut cdf = BTreeMap::new();
        let mut runtime_total_s = BTreeMap::new();
        for &algo in &algorithms {
            let mine: Vec<&TrialRecord> = trials.iter().filter(|t| t.algo == algo).collect();
            let mut spans: Vec<f64> = mine.iter().map(|t| t.makespan_s).collect();
            if !spans.is_empty() {
                mean_makespan.insert(algo, spans.iter().sum::<f64>() / spans.len() as f64);
            }
            cdf.insert(algo, cdf_points(&mut spans));
            runtime_total_s.insert(algo, mine.iter().map(|t| t.runtime_s).sum());
        }
        let mut reduction = BTreeMap::new();
        for (&a, &mean_a) in &mean_makespan {
            for (&b, &mean_b) in &mean_makespan {
                if a != b {
                    reduction.insert((a, b), (mean_b - mean_a) / mean_b);
                }
            }
        }
        ReportBundle {
            network,
            algorithms,
            trials,
            mean_makespan,
            cdf,
            reduction,
            runtime_total_s,
        }
    }

    /// Makespans of one algorithm in DAG order.
    pub fn makespans(&self, algo: Algorithm) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.algo == algo)
            .map(|t| t.makespan_s)
            .collect()
    }
}

/// Sorted makespans paired with the fraction of samples at or below each.
pub fn cdf_points(makespans: &mut [f64]) -> Vec<CdfPoint> {
    makespans.sort_by(f64::total_cmp);
    let n = makespans.len() as f64;
    makespans
        .iter()
        .enumerate()
        .map(|(i, &m)| CdfPoint {
            makespan_s: m,
            fraction: (i + 1) as f64 / n,
        })
        .collect()
}

fn empirical_cdf(sorted: &[f64], t: f64) -> f64 {
    sorted.partition_point(|&x| x <= t) as f64 / sorted.len() as f64
}

/// True when, at every threshold, at least as large a fraction of `a` lies
/// at or below it as of `b`.
pub fn cdf_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .chain(&b)
        .all(|&t| empirical_cdf(&a, t) >= empirical_cdf(&b, t))
}

/// Embeds every DAG with every algorithm on an idle `net`. DAGs run in
/// parallel; the result does not depend on scheduling.
pub fn run_benchmark(
    net: &EdgeNetwork,
    dags: &[DagInstance],
    config: &BenchConfig,
) -> Result<ReportBundle> {
    if config.algorithms.is_empty() {
        return Err(Error::NoAlgorithms);
    }
    let bed = Testbed::new(net, config.path_cap)?;
    let fingerprint = net.fingerprint();
    let per_dag: Vec<Vec<TrialRecord>> = dags
        .par_iter()
        .enumerate()
        .map(|(dag_id, inst)| {
            let wrap = |e: Error| Error::Record {
                index: dag_id,
                source: Box::new(e),
            };
            let dag = inst.augment().map_err(wrap)?;
            config
                .algorithms
                .iter()
                .map(|&algo| {
                    let clock = Instant::now();
                    let result = bed.embed(algo, &dag, None).map_err(wrap)?;
                    let runtime_s = if config.timing {
                        clock.elapsed().as_secs_f64()
                    } else {
                        0.0
                    };
                    Ok(TrialRecord {
                        dag_id,
                        algo,
                        makespan_s: result.makespan,
                        runtime_s,
                        dag_size: inst.dag.len(),
                        network: fingerprint.clone(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(ReportBundle::from_trials(
        fingerprint,
        &config.algorithms,
        per_dag.into_iter().flatten().collect(),
    ))
}
