//! Simple-path enumeration between server pairs and per-path cost
//! coefficients.
//!
//! Enumeration is a recursive depth-first search that pushes a node onto the
//! current path and the visited set before descending into unvisited
//! neighbors, and pops it on the way back. Every call is counted so callers
//! can check the factorial worst case on complete graphs.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::EdgeNetwork;
use crate::{LinkId, ServerId};

/// Default cap on the number of paths stored in one catalog.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// A loop-free path: `nodes[k]` and `nodes[k + 1]` are joined by `links[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplePath {
    nodes: Vec<ServerId>,
    links: Vec<LinkId>,
}

impl SimplePath {
    pub fn nodes(&self) -> &[ServerId] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn src(&self) -> ServerId {
        self.nodes[0]
    }

    pub fn dst(&self) -> ServerId {
        *self.nodes.last().unwrap()
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    pub fn reversed(&self) -> SimplePath {
        SimplePath {
            nodes: self.nodes.iter().rev().copied().collect(),
            links: self.links.iter().rev().copied().collect(),
        }
    }

    fn canonical_key(&self) -> (usize, &[ServerId]) {
        (self.nodes.len(), &self.nodes)
    }
}

impl fmt::Display for SimplePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Seconds per bit along `path`: the sum of `1 / b_l` over its links, in
/// path order.
pub fn path_coefficient(path: &SimplePath, net: &EdgeNetwork) -> f64 {
    path.links
        .iter()
        .map(|&l| 1.0 / net.link(l).throughput)
        .sum()
}

struct Rpf<'a> {
    net: &'a EdgeNetwork,
    target: ServerId,
    visited: Vec<bool>,
    nodes: Vec<ServerId>,
    links: Vec<LinkId>,
    found: Vec<SimplePath>,
    calls: u64,
    stored: &'a AtomicUsize,
    cap: usize,
}

impl Rpf<'_> {
    fn visit(&mut self, n: ServerId, via: Option<LinkId>) -> Result<()> {
        self.calls += 1;
        if let Some(l) = via {
            self.links.push(l);
        }
        if n == self.target {
            if self.stored.fetch_add(1, Ordering::Relaxed) >= self.cap {
                return Err(Error::PathExplosion { cap: self.cap });
            }
            let mut nodes = self.nodes.clone();
            nodes.push(n);
            self.found.push(SimplePath {
                nodes,
                links: self.links.clone(),
            });
        } else {
            self.nodes.push(n);
            self.visited[n] = true;
            let net = self.net;
            for &(next, link) in net.neighbors(n) {
                if !self.visited[next] {
                    self.visit(next, Some(link))?;
                }
            }
            self.nodes.pop();
            self.visited[n] = false;
        }
        if via.is_some() {
            self.links.pop();
        }
        Ok(())
    }
}

fn check_pair(net: &EdgeNetwork, src: ServerId, dst: ServerId) -> Result<()> {
    for s in [src, dst] {
        if s >= net.server_count() {
            return Err(Error::NoSuchServer(s));
        }
    }
    if src == dst {
        return Err(Error::SamePair(src));
    }
    Ok(())
}

fn enumerate_counted(
    net: &EdgeNetwork,
    src: ServerId,
    dst: ServerId,
    stored: &AtomicUsize,
    cap: usize,
) -> Result<(Vec<SimplePath>, u64)> {
    check_pair(net, src, dst)?;
    let mut rpf = Rpf {
        net,
        target: dst,
        visited: vec![false; net.server_count()],
        nodes: Vec::new(),
        links: Vec::new(),
        found: Vec::new(),
        calls: 0,
        stored,
        cap,
    };
    rpf.visit(src, None)?;
    let mut paths = rpf.found;
    paths.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Ok((paths, rpf.calls))
}

/// Every simple path from `src` to `dst`, ordered by hop count and then by
/// node sequence.
pub fn enumerate_simple_paths(
    net: &EdgeNetwork,
    src: ServerId,
    dst: ServerId,
) -> Result<Vec<SimplePath>> {
    enumerate_simple_paths_with_cap(net, src, dst, usize::MAX)
}

/// [`enumerate_simple_paths`] failing with `PathExplosion` past `cap` paths.
pub fn enumerate_simple_paths_with_cap(
    net: &EdgeNetwork,
    src: ServerId,
    dst: ServerId,
    cap: usize,
) -> Result<Vec<SimplePath>> {
    let stored = AtomicUsize::new(0);
    enumerate_counted(net, src, dst, &stored, cap).map(|(paths, _)| paths)
}

/// Paths of one ordered server pair with their coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    paths: Vec<SimplePath>,
    coefficients: Vec<f64>,
    conductance: f64,
    recursion_calls: u64,
}

impl PathSet {
    pub fn paths(&self) -> &[SimplePath] {
        &self.paths
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `Σ_k 1 / A_k`, the bits per second the pair can move when every path
    /// is loaded to the same completion time.
    pub fn conductance(&self) -> f64 {
        self.conductance
    }

    pub fn recursion_calls(&self) -> u64 {
        self.recursion_calls
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Index of the minimum-coefficient path, first in canonical order on
    /// ties.
    pub fn best_single(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, &c) in self.coefficients.iter().enumerate() {
            if best.is_none_or(|b| c < self.coefficients[b]) {
                best = Some(k);
            }
        }
        best
    }
}

/// All simple paths for every ordered pair of distinct servers.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCatalog {
    servers: usize,
    sets: Vec<PathSet>,
    total_paths: usize,
}

impl PathCatalog {
    pub fn server_count(&self) -> usize {
        self.servers
    }

    /// The pair's path set. Same-server pairs have an empty set.
    pub fn pair(&self, src: ServerId, dst: ServerId) -> &PathSet {
        &self.sets[src * self.servers + dst]
    }

    pub fn paths(&self, src: ServerId, dst: ServerId) -> &[SimplePath] {
        self.pair(src, dst).paths()
    }

    pub fn coefficients(&self, src: ServerId, dst: ServerId) -> &[f64] {
        self.pair(src, dst).coefficients()
    }

    pub fn total_paths(&self) -> usize {
        self.total_paths
    }
}

/// Builds the catalog with the default cap.
pub fn build_catalog(net: &EdgeNetwork) -> Result<PathCatalog> {
    build_catalog_with_cap(net, DEFAULT_PATH_CAP)
}

/// Builds the catalog, failing with `PathExplosion` once more than `cap`
/// paths would be stored in total. Pairs are enumerated in parallel.
pub fn build_catalog_with_cap(net: &EdgeNetwork, cap: usize) -> Result<PathCatalog> {
    let n = net.server_count();
    let stored = AtomicUsize::new(0);
    let sets = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (src, dst) = (idx / n, idx % n);
            if src == dst {
                return Ok(PathSet::default());
            }
            let (paths, recursion_calls) = enumerate_counted(net, src, dst, &stored, cap)?;
            let coefficients: Vec<f64> = paths.iter().map(|p| path_coefficient(p, net)).collect();
            let conductance = coefficients.iter().map(|a| 1.0 / a).sum();
            Ok(PathSet {
                paths,
                coefficients,
                conductance,
                recursion_calls,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total_paths = sets.iter().map(PathSet::len).sum();
    Ok(PathCatalog {
        servers: n,
        sets,
        total_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Link, Server};

    fn net(n: usize, edges: &[(usize, usize, f64)]) -> EdgeNetwork {
        EdgeNetwork::new(
            (0..n).map(|id| Server { id, psi: 1.0 }).collect(),
            edges
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

    fn complete(n: usize) -> EdgeNetwork {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1.0));
            }
        }
        net(n, &edges)
    }

    fn node_lists(paths: &[SimplePath]) -> Vec<Vec<usize>> {
        paths.iter().map(|p| p.nodes().to_vec()).collect()
    }

    #[test]
    fn single_link() {
        let g = net(2, &[(0, 1, 1.0)]);
        let paths = enumerate_simple_paths(&g, 0, 1).unwrap();
        assert_eq!(node_lists(&paths), vec![vec![0, 1]]);
        assert_eq!(paths[0].links(), &[0]);
    }

    #[test]
    fn triangle_pair() {
        let g = complete(3);
        let paths = enumerate_simple_paths(&g, 0, 2).unwrap();
        assert_eq!(node_lists(&paths), vec![vec![0, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn k4_has_five_paths_per_pair() {
        let g = complete(4);
        for s in 0..4 {
            for d in 0..4 {
                if s != d {
                    assert_eq!(enumerate_simple_paths(&g, s, d).unwrap().len(), 5);
                }
            }
        }
    }

    #[test]
    fn same_pair_rejected() {
        assert_eq!(
            enumerate_simple_paths(&complete(3), 1, 1).unwrap_err(),
            Error::SamePair(1)
        );
        assert_eq!(
            enumerate_simple_paths(&complete(3), 0, 7).unwrap_err(),
            Error::NoSuchServer(7)
        );
    }

    #[test]
    fn canonical_order_is_length_then_lexicographic() {
        let paths = enumerate_simple_paths(&complete(5), 4, 0).unwrap();
        for w in paths.windows(2) {
            assert!(w[0].canonical_key() < w[1].canonical_key());
        }
        assert_eq!(paths[0].nodes(), &[4, 0]);
        assert_eq!(paths[1].nodes(), &[4, 1, 0]);
    }

    #[test]
    fn coefficients() {
        let g = net(3, &[(0, 1, 2.0), (1, 2, 4.0)]);
        let p = &enumerate_simple_paths(&g, 0, 2).unwrap()[0];
        assert_eq!(path_coefficient(p, &g), 0.75);
        let g = net(2, &[(0, 1, 10.0)]);
        let p = &enumerate_simple_paths(&g, 0, 1).unwrap()[0];
        assert_eq!(path_coefficient(p, &g), 0.1);
        let g = net(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
        let p = &enumerate_simple_paths(&g, 0, 3).unwrap()[0];
        assert_eq!(path_coefficient(p, &g), 3.0);
    }

    #[test]
    fn k5_catalog() {
        let cat = build_catalog(&complete(5)).unwrap();
        for s in 0..5 {
            for d in 0..5 {
                assert_eq!(cat.paths(s, d).len(), if s == d { 0 } else { 16 });
            }
        }
        assert_eq!(cat.total_paths(), 20 * 16);
    }

    #[test]
    fn star_leaf_to_leaf_goes_through_hub() {
        let g = net(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        let cat = build_catalog(&g).unwrap();
        assert_eq!(node_lists(cat.paths(1, 3)), vec![vec![1, 0, 3]]);
        assert_eq!(cat.pair(1, 3).conductance(), 0.5);
    }

    #[test]
    fn k10_exceeds_small_cap() {
        let err = build_catalog_with_cap(&complete(10), 1_000).unwrap_err();
        assert_eq!(err, Error::PathExplosion { cap: 1_000 });
    }

    #[test]
    fn cap_is_inclusive() {
        // K_3 stores 6 * 2 = 12 paths
        assert!(build_catalog_with_cap(&complete(3), 12).is_ok());
        assert!(build_catalog_with_cap(&complete(3), 11).is_err());
    }

    #[test]
    fn best_single_prefers_canonical_on_ties() {
        let g = net(3, &[(0, 1, 2.0), (1, 2, 2.0), (0, 2, 1.0)]);
        let cat = build_catalog(&g).unwrap();
        // [0,2] costs 1.0, [0,1,2] costs 1.0
        assert_eq!(cat.coefficients(0, 2), &[1.0, 1.0]);
        assert_eq!(cat.pair(0, 2).best_single(), Some(0));
    }
}
