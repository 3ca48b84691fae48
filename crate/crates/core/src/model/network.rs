use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{LinkId, ServerId};

/// An edge server with processing power in flop/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Server {
    pub id: ServerId,
    pub psi: f64,
}

/// An undirected link with symmetric throughput in bit/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub u: ServerId,
    pub v: ServerId,
    #[serde(rename = "b")]
    pub throughput: f64,
}

impl Link {
    pub fn other(&self, end: ServerId) -> ServerId {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// JSON document for a network: `{"servers":[...],"links":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub servers: Vec<Server>,
    pub links: Vec<Link>,
}

/// Validated, immutable edge network.
///
/// Servers and links are stored by id. `adjacency[n]` lists `(neighbor, link)`
/// sorted by neighbor id, which fixes the visiting order of path enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeNetwork {
    servers: Vec<Server>,
    links: Vec<Link>,
    adjacency: Vec<Vec<(ServerId, LinkId)>>,
}

impl EdgeNetwork {
    /// Builds and validates a network. Servers and links may be given in any
    /// order but their ids must be dense and 0-based.
    pub fn new(mut servers: Vec<Server>, mut links: Vec<Link>) -> Result<Self> {
        if servers.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        servers.sort_by_key(|s| s.id);
        links.sort_by_key(|l| l.id);
        if let Some((i, s)) = servers.iter().enumerate().find(|(i, s)| s.id != *i) {
            return Err(Error::NonDenseIds(format!(
                "server at sorted position {i} has id {}",
                s.id
            )));
        }
        if let Some((i, l)) = links.iter().enumerate().find(|(i, l)| l.id != *i) {
            return Err(Error::NonDenseIds(format!(
                "link at sorted position {i} has id {}",
                l.id
            )));
        }
        let n = servers.len();
        let mut adjacency = vec![Vec::new(); n];
        for l in &links {
            for end in [l.u, l.v] {
                if end >= n {
                    return Err(Error::UnknownServer {
                        link: l.id,
                        server: end,
                    });
                }
            }
            adjacency[l.u].push((l.v, l.id));
            if l.u != l.v {
                adjacency[l.v].push((l.u, l.id));
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let net = EdgeNetwork {
            servers,
            links,
            adjacency,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn from_document(doc: NetworkDocument) -> Result<Self> {
        Self::new(doc.servers, doc.links)
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            servers: self.servers.clone(),
            links: self.links.clone(),
        }
    }

    /// Re-checks every network invariant.
    pub fn validate(&self) -> Result<()> {
        for s in &self.servers {
            if !(s.psi.is_finite() && s.psi > 0.0) {
                return Err(Error::NonPositiveParameter(format!(
                    "psi of server {} = {}",
                    s.id, s.psi
                )));
            }
        }
        let mut seen = HashSet::new();
        for l in &self.links {
            if l.u == l.v {
                return Err(Error::SelfLoop {
                    link: l.id,
                    server: l.u,
                });
            }
            if !(l.throughput.is_finite() && l.throughput > 0.0) {
                return Err(Error::NonPositiveParameter(format!(
                    "throughput of link {} = {}",
                    l.id, l.throughput
                )));
            }
            if !seen.insert((l.u.min(l.v), l.u.max(l.v))) {
                return Err(Error::DuplicateLink {
                    link: l.id,
                    u: l.u,
                    v: l.v,
                });
            }
        }
        let reached = self.reachable_from(0);
        if let Some(server) = reached.iter().position(|r| !r) {
            return Err(Error::Disconnected { server });
        }
        Ok(())
    }

    fn reachable_from(&self, start: ServerId) -> Vec<bool> {
        let mut reached = vec![false; self.servers.len()];
        let mut queue = VecDeque::from([start]);
        reached[start] = true;
        while let Some(n) = queue.pop_front() {
            for &(m, _) in &self.adjacency[n] {
                if !reached[m] {
                    reached[m] = true;
                    queue.push_back(m);
                }
            }
        }
        reached
    }

    pub fn server_count(&self) -> usize {
        self.servers.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn servers(&self) -> &[Server] {
        &self.servers
    }

    pub fn server(&self, id: ServerId) -> &Server {
        &self.servers[id]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    /// Neighbors of `n` as `(neighbor, link)` pairs, ascending by neighbor.
    pub fn neighbors(&self, n: ServerId) -> &[(ServerId, LinkId)] {
        &self.adjacency[n]
    }

    /// Returns a copy with every processing power multiplied by `factor`.
    pub fn scale_psi(&self, factor: f64) -> Result<Self> {
        let servers = self
            .servers
            .iter()
            .map(|s| Server {
                psi: s.psi * factor,
                ..*s
            })
            .collect();
        Self::new(servers, self.links.clone())
    }

    /// Returns a copy with every link throughput multiplied by `factor`.
    pub fn scale_throughput(&self, factor: f64) -> Result<Self> {
        let links = self
            .links
            .iter()
            .map(|l| Link {
                throughput: l.throughput * factor,
                ..*l
            })
            .collect();
        Self::new(self.servers.clone(), links)
    }

    /// Short stable identifier of the topology and parameters, used to tag
    /// benchmark trials. FNV-1a over the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_document()).unwrap_or_default();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}
