//! Coupling topologies between oscillator nodes.
//!
//! A [`CouplingSpec`] is a list of directed edges, each carrying its own gain
//! and delay, plus an optional external signal added to a set of nodes. Node
//! `dst` receives `kappa_c · f(x_src(t − tau_c))` from every edge `src → dst`.
//! Gains are used as given: summed inputs are not normalized by in-degree.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dynamics::DriveSignal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("node {0} cannot be coupled to itself")]
    SelfCoupling(usize),
    #[error("external driving needs at least one node")]
    EmptyNodeSet,
    #[error("adjacency diagonal entry {0} is nonzero")]
    NonzeroDiagonal(usize),
    #[error("adjacency must be {n}x{n}")]
    BadAdjacency { n: usize },
    #[error("node {node} out of range for {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("coupling delay must be > 0, got {0}")]
    NonPositiveDelay(f64),
    #[error("node_count must be >= 1")]
    NoNodes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kappa_c: f64,
    pub tau_c: f64,
}

/// Shared signal added directly to the input of each listed node.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalDrive {
    pub nodes: BTreeSet<usize>,
    pub signal: DriveSignal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    node_count: usize,
    edges: Vec<Edge>,
    external: Option<ExternalDrive>,
}

impl CouplingSpec {
    /// `node_count` nodes with no interaction.
    pub fn uncoupled(node_count: usize) -> Result<Self, NetworkError> {
        if node_count == 0 {
            return Err(NetworkError::NoNodes);
        }
        Ok(Self { node_count, edges: Vec::new(), external: None })
    }

    /// Builds a spec from an explicit edge list.
    pub fn from_edges(node_count: usize, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        let mut spec = Self::uncoupled(node_count)?;
        for e in edges {
            spec.push_edge(e)?;
        }
        Ok(spec)
    }

    fn push_edge(&mut self, e: Edge) -> Result<(), NetworkError> {
        if e.src == e.dst {
            return Err(NetworkError::SelfCoupling(e.src));
        }
        for node in [e.src, e.dst] {
            if node >= self.node_count {
                return Err(NetworkError::NodeOutOfRange { node, count: self.node_count });
            }
        }
        if !(e.tau_c > 0.0) {
            return Err(NetworkError::NonPositiveDelay(e.tau_c));
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn external(&self) -> Option<&ExternalDrive> {
        self.external.as_ref()
    }

    /// Same spec padded to at least `node_count` nodes.
    pub fn with_node_count(mut self, node_count: usize) -> Self {
        self.node_count = self.node_count.max(node_count);
        self
    }

    /// Attaches an external drive to this spec.
    pub fn with_external(mut self, drive: ExternalDrive) -> Result<Self, NetworkError> {
        if drive.nodes.is_empty() {
            return Err(NetworkError::EmptyNodeSet);
        }
        if let Some(&node) = drive.nodes.iter().find(|&&n| n >= self.node_count) {
            return Err(NetworkError::NodeOutOfRange { node, count: self.node_count });
        }
        self.external = Some(drive);
        Ok(self)
    }

    /// Edges of both specs over the larger node set. The external drive of
    /// `self` wins if both carry one.
    pub fn union(&self, other: &CouplingSpec) -> CouplingSpec {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        CouplingSpec {
            node_count: self.node_count.max(other.node_count),
            edges,
            external: self.external.clone().or_else(|| other.external.clone()),
        }
    }

    /// Edge set ignoring insertion order.
    pub fn same_edges(&self, other: &CouplingSpec) -> bool {
        let key = |e: &Edge| (e.src, e.dst, e.kappa_c.to_bits(), e.tau_c.to_bits());
        let mut a: Vec<_> = self.edges.iter().map(key).collect();
        let mut b: Vec<_> = other.edges.iter().map(key).collect();
        a.sort_unstable();
        b.sort_unstable();
        self.node_count == other.node_count && a == b
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> CouplingSpec {
        assert_eq!(perm.len(), self.node_count);
        CouplingSpec {
            node_count: self.node_count,
            edges: self.edges.iter().map(|e| Edge { src: perm[e.src], dst: perm[e.dst], ..*e }).collect(),
            external: self
                .external
                .as_ref()
                .map(|x| ExternalDrive { nodes: x.nodes.iter().map(|&n| perm[n]).collect(), signal: x.signal.clone() }),
        }
    }
}

/// Master-slave driving: one edge `driver → follower`.
pub fn directional(driver: usize, follower: usize, kappa_c: f64, tau_c: f64) -> Result<CouplingSpec, NetworkError> {
    CouplingSpec::from_edges(driver.max(follower) + 1, vec![Edge { src: driver, dst: follower, kappa_c, tau_c }])
}

/// Mutual driving: `a → b` and `b → a` with equal gain and delay.
pub fn bidirectional(a: usize, b: usize, kappa_c: f64, tau_c: f64) -> Result<CouplingSpec, NetworkError> {
    CouplingSpec::from_edges(
        a.max(b) + 1,
        vec![Edge { src: a, dst: b, kappa_c, tau_c }, Edge { src: b, dst: a, kappa_c, tau_c }],
    )
}

/// External driving: `drive` is added to the input of every listed node. No
/// inter-node edges are created.
pub fn external_driving(node_count: usize, nodes: &[usize], drive: DriveSignal) -> Result<CouplingSpec, NetworkError> {
    if nodes.is_empty() {
        return Err(NetworkError::EmptyNodeSet);
    }
    CouplingSpec::uncoupled(node_count)?
        .with_external(ExternalDrive { nodes: nodes.iter().copied().collect(), signal: drive })
}

/// Network coupling from a gain matrix, `adjacency[src][dst]`, one edge per
/// nonzero entry, all with delay `tau_c`.
pub fn network_coupling(node_count: usize, adjacency: &[Vec<f64>], tau_c: f64) -> Result<CouplingSpec, NetworkError> {
    if adjacency.len() != node_count || adjacency.iter().any(|r| r.len() != node_count) {
        return Err(NetworkError::BadAdjacency { n: node_count });
    }
    if let Some(i) = (0..node_count).find(|&i| adjacency[i][i] != 0.0) {
        return Err(NetworkError::NonzeroDiagonal(i));
    }
    let mut spec = CouplingSpec::uncoupled(node_count)?;
    for (src, row) in adjacency.iter().enumerate() {
        for (dst, &k) in row.iter().enumerate() {
            if k != 0.0 {
                spec.push_edge(Edge { src, dst, kappa_c: k, tau_c })?;
            }
        }
    }
    Ok(spec)
}

/// Symmetric nearest-neighbour ring adjacency.
pub fn ring_adjacency(n: usize, kappa_c: f64) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    if n < 2 {
        return a;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if i != j {
            a[i][j] = kappa_c;
            a[j][i] = kappa_c;
        }
    }
    a
}

pub fn all_to_all_adjacency(n: usize, kappa_c: f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { kappa_c }).collect()).collect()
}
