//! Simple undirected social networks.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::Agent;

/// A simple undirected graph on agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialNetwork {
    n: usize,
    adj: Vec<Vec<Agent>>,
    matrix: Vec<bool>,
}

impl SocialNetwork {
    /// Builds a network, rejecting self-loops, duplicate edges and out-of-range agents.
    pub fn new(n: usize, edges: &[(Agent, Agent)]) -> Result<Self> {
        let mut g = SocialNetwork { n, adj: vec![Vec::new(); n], matrix: vec![false; n * n] };
        for &(u, v) in edges {
            if u >= n || v >= n {
                bail!(InvalidArgument, "edge ({u},{v}) references an agent outside 0..{n}");
            }
            if u == v {
                bail!(InvalidArgument, "self-loop at agent {u}");
            }
            if g.matrix[u * n + v] {
                bail!(InvalidArgument, "duplicate edge ({u},{v})");
            }
            g.matrix[u * n + v] = true;
            g.matrix[v * n + u] = true;
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        for l in &mut g.adj {
            l.sort_unstable();
        }
        Ok(g)
    }

    /// Builds a network from an edge list that is known to be valid.
    ///
    /// # Panics
    /// Panics on invalid edges.
    pub fn from_edges(n: usize, edges: &[(Agent, Agent)]) -> Self {
        Self::new(n, edges).expect("valid edge list")
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Adjacency test.
    pub fn has_edge(&self, u: Agent, v: Agent) -> bool {
        self.matrix[u * self.n + v]
    }

    /// Sorted neighbours of `u`.
    pub fn neighbors(&self, u: Agent) -> &[Agent] {
        &self.adj[u]
    }

    /// Degree of `u`.
    pub fn degree(&self, u: Agent) -> usize {
        self.adj[u].len()
    }

    /// Maximum degree `Δ(G)` (0 for the empty network).
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Agent, Agent)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Agent>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// True when the network has at most one component.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced by `agents`, relabelled `0..agents.len()` in the given order.
    pub fn induced(&self, agents: &[Agent]) -> SocialNetwork {
        let mut edges = Vec::new();
        for (i, &u) in agents.iter().enumerate() {
            for (j, &v) in agents.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    edges.push((i, j));
                }
            }
        }
        SocialNetwork::from_edges(agents.len(), &edges)
    }

    /// The complement graph.
    pub fn complement(&self) -> SocialNetwork {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        SocialNetwork::from_edges(self.n, &edges)
    }

    /// BFS distances from `src` inside the subgraph induced by the agents with
    /// `member[a] == true`; `None` marks unreachable agents and non-members.
    pub fn bfs_within(&self, src: Agent, member: &[bool]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adj[u] {
                if member[v] && dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs distances in the whole network (`None` = unreachable).
    pub fn all_pairs(&self) -> Vec<Vec<Option<usize>>> {
        let all = vec![true; self.n];
        (0..self.n).map(|s| self.bfs_within(s, &all)).collect()
    }
}
