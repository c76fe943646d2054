//! Tree-decompositions: validation, exact/heuristic construction and
//! conversion into nice tree-decompositions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};
use crate::network::SocialNetwork;
use crate::Agent;

/// A tree-decomposition: bags, undirected tree edges between bag ids, and a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Bag contents (agents), indexed by node id.
    pub bags: Vec<Vec<Agent>>,
    /// Undirected tree edges between node ids.
    pub edges: Vec<(usize, usize)>,
    /// Root node id.
    pub root: usize,
}

/// The first violated tree-decomposition condition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The decomposition has no nodes although the network has agents.
    Empty,
    /// A bag mentions an agent outside `0..n`.
    AgentOutOfRange {
        /// Node id.
        node: usize,
        /// Offending agent.
        agent: Agent,
    },
    /// The tree edges do not form a tree over the nodes.
    NotATree(String),
    /// An agent occurs in no bag.
    UncoveredAgent(Agent),
    /// No bag contains both endpoints of an edge.
    UncoveredEdge(Agent, Agent),
    /// The nodes containing an agent do not form a connected subtree.
    DisconnectedOccurrences(Agent),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("decomposition has no bags"),
            Violation::AgentOutOfRange { node, agent } => {
                write!(f, "bag {node} contains agent {agent} which is not in the network")
            }
            Violation::NotATree(why) => write!(f, "decomposition is not a tree: {why}"),
            Violation::UncoveredAgent(a) => write!(f, "agent {a} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u},{v}) is covered by no bag"),
            Violation::DisconnectedOccurrences(a) => {
                write!(f, "bags containing agent {a} do not form a connected subtree")
            }
        }
    }
}

impl TreeDecomposition {
    /// Width: largest bag size minus one (`0` for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Adjacency lists of the tree.
    fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Children lists when the tree is rooted at `root` (requires a valid tree).
    pub fn children(&self) -> Vec<Vec<usize>> {
        let adj = self.tree_adjacency();
        let mut children = vec![Vec::new(); self.bags.len()];
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    children[x].push(y);
                    stack.push(y);
                }
            }
        }
        children
    }
}

/// Checks the three tree-decomposition conditions (plus tree shape) and
/// returns the width, or the first violation found.
pub fn validate(g: &SocialNetwork, t: &TreeDecomposition) -> core::result::Result<usize, Violation> {
    let m = t.bags.len();
    if m == 0 {
        return if g.n() == 0 { Ok(0) } else { Err(Violation::Empty) };
    }
    for (node, bag) in t.bags.iter().enumerate() {
        if let Some(&agent) = bag.iter().find(|&&a| a >= g.n()) {
            return Err(Violation::AgentOutOfRange { node, agent });
        }
    }
    if t.root >= m {
        return Err(Violation::NotATree(format!("root {} is not a node", t.root)));
    }
    if t.edges.len() + 1 != m {
        return Err(Violation::NotATree(format!("{} nodes but {} edges", m, t.edges.len())));
    }
    if let Some(&(a, b)) = t.edges.iter().find(|&&(a, b)| a >= m || b >= m || a == b) {
        return Err(Violation::NotATree(format!("bad tree edge ({a},{b})")));
    }
    let adj = t.tree_adjacency();
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Violation::NotATree(format!("node {x} is not connected to node 0")));
    }
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    let mut in_bag = vec![vec![false; g.n()]; m];
    for (node, bag) in t.bags.iter().enumerate() {
        for &a in bag {
            occ[a].push(node);
            in_bag[node][a] = true;
        }
    }
    if let Some(a) = occ.iter().position(Vec::is_empty) {
        return Err(Violation::UncoveredAgent(a));
    }
    for (u, v) in g.edges() {
        if !occ[u].iter().any(|&x| in_bag[x][v]) {
            return Err(Violation::UncoveredEdge(u, v));
        }
    }
    for (a, nodes) in occ.iter().enumerate() {
        let mut reached = 1;
        let mut vis = vec![false; m];
        vis[nodes[0]] = true;
        let mut stack = vec![nodes[0]];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !vis[y] && in_bag[y][a] {
                    vis[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != nodes.len() {
            return Err(Violation::DisconnectedOccurrences(a));
        }
    }
    Ok(t.width())
}

/// Builds the decomposition induced by an elimination order.
pub fn from_elimination_order(g: &SocialNetwork, order: &[Agent]) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], edges: Vec::new(), root: 0 };
    }
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut adj: Vec<BTreeSet<Agent>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for &v in order {
        let later: Vec<Agent> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        parent[pos[v]] = later.iter().map(|&w| pos[w]).min();
        let mut bag = later;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (k, p) in parent.iter().enumerate() {
        match p {
            Some(p) => edges.push((k, *p)),
            None => roots.push(k),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    let root = *roots.last().expect("at least one root");
    TreeDecomposition { bags, edges, root }
}

/// Width of the decomposition induced by an elimination order.
pub fn elimination_width(g: &SocialNetwork, order: &[Agent]) -> usize {
    from_elimination_order(g, order).width()
}

/// Greedy elimination order: min-fill with min-degree tie-breaking.
pub fn heuristic_order(g: &SocialNetwork) -> Vec<Agent> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<Agent>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, Agent)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<Agent> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nb.len(), v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let v = best.expect("an alive vertex remains").2;
        let nb: Vec<Agent> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        if let Some(&last) = nb.last() {
            adj[last].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Exact search limits: the largest network attempted and the node budget.
pub const EXACT_MAX_AGENTS: usize = 40;

/// Default number of search nodes for [`compute_decomposition`].
pub const DEFAULT_BUDGET: u64 = 200_000;

struct Exact {
    n: usize,
    best: usize,
    best_order: Vec<Agent>,
    memo: BTreeMap<u64, usize>,
    budget: u64,
    exhausted: bool,
}

fn eliminate(adj: &[u64], v: usize) -> Vec<u64> {
    let mut out = adj.to_vec();
    let nb = adj[v];
    let mut rest = nb;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out[a] = (out[a] | nb) & !(1 << a) & !(1 << v);
    }
    out[v] = 0;
    out
}

/// Minor-min-width lower bound on the treewidth of the remaining graph.
fn minor_min_width(adj: &[u64], alive: u64) -> usize {
    let mut adj = adj.to_vec();
    let mut alive = alive;
    let mut lb = 0;
    while alive != 0 {
        let mut best: Option<(u32, usize)> = None;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = adj[v].count_ones();
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.expect("alive is non-empty");
        lb = lb.max(d as usize);
        if d == 0 {
            alive &= !(1 << v);
            continue;
        }
        // Contract v into its neighbour of minimum degree.
        let mut u = usize::MAX;
        let mut ud = u32::MAX;
        let mut rest = adj[v];
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[w].count_ones() < ud {
                ud = adj[w].count_ones();
                u = w;
            }
        }
        let merged = (adj[u] | adj[v]) & !(1 << u) & !(1 << v);
        let mut rest = adj[v];
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            adj[w] &= !(1 << v);
        }
        let mut rest = merged;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            adj[w] |= 1 << u;
        }
        adj[u] = merged;
        adj[v] = 0;
        alive &= !(1 << v);
    }
    lb
}

impl Exact {
    fn search(&mut self, adj: &[u64], alive: u64, width: usize, prefix: &mut Vec<Agent>) {
        if self.budget == 0 {
            self.exhausted = true;
            return;
        }
        self.budget -= 1;
        let remaining = alive.count_ones() as usize;
        if width.max(remaining.saturating_sub(1)) < self.best {
            // Any completion is better than the incumbent.
            self.best = width.max(remaining.saturating_sub(1));
            self.best_order = prefix.clone();
            let mut rest = alive;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                self.best_order.push(v);
            }
            return;
        }
        if width >= self.best {
            return;
        }
        if let Some(&w) = self.memo.get(&alive) {
            if w <= width {
                return;
            }
        }
        self.memo.insert(alive, width);
        if minor_min_width(adj, alive).max(width) >= self.best {
            return;
        }
        // A simplicial vertex can always be eliminated first.
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v];
            let mut clique = true;
            let mut r = nb;
            while r != 0 {
                let a = r.trailing_zeros() as usize;
                r &= r - 1;
                if (adj[a] | 1 << a) & nb != nb {
                    clique = false;
                    break;
                }
            }
            if clique {
                prefix.push(v);
                let w = width.max(nb.count_ones() as usize);
                self.search(&eliminate(adj, v), alive & !(1 << v), w, prefix);
                prefix.pop();
                return;
            }
        }
        let mut cands: Vec<(u32, usize)> = Vec::new();
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            cands.push((adj[v].count_ones(), v));
        }
        cands.sort_unstable();
        for (d, v) in cands {
            let w = width.max(d as usize);
            if w >= self.best {
                continue;
            }
            prefix.push(v);
            self.search(&eliminate(adj, v), alive & !(1 << v), w, prefix);
            prefix.pop();
        }
        let _ = self.n;
    }
}

/// A decomposition together with whether its width is proven optimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputedDecomposition {
    /// The decomposition (always valid).
    pub decomposition: TreeDecomposition,
    /// True when the exact search finished within budget.
    pub exact: bool,
}

/// Computes a valid tree-decomposition: exact branch-and-bound over
/// elimination orders (minor-min-width lower bounds, memoised on the set of
/// eliminated agents) within `budget` search nodes, falling back to the
/// min-fill heuristic.  The result always passes [`validate`].
pub fn compute_decomposition(g: &SocialNetwork, budget: u64) -> Result<TreeDecomposition> {
    Ok(compute_decomposition_detailed(g, budget)?.decomposition)
}

/// [`compute_decomposition`] reporting whether the width is optimal.
pub fn compute_decomposition_detailed(g: &SocialNetwork, budget: u64) -> Result<ComputedDecomposition> {
    let n = g.n();
    let heuristic = heuristic_order(g);
    let ub = elimination_width(g, &heuristic);
    if n > EXACT_MAX_AGENTS.min(64) {
        return Ok(ComputedDecomposition { decomposition: from_elimination_order(g, &heuristic), exact: false });
    }
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
    let alive = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut ex = Exact { n, best: ub, best_order: heuristic, memo: BTreeMap::new(), budget, exhausted: false };
    if ub > 0 {
        ex.search(&adj, alive, 0, &mut Vec::new());
    }
    let decomposition = from_elimination_order(g, &ex.best_order);
    if validate(g, &decomposition).is_err() {
        bail!(ResourceLimit, "internal error: elimination order produced an invalid decomposition");
    }
    Ok(ComputedDecomposition { decomposition, exact: !ex.exhausted })
}

/// Node kinds of a nice tree-decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    /// Empty bag, no children.
    Leaf,
    /// Adds the agent to the child's bag.
    Introduce(Agent),
    /// Removes the agent from the child's bag.
    Forget(Agent),
    /// Two children with identical bags.
    Join,
}

/// A node of a nice tree-decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    /// Node kind.
    pub kind: NiceKind,
    /// Sorted bag.
    pub bag: Vec<Agent>,
    /// Child node ids (always smaller than this node's id).
    pub children: Vec<usize>,
}

/// A nice tree-decomposition whose nodes are stored children-first; the root
/// is the last node and has an empty bag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    /// Nodes in post-order.
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    /// Root node id.
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Width (largest bag minus one).
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Plain tree-decomposition view (for [`validate`]).
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut edges = Vec::new();
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                edges.push((c, i));
            }
        }
        TreeDecomposition { bags: self.nodes.iter().map(|x| x.bag.clone()).collect(), edges, root: self.root() }
    }

    /// Checks the node-type rules of nice decompositions.
    pub fn check_nice(&self) -> core::result::Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            if x.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("bag of node {i} is not sorted"));
            }
            for &c in &x.children {
                if c >= i {
                    return Err(format!("child {c} of node {i} is not stored before it"));
                }
                parents[c] += 1;
            }
            let child_bag = |k: usize| &self.nodes[x.children[k]].bag;
            let ok = match x.kind {
                NiceKind::Leaf => x.children.is_empty() && x.bag.is_empty(),
                NiceKind::Introduce(a) => {
                    x.children.len() == 1 && !child_bag(0).contains(&a) && {
                        let mut b = child_bag(0).clone();
                        b.push(a);
                        b.sort_unstable();
                        b == x.bag
                    }
                }
                NiceKind::Forget(a) => {
                    x.children.len() == 1 && child_bag(0).contains(&a) && {
                        let b: Vec<Agent> = child_bag(0).iter().copied().filter(|&y| y != a).collect();
                        b == x.bag
                    }
                }
                NiceKind::Join => x.children.len() == 2 && *child_bag(0) == x.bag && *child_bag(1) == x.bag,
            };
            if !ok {
                return Err(format!("node {i} violates the rules of its kind {:?}", x.kind));
            }
        }
        if parents[..self.root()].iter().any(|&p| p != 1) || parents[self.root()] != 0 {
            return Err("nodes do not form a single rooted tree".into());
        }
        Ok(())
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NiceKind, bag: Vec<Agent>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Extends the chain at `node` (bag `from`) until its bag equals `to`.
    fn morph(&mut self, mut node: usize, from: &[Agent], to: &[Agent]) -> usize {
        let mut bag: Vec<Agent> = from.to_vec();
        for &a in from.iter().filter(|a| !to.contains(a)) {
            bag.retain(|&x| x != a);
            node = self.push(NiceKind::Forget(a), bag.clone(), vec![node]);
        }
        for &a in to.iter().filter(|a| !from.contains(a)) {
            bag.push(a);
            bag.sort_unstable();
            node = self.push(NiceKind::Introduce(a), bag.clone(), vec![node]);
        }
        node
    }
}

/// Converts a valid decomposition into a nice one of identical width.
pub fn make_nice(t: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    if t.bags.is_empty() || t.root >= t.bags.len() || t.edges.len() + 1 != t.bags.len() {
        bail!(InvalidArgument, "decomposition is not a tree");
    }
    let children = t.children();
    if children.iter().map(Vec::len).sum::<usize>() + 1 != t.bags.len() {
        bail!(InvalidArgument, "decomposition is not connected");
    }
    let bags: Vec<Vec<Agent>> = t
        .bags
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b.dedup();
            b
        })
        .collect();
    let mut nb = NiceBuilder { nodes: Vec::new() };
    // Iterative post-order over the rooted tree.
    let mut built: Vec<usize> = vec![usize::MAX; bags.len()];
    let mut stack = vec![(t.root, false)];
    while let Some((x, expanded)) = stack.pop() {
        if !expanded {
            stack.push((x, true));
            for &c in children[x].iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let mut tops: Vec<usize> = Vec::new();
        if children[x].is_empty() {
            let leaf = nb.push(NiceKind::Leaf, Vec::new(), Vec::new());
            tops.push(nb.morph(leaf, &[], &bags[x]));
        }
        for &c in &children[x] {
            tops.push(nb.morph(built[c], &bags[c], &bags[x]));
        }
        let mut acc = tops[0];
        for &other in &tops[1..] {
            acc = nb.push(NiceKind::Join, bags[x].clone(), vec![acc, other]);
        }
        built[x] = acc;
    }
    let top = built[t.root];
    let root_bag = bags[t.root].clone();
    nb.morph(top, &root_bag, &[]);
    Ok(NiceTreeDecomposition { nodes: nb.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> SocialNetwork {
        SocialNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3)])
    }

    #[test]
    fn validate_examples() {
        let g = path4();
        let chain = TreeDecomposition {
            bags: vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            edges: vec![(0, 1), (1, 2)],
            root: 0,
        };
        assert_eq!(validate(&g, &chain), Ok(1));
        let single = TreeDecomposition { bags: vec![vec![0, 1, 2, 3]], edges: vec![], root: 0 };
        assert_eq!(validate(&g, &single), Ok(3));
        let missing = TreeDecomposition { bags: vec![vec![0, 1], vec![2, 3]], edges: vec![(0, 1)], root: 0 };
        assert_eq!(validate(&g, &missing), Err(Violation::UncoveredEdge(1, 2)));
        let broken = TreeDecomposition {
            bags: vec![vec![0, 1], vec![2, 3], vec![1, 2]],
            edges: vec![(0, 1), (1, 2)],
            root: 0,
        };
        assert_eq!(validate(&g, &broken), Err(Violation::DisconnectedOccurrences(1)));
    }

    #[test]
    fn nice_single_bag() {
        let t = TreeDecomposition { bags: vec![vec![0, 1]], edges: vec![], root: 0 };
        let nice = make_nice(&t).unwrap();
        let kinds: Vec<NiceKind> = nice.nodes.iter().map(|x| x.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf,
                NiceKind::Introduce(0),
                NiceKind::Introduce(1),
                NiceKind::Forget(0),
                NiceKind::Forget(1)
            ]
        );
        let empty = TreeDecomposition { bags: vec![vec![]], edges: vec![], root: 0 };
        assert_eq!(make_nice(&empty).unwrap().nodes.len(), 1);
    }

    #[test]
    fn clique_and_tree_widths() {
        let mut e = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                e.push((u, v));
            }
        }
        let k5 = SocialNetwork::from_edges(5, &e);
        assert_eq!(compute_decomposition(&k5, DEFAULT_BUDGET).unwrap().width(), 4);
        let star = SocialNetwork::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(compute_decomposition(&star, DEFAULT_BUDGET).unwrap().width(), 1);
    }
}
