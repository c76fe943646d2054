//! Solver parameterised by the vertex cover number.
//!
//! With a vertex cover `U`, the remaining agents form an independent set and
//! are grouped into *classes* by their neighbourhood `W ⊆ U`; agents of one
//! class are interchangeable.  A [`CoverStructure`] fixes the partition of `U`
//! into coalitions and, per coalition, which classes are present.  All
//! distances inside a coalition then follow from a small quotient graph, and
//! the welfare becomes a quadratic function of the class counts `x_{C,W} ≥ 1`
//! while IR/NS requirements become linear constraints.  Agents left over
//! (per-class slack) stay alone.  The resulting [`QuadraticProgram`] is solved
//! by bounded branch-and-bound.
//!
//! Only connected networks are handled directly; [`solve_vc`] works
//! component by component, so every non-cover agent has a neighbour in `U`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::eval::social_welfare;
use crate::network::SocialNetwork;
use crate::oracle::{enumerate_partitions, Partitions};
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::{solve_by_components, Mode, SolveResult};
use crate::stability::satisfies;
use crate::value::ExtendedValue;
use crate::Agent;

/// Search budgets of the vertex-cover solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcConfig {
    /// Branching nodes allowed when computing a minimum vertex cover.
    pub cover_budget: u64,
    /// Structures allowed per connected component.
    pub max_structures: u64,
    /// Branch-and-bound nodes allowed per component.
    pub max_qp_nodes: u64,
}

impl Default for VcConfig {
    fn default() -> Self {
        VcConfig { cover_budget: 5_000_000, max_structures: 5_000_000, max_qp_nodes: 50_000_000 }
    }
}

/// A minimum vertex cover (sorted), by branching on a maximum-degree agent
/// (take it, or take all its neighbours) with iterative deepening.
pub fn compute_vertex_cover(g: &SocialNetwork) -> Result<Vec<Agent>> {
    compute_vertex_cover_with(g, VcConfig::default().cover_budget)
}

/// [`compute_vertex_cover`] with an explicit node budget.
pub fn compute_vertex_cover_with(g: &SocialNetwork, budget: u64) -> Result<Vec<Agent>> {
    fn go(g: &SocialNetwork, gone: &mut Vec<bool>, k: usize, nodes: &mut u64, out: &mut Vec<Agent>) -> Option<bool> {
        if *nodes == 0 {
            return None;
        }
        *nodes -= 1;
        let deg = |v: Agent, gone: &Vec<bool>| g.neighbors(v).iter().filter(|&&w| !gone[w]).count();
        let best = (0..g.n()).filter(|&v| !gone[v]).max_by_key(|&v| (deg(v, gone), core::cmp::Reverse(v)));
        let Some(v) = best.filter(|&v| deg(v, gone) > 0) else { return Some(true) };
        if k == 0 {
            return Some(false);
        }
        let d = deg(v, gone);
        // Remaining edges need at least |E| / maxdeg cover vertices.
        let edges: usize = (0..g.n()).filter(|&u| !gone[u]).map(|u| deg(u, gone)).sum::<usize>() / 2;
        if edges > k * d {
            return Some(false);
        }
        gone[v] = true;
        out.push(v);
        if go(g, gone, k - 1, nodes, out)? {
            return Some(true);
        }
        out.pop();
        gone[v] = false;
        if d <= k {
            let nb: Vec<Agent> = g.neighbors(v).iter().copied().filter(|&w| !gone[w]).collect();
            for &w in &nb {
                gone[w] = true;
                out.push(w);
            }
            if go(g, gone, k - d, nodes, out)? {
                return Some(true);
            }
            for &w in &nb {
                gone[w] = false;
                out.pop();
            }
        }
        Some(false)
    }
    let mut nodes = budget;
    for k in 0..=g.n() {
        let mut gone = vec![false; g.n()];
        let mut out = Vec::new();
        match go(g, &mut gone, k, &mut nodes, &mut out) {
            Some(true) => {
                out.sort_unstable();
                return Ok(out);
            }
            Some(false) => {}
            None => bail!(ResourceLimit, "vertex cover search exceeded {budget} nodes"),
        }
    }
    unreachable!("the whole agent set is a vertex cover")
}

/// Agents outside the cover sharing the neighbourhood `neighbours`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NeighbourhoodClass {
    /// The common neighbourhood `W ⊆ U` (sorted).
    pub neighbours: Vec<Agent>,
    /// The agents of the class (sorted).
    pub agents: Vec<Agent>,
}

/// Groups the agents outside `cover` by neighbourhood, ordered by neighbourhood.
pub fn neighbourhood_classes(g: &SocialNetwork, cover: &[Agent]) -> Result<Vec<NeighbourhoodClass>> {
    let mut in_cover = vec![false; g.n()];
    for &u in cover {
        if u >= g.n() {
            bail!(InvalidArgument, "cover agent {u} is out of range");
        }
        in_cover[u] = true;
    }
    let mut by: BTreeMap<Vec<Agent>, Vec<Agent>> = BTreeMap::new();
    for v in (0..g.n()).filter(|&v| !in_cover[v]) {
        let mut w: Vec<Agent> = g.neighbors(v).to_vec();
        if w.iter().any(|&x| !in_cover[x]) {
            bail!(InvalidArgument, "the edges at agent {v} are not covered");
        }
        w.sort_unstable();
        by.entry(w).or_default().push(v);
    }
    Ok(by.into_iter().map(|(neighbours, agents)| NeighbourhoodClass { neighbours, agents }).collect())
}

/// A guess of the coalition structure on the cover.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoverStructure {
    /// Partition of the cover into coalition cores (sorted, ordered by first agent).
    pub parts: Vec<Vec<Agent>>,
    /// Per part, the indices of the classes declared present (ascending).
    pub declared: Vec<Vec<usize>>,
}

/// Quotient graph of one coalition: its cover agents, then one vertex per declared class.
struct Quotient {
    dist: Vec<Vec<Option<usize>>>,
}

impl Quotient {
    fn build(g: &SocialNetwork, part: &[Agent], classes: &[NeighbourhoodClass], declared: &[usize]) -> Quotient {
        let (k, m) = (part.len(), declared.len());
        let mut adj = vec![Vec::new(); k + m];
        for (i, &a) in part.iter().enumerate() {
            for (j, &b) in part.iter().enumerate() {
                if g.has_edge(a, b) {
                    adj[i].push(j);
                }
            }
        }
        for (r, &w) in declared.iter().enumerate() {
            for (i, a) in part.iter().enumerate() {
                if classes[w].neighbours.contains(a) {
                    adj[k + r].push(i);
                    adj[i].push(k + r);
                }
            }
        }
        Quotient { dist: (0..k + m).map(|src| bfs_list(&adj, src)).collect() }
    }
}

fn bfs_list(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut d = vec![None; adj.len()];
    d[src] = Some(0);
    let mut queue = alloc::collections::VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if d[w].is_none() {
                d[w] = Some(d[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    d
}

/// Lazily enumerates the admissible structures of a connected network with cover `cover`.
///
/// A structure is admissible when every declared class has a neighbour in its
/// part, its quotient graph is connected, and no class is declared in more
/// parts than it has agents.
pub struct CoverStructures<'a> {
    g: &'a SocialNetwork,
    cover: Vec<Agent>,
    classes: Vec<NeighbourhoodClass>,
    partitions: Option<Partitions>,
    parts: Vec<Vec<Agent>>,
    eligible: Vec<Vec<usize>>,
    counter: Vec<u64>,
    exhausted: bool,
}

impl<'a> CoverStructures<'a> {
    /// The classes the structure indices refer to.
    pub fn classes(&self) -> &[NeighbourhoodClass] {
        &self.classes
    }

    fn load_partition(&mut self) -> bool {
        let Some(rgs) = self.partitions.as_mut().and_then(Iterator::next) else { return false };
        let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        self.parts = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            self.parts[b].push(self.cover[i]);
        }
        self.eligible = self
            .parts
            .iter()
            .map(|p| {
                (0..self.classes.len()).filter(|&w| self.classes[w].neighbours.iter().any(|a| p.contains(a))).collect()
            })
            .collect();
        self.counter = vec![0; blocks];
        true
    }

    /// Advances the mixed-radix counter; false when it wraps around.
    fn step(&mut self) -> bool {
        for j in 0..self.counter.len() {
            self.counter[j] += 1;
            if self.counter[j] < 1u64 << self.eligible[j].len() {
                return true;
            }
            self.counter[j] = 0;
        }
        false
    }

    fn current(&self) -> CoverStructure {
        let declared = self
            .eligible
            .iter()
            .zip(&self.counter)
            .map(|(el, &c)| el.iter().enumerate().filter(|&(i, _)| c >> i & 1 == 1).map(|(_, &w)| w).collect())
            .collect();
        CoverStructure { parts: self.parts.clone(), declared }
    }

    fn admissible(&self, st: &CoverStructure) -> bool {
        let mut uses = vec![0usize; self.classes.len()];
        for d in &st.declared {
            for &w in d {
                uses[w] += 1;
            }
        }
        if uses.iter().zip(&self.classes).any(|(&u, c)| u > c.agents.len()) {
            return false;
        }
        st.parts.iter().zip(&st.declared).all(|(p, d)| {
            let q = Quotient::build(self.g, p, &self.classes, d);
            q.dist[0].iter().all(Option::is_some)
        })
    }
}

impl Iterator for CoverStructures<'_> {
    type Item = CoverStructure;

    fn next(&mut self) -> Option<CoverStructure> {
        loop {
            if self.exhausted {
                return None;
            }
            let st = self.current();
            if !self.step() && !self.load_partition() {
                self.exhausted = true;
            }
            if self.admissible(&st) {
                return Some(st);
            }
        }
    }
}

/// Enumerates the admissible structures of `g` (which must be connected, with
/// at least two agents) for the vertex cover `cover`.
pub fn enumerate_structures<'a>(g: &'a SocialNetwork, cover: &[Agent]) -> Result<CoverStructures<'a>> {
    if cover.is_empty() {
        bail!(InvalidArgument, "structures need a non-empty cover");
    }
    let mut cover = cover.to_vec();
    cover.sort_unstable();
    cover.dedup();
    let classes = neighbourhood_classes(g, &cover)?;
    if classes.iter().any(|c| c.neighbours.is_empty()) {
        bail!(InvalidArgument, "isolated agents must be handled before structure enumeration");
    }
    let mut it = CoverStructures {
        g,
        cover: cover.clone(),
        classes,
        partitions: Some(enumerate_partitions(cover.len())?),
        parts: Vec::new(),
        eligible: Vec::new(),
        counter: Vec::new(),
        exhausted: false,
    };
    it.load_partition();
    Ok(it)
}

/// `constant + Σ coeffs[i]·x_i`, with an optional activation class: the
/// constraint `value ≥ 0` is enforced only when that class has slack agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    /// Constant term.
    pub constant: i64,
    /// Coefficient per variable.
    pub coeffs: Vec<i64>,
    /// Class whose slack must be positive for the constraint to apply.
    pub when_slack: Option<usize>,
}

impl LinearConstraint {
    fn value(&self, x: &[i64]) -> i64 {
        self.constant + self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<i64>()
    }
}

/// The integer program of one structure.
///
/// Variables are `x_{C,W}` for every part `C` and class `W` declared in it,
/// each in `1..=upper`; the agents of class `W` not placed stay alone, so
/// `Σ_C x_{C,W} ≤ n_W`.  The objective is
/// `constant + Σ linear_i x_i + Σ_{i,j} quadratic_ij x_i x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticProgram {
    /// `(part, class)` of each variable.
    pub vars: Vec<(usize, usize)>,
    /// Upper bound of each variable.
    pub upper: Vec<i64>,
    /// Agents per class (`n_W`).
    pub class_size: Vec<i64>,
    /// Objective constant.
    pub constant: i64,
    /// Linear objective coefficients.
    pub linear: Vec<i64>,
    /// Symmetric quadratic objective coefficients.
    pub quadratic: Vec<Vec<i64>>,
    /// Individual rationality: every member's utility is non-negative.
    pub ir: Vec<LinearConstraint>,
    /// Nash stability: utility at least every finite deviation value.
    pub ns: Vec<LinearConstraint>,
}

/// Linear form with extended-value coefficients, used while building programs.
#[derive(Clone)]
struct Form {
    constant: ExtendedValue,
    coeffs: Vec<ExtendedValue>,
}

impl Form {
    fn zero(nvars: usize) -> Form {
        Form { constant: ExtendedValue::ZERO, coeffs: vec![ExtendedValue::ZERO; nvars] }
    }

    /// Finite version (every variable is at least 1, so any `-∞` term is realised).
    fn finite(&self) -> Option<(i64, Vec<i64>)> {
        Some((self.constant.finite()?, self.coeffs.iter().map(|c| c.finite()).collect::<Option<_>>()?))
    }
}

fn score(s: &ScoringVector, d: Option<usize>) -> ExtendedValue {
    match d {
        Some(d) if d >= 1 => s.score(d),
        _ => ExtendedValue::NegInf,
    }
}

/// Builds the program of structure `st`; `None` when every realisation has a
/// `-∞` agent (disconnected or, for closed vectors, too wide coalitions).
pub fn build_qp(
    s: &ScoringVector,
    g: &SocialNetwork,
    classes: &[NeighbourhoodClass],
    st: &CoverStructure,
) -> Option<QuadraticProgram> {
    let s2 = s.score(2);
    let mut vars = Vec::new();
    let mut var_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (j, d) in st.declared.iter().enumerate() {
        for &w in d {
            var_of.insert((j, w), vars.len());
            vars.push((j, w));
        }
    }
    let nv = vars.len();
    let class_size: Vec<i64> = classes.iter().map(|c| c.agents.len() as i64).collect();
    // Two agents of one class sit at distance 2; with s(2) = -∞ at most one may be present.
    let upper: Vec<i64> =
        vars.iter().map(|&(_, w)| if s2.is_neg_inf() { 1 } else { class_size[w] }).collect();
    let s2f = s2.finite().unwrap_or(0);
    let quotients: Vec<Quotient> =
        st.parts.iter().zip(&st.declared).map(|(p, d)| Quotient::build(g, p, classes, d)).collect();

    let mut constant = 0i64;
    let mut linear = vec![0i64; nv];
    let mut quadratic = vec![vec![0i64; nv]; nv];
    // Own utilities per part: cover agents, then one representative per class.
    let mut own: Vec<Vec<Form>> = Vec::new();
    for (j, (p, d)) in st.parts.iter().zip(&st.declared).enumerate() {
        let q = &quotients[j];
        let k = p.len();
        let mut forms = Vec::new();
        for a in 0..k + d.len() {
            let mut f = Form::zero(nv);
            for b in 0..k {
                if a != b {
                    f.constant += score(s, q.dist[a][b]);
                }
            }
            for (r, &w) in d.iter().enumerate() {
                let x = var_of[&(j, w)];
                if a == k + r {
                    // Same-class mates: (x − 1) agents at distance 2.
                    f.coeffs[x] += ExtendedValue::Finite(s2f);
                    f.constant += ExtendedValue::Finite(-s2f);
                } else {
                    f.coeffs[x] += score(s, q.dist[a][k + r]);
                }
            }
            forms.push(f);
        }
        // Welfare: cover agents count once, class representatives x times.
        for (a, f) in forms.iter().enumerate() {
            let (c0, cs) = f.finite()?;
            if a < k {
                constant += c0;
                for (l, c) in linear.iter_mut().zip(&cs) {
                    *l += c;
                }
            } else {
                let x = var_of[&(j, d[a - k])];
                linear[x] += c0;
                for (i, c) in cs.iter().enumerate() {
                    quadratic[x][i] += c;
                }
            }
        }
        own.push(forms);
    }
    // Symmetrise the quadratic part.
    for i in 0..nv {
        for j in i + 1..nv {
            let t = quadratic[i][j] + quadratic[j][i];
            quadratic[i][j] = t / 2;
            quadratic[j][i] = t - t / 2;
        }
    }
    let lin = |f: &Form, when_slack: Option<usize>| {
        let (constant, coeffs) = f.finite().expect("own utilities are finite");
        LinearConstraint { constant, coeffs, when_slack }
    };
    let mut ir = Vec::new();
    for forms in &own {
        for f in forms {
            ir.push(lin(f, None));
        }
    }
    let mut ns = ir.clone();
    // Deviation of an agent with neighbourhood `nbrs` (within the cover) into part `t`.
    // `cover_agent` is the deviating cover agent, if any; it also sees declared classes containing it.
    let deviation = |t: usize, nbrs: &[Agent], cover_agent: Option<Agent>| -> Option<Form> {
        let p = &st.parts[t];
        let d = &st.declared[t];
        let k = p.len();
        let mut adj = vec![Vec::new(); k + d.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            for (j, &b) in p.iter().enumerate() {
                if g.has_edge(a, b) {
                    adj[i].push(j);
                }
            }
        }
        for (r, &w) in d.iter().enumerate() {
            for (i, a) in p.iter().enumerate() {
                if classes[w].neighbours.contains(a) {
                    adj[k + r].push(i);
                    adj[i].push(k + r);
                }
            }
        }
        let src = k + d.len();
        for (i, a) in p.iter().enumerate() {
            if nbrs.contains(a) {
                adj[src].push(i);
            }
        }
        if let Some(u) = cover_agent {
            for (r, &w) in d.iter().enumerate() {
                if classes[w].neighbours.contains(&u) {
                    adj[src].push(k + r);
                }
            }
        }
        if adj[src].is_empty() {
            return None;
        }
        let dist = bfs_list(&adj, src);
        let mut f = Form::zero(nv);
        for b in 0..k {
            f.constant += score(s, dist[b]);
        }
        for (r, &w) in d.iter().enumerate() {
            f.coeffs[var_of[&(t, w)]] += score(s, dist[k + r]);
        }
        f.finite().map(|_| f)
    };
    let minus = |own: &Form, dev: &Form, when_slack: Option<usize>| {
        let (c0, cs) = own.finite().expect("own utilities are finite");
        let (d0, ds) = dev.finite().expect("finite deviation");
        LinearConstraint { constant: c0 - d0, coeffs: cs.iter().zip(&ds).map(|(a, b)| a - b).collect(), when_slack }
    };
    for (j, (p, d)) in st.parts.iter().zip(&st.declared).enumerate() {
        for (a, f) in own[j].iter().enumerate() {
            let (nbrs, cover_agent): (Vec<Agent>, Option<Agent>) = if a < p.len() {
                (g.neighbors(p[a]).to_vec(), Some(p[a]))
            } else {
                (classes[d[a - p.len()]].neighbours.clone(), None)
            };
            for t in (0..st.parts.len()).filter(|&t| t != j) {
                if let Some(dev) = deviation(t, &nbrs, cover_agent) {
                    ns.push(minus(f, &dev, None));
                }
            }
            // A cover agent may join an adjacent agent left alone.
            if let Some(u) = cover_agent {
                for (w, c) in classes.iter().enumerate() {
                    if c.neighbours.contains(&u) {
                        let mut single = Form::zero(nv);
                        single.constant = s.score(1);
                        ns.push(minus(f, &single, Some(w)));
                    }
                }
            }
        }
    }
    // Agents left alone must not gain by joining any coalition.
    for (w, c) in classes.iter().enumerate() {
        for t in 0..st.parts.len() {
            if let Some(dev) = deviation(t, &c.neighbours, None) {
                let zero = Form::zero(nv);
                ns.push(minus(&zero, &dev, Some(w)));
            }
        }
    }
    Some(QuadraticProgram { vars, upper, class_size, constant, linear, quadratic, ir, ns })
}

impl QuadraticProgram {
    /// Objective value of a full assignment.
    pub fn objective(&self, x: &[i64]) -> i64 {
        let mut v = self.constant;
        for i in 0..x.len() {
            v += self.linear[i] * x[i];
            for j in 0..x.len() {
                v += self.quadratic[i][j] * x[i] * x[j];
            }
        }
        v
    }

    /// Per-class slack (agents left alone) of an assignment, or `None` if negative.
    pub fn slack(&self, x: &[i64]) -> Option<Vec<i64>> {
        let mut left = self.class_size.clone();
        for (&(_, w), &v) in self.vars.iter().zip(x) {
            left[w] -= v;
        }
        left.iter().all(|&l| l >= 0).then_some(left)
    }

    /// True when `x` satisfies the bounds, the partition constraint and `mode`.
    pub fn feasible(&self, x: &[i64], mode: Mode) -> bool {
        if x.len() != self.vars.len() || x.iter().zip(&self.upper).any(|(&v, &u)| v < 1 || v > u) {
            return false;
        }
        let Some(slack) = self.slack(x) else { return false };
        let cons = match mode {
            Mode::Welfare => return true,
            Mode::Ir => &self.ir,
            Mode::Ns => &self.ns,
        };
        cons.iter().all(|c| {
            let active = c.when_slack.map_or(true, |w| slack[w] >= 1);
            !active || c.value(x) >= 0
        })
    }

    /// Upper bound on the objective over completions of `x[..fixed]`.
    fn bound(&self, x: &[i64], fixed: usize) -> i64 {
        let range = |i: usize| if i < fixed { (x[i], x[i]) } else { (1, self.upper[i]) };
        let mut v = self.constant;
        for i in 0..x.len() {
            let (lo, hi) = range(i);
            v += (self.linear[i] * lo).max(self.linear[i] * hi);
            for j in 0..x.len() {
                let (lo2, hi2) = range(j);
                let q = self.quadratic[i][j];
                let corners = if i == j {
                    [q * lo * lo, q * hi * hi, q * lo * lo, q * hi * hi]
                } else {
                    [q * lo * lo2, q * lo * hi2, q * hi * lo2, q * hi * hi2]
                };
                v += corners.into_iter().max().expect("four corners");
            }
        }
        v
    }
}

/// Search over assignments; calls `leaf` for every feasible assignment whose
/// objective is at least `*floor` (raising it as better ones appear).
fn search_qp(
    qp: &QuadraticProgram,
    mode: Mode,
    floor: &mut Option<i64>,
    nodes: &mut u64,
    leaf: &mut dyn FnMut(&[i64], i64),
) -> Result<()> {
    fn go(
        qp: &QuadraticProgram,
        mode: Mode,
        x: &mut Vec<i64>,
        left: &mut Vec<i64>,
        floor: &mut Option<i64>,
        nodes: &mut u64,
        leaf: &mut dyn FnMut(&[i64], i64),
    ) -> Result<()> {
        if *nodes == 0 {
            bail!(ResourceLimit, "quadratic program search exceeded its node budget");
        }
        *nodes -= 1;
        let i = x.len();
        if i == qp.vars.len() {
            if qp.feasible(x, mode) {
                let v = qp.objective(x);
                if floor.map_or(true, |f| v >= f) {
                    *floor = Some(floor.map_or(v, |f| f.max(v)));
                    leaf(x, v);
                }
            }
            return Ok(());
        }
        let w = qp.vars[i].1;
        // Later variables of the same class still need at least one agent each.
        let later = qp.vars[i + 1..].iter().filter(|v| v.1 == w).count() as i64;
        let hi = qp.upper[i].min(left[w] - later);
        for v in 1..=hi {
            x.push(v);
            let mut padded = x.clone();
            padded.resize(qp.vars.len(), 1);
            if floor.map_or(true, |f| qp.bound(&padded, i + 1) >= f) {
                left[w] -= v;
                go(qp, mode, x, left, floor, nodes, leaf)?;
                left[w] += v;
            }
            x.pop();
        }
        Ok(())
    }
    let mut left = qp.class_size.clone();
    go(qp, mode, &mut Vec::with_capacity(qp.vars.len()), &mut left, floor, nodes, leaf)
}

/// Best assignment of `qp` under `mode` (smallest assignment among ties), or
/// `None` if the program is infeasible.
pub fn solve_qp(qp: &QuadraticProgram, mode: Mode) -> Result<Option<(Vec<i64>, i64)>> {
    let mut floor = None;
    let mut nodes = VcConfig::default().max_qp_nodes;
    let mut best: Option<(Vec<i64>, i64)> = None;
    search_qp(qp, mode, &mut floor, &mut nodes, &mut |x, v| {
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((x.to_vec(), v));
        }
    })?;
    Ok(best)
}

/// Concrete outcome of an assignment: class agents are placed in order, the rest stay alone.
pub fn materialize(
    n: usize,
    classes: &[NeighbourhoodClass],
    st: &CoverStructure,
    qp: &QuadraticProgram,
    x: &[i64],
) -> Outcome {
    let mut coalitions: Vec<Vec<Agent>> = st.parts.clone();
    let mut next = vec![0usize; classes.len()];
    for (&(j, w), &v) in qp.vars.iter().zip(x) {
        for _ in 0..v {
            coalitions[j].push(classes[w].agents[next[w]]);
            next[w] += 1;
        }
    }
    for (w, c) in classes.iter().enumerate() {
        for &a in &c.agents[next[w]..] {
            coalitions.push(vec![a]);
        }
    }
    Outcome::new(n, coalitions).expect("structures partition the agents")
}

fn solve_connected(s: &ScoringVector, g: &SocialNetwork, mode: Mode, cfg: VcConfig) -> Result<Option<SolveResult>> {
    if g.n() == 1 {
        return Ok(Some(SolveResult { outcome: Outcome::singletons(1), welfare: ExtendedValue::ZERO, mode, optimal: true }));
    }
    let cover = compute_vertex_cover_with(g, cfg.cover_budget)?;
    let structures = enumerate_structures(g, &cover)?;
    let classes = structures.classes().to_vec();
    let mut floor: Option<i64> = None;
    let mut nodes = cfg.max_qp_nodes;
    let mut best: Option<(i64, Outcome)> = None;
    for (count, st) in structures.enumerate() {
        if count as u64 >= cfg.max_structures {
            bail!(ResourceLimit, "more than {} cover structures", cfg.max_structures);
        }
        let Some(qp) = build_qp(s, g, &classes, &st) else { continue };
        let mut err = None;
        search_qp(&qp, mode, &mut floor, &mut nodes, &mut |x, v| {
            let better = best.as_ref().map_or(true, |(b, _)| v >= *b);
            if !better {
                return;
            }
            let outcome = materialize(g.n(), &classes, &st, &qp, x);
            if social_welfare(s, g, &outcome) != ExtendedValue::Finite(v) {
                err = Some(outcome.clone());
            }
            let replace = match &best {
                None => true,
                Some((b, o)) => v > *b || outcome < *o,
            };
            if replace {
                best = Some((v, outcome));
            }
        })?;
        if let Some(o) = err {
            bail!(Unsupported, "internal error: program objective disagrees with the outcome {o}");
        }
    }
    let Some((welfare, outcome)) = best else { return Ok(None) };
    if !satisfies(s, g, &outcome, mode) {
        bail!(Unsupported, "internal error: reconstructed outcome {outcome} fails the {mode} check");
    }
    Ok(Some(SolveResult { outcome, welfare: ExtendedValue::Finite(welfare), mode, optimal: true }))
}

/// Optimal outcome under `mode` via vertex-cover structures (closed or open vectors).
pub fn solve_vc(s: &ScoringVector, g: &SocialNetwork, mode: Mode) -> Result<Option<SolveResult>> {
    solve_vc_with(s, g, mode, VcConfig::default())
}

/// [`solve_vc`] with explicit budgets.
pub fn solve_vc_with(s: &ScoringVector, g: &SocialNetwork, mode: Mode, cfg: VcConfig) -> Result<Option<SolveResult>> {
    solve_by_components(g, mode, |sub| solve_connected(s, sub, mode, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_examples() {
        let star = SocialNetwork::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(compute_vertex_cover(&star).unwrap(), vec![0]);
        let c5 = SocialNetwork::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(compute_vertex_cover(&c5).unwrap().len(), 3);
        assert!(compute_vertex_cover(&SocialNetwork::from_edges(3, &[])).unwrap().is_empty());
    }

    #[test]
    fn single_cover_agent_structures() {
        let star = SocialNetwork::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let all: Vec<CoverStructure> = enumerate_structures(&star, &[0]).unwrap().collect();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn single_class_program() {
        let star = SocialNetwork::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s = ScoringVector::closed(&[1, 1]);
        let mut it = enumerate_structures(&star, &[0]).unwrap();
        let classes = it.classes().to_vec();
        let st = it.find(|st| st.declared[0] == vec![0]).unwrap();
        let qp = build_qp(&s, &star, &classes, &st).unwrap();
        let (x, v) = solve_qp(&qp, Mode::Welfare).unwrap().unwrap();
        // Centre–leaf pairs 2·4·1, leaf pairs 4·3·1.
        assert_eq!((x, v), (vec![4], 20));
    }
}
