//! Dynamic program over a nice tree-decomposition parameterised by treewidth
//! and maximum coalition size.
//!
//! A state describes, for every coalition meeting the bag, its *topology*: the
//! graph induced by its processed members, where bag members are named and
//! forgotten members are anonymous.  Future agents only attach to bag members,
//! so the final distances inside a coalition depend on the topology alone, and
//! states are stored up to isomorphism fixing the named agents.  The welfare
//! of a coalition is added when it completes (its last bag member is
//! forgotten); disconnected and `-∞` topologies are discarded.
//!
//! Nash stability additionally keeps the edges between coalitions.  Every
//! vertex carries `req`, the largest utility it could obtain by moving to a
//! coalition that has already completed (at least `0`, the value of leaving
//! alone).  When a coalition `C` completes, the members of active coalitions
//! adjacent to `C` raise their `req` by their deviation value into `C`, and
//! every member `x` of `C` leaves a *ghost* in each adjacent active coalition:
//! a pendant vertex attached to `N(x)` (which is final) whose deviation value
//! must not exceed `u(x)` once that coalition completes.  Ghosts never lie on
//! paths between members and do not count towards the size limit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{degree_coalition_bound, treewidth_coalition_bound};
use crate::canon::{canonical_order, ColouredGraph};
use crate::error::{bail, Result};
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::{Mode, SolveResult};
use crate::treedecomp::{compute_decomposition, validate, NiceKind, NiceTreeDecomposition};
use crate::value::ExtendedValue;
use crate::Agent;

/// Default limit on the number of records stored at a single node.
pub const DEFAULT_MAX_RECORDS: usize = 2_000_000;

/// Largest number of topology vertices a single state may hold.
const MAX_VERTICES: usize = 64;

const UNSET: u32 = u32::MAX;
const UNREACHED: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Named(Agent),
    Anonymous,
    /// Deviation ghost with the utility cap of its owner.
    Ghost(i64),
}

/// Vertex colour: coalition tag (smallest named member), kind and `req`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Colour {
    coal: Agent,
    kind: Kind,
    req: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    colours: Vec<Colour>,
    adj: Vec<u64>,
}

#[derive(Debug, Clone)]
struct Record {
    welfare: i64,
    witness: Vec<u32>,
}

type Table = BTreeMap<State, Record>;

/// Mutable working copy with arbitrary coalition identifiers.
#[derive(Debug, Clone)]
struct Work {
    coal: Vec<usize>,
    kind: Vec<Kind>,
    req: Vec<i64>,
    adj: Vec<u64>,
}

struct Ctx<'a> {
    s: &'a ScoringVector,
    g: &'a SocialNetwork,
    sz: usize,
    mode: Mode,
    max_records: usize,
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// BFS distances from `src` through vertices of `allowed` (the source is never transit).
fn bfs(adj: &[u64], src: usize, allowed: u64) -> Vec<u8> {
    let mut dist = vec![UNREACHED; adj.len()];
    dist[src] = 0;
    let mut seen = bit(src);
    let mut frontier = adj[src] & allowed & !seen;
    let mut d = 1u8;
    while frontier != 0 {
        seen |= frontier;
        let mut next = 0u64;
        for v in bits(frontier) {
            dist[v] = d;
            next |= adj[v];
        }
        frontier = next & allowed & !seen;
        d += 1;
    }
    dist
}

/// Utility of `src` towards the members `targets` along paths through `allowed`.
fn utility(s: &ScoringVector, adj: &[u64], src: usize, targets: u64, allowed: u64) -> ExtendedValue {
    let dist = bfs(adj, src, allowed);
    bits(targets & !bit(src))
        .map(|v| if dist[v] == UNREACHED { ExtendedValue::NegInf } else { s.score(dist[v] as usize) })
        .sum()
}

impl Work {
    fn from_state(st: &State) -> Work {
        Work {
            coal: st.colours.iter().map(|c| c.coal).collect(),
            kind: st.colours.iter().map(|c| c.kind.clone()).collect(),
            req: st.colours.iter().map(|c| c.req).collect(),
            adj: st.adj.clone(),
        }
    }

    fn len(&self) -> usize {
        self.kind.len()
    }

    fn push(&mut self, coal: usize, kind: Kind, req: i64) -> usize {
        self.coal.push(coal);
        self.kind.push(kind);
        self.req.push(req);
        self.adj.push(0);
        self.adj.len() - 1
    }

    fn connect(&mut self, a: usize, b: usize) {
        self.adj[a] |= bit(b);
        self.adj[b] |= bit(a);
    }

    fn named(&self, a: Agent) -> Option<usize> {
        self.kind.iter().position(|k| *k == Kind::Named(a))
    }

    /// Non-ghost vertices of coalition `c`.
    fn members(&self, c: usize) -> u64 {
        (0..self.len())
            .filter(|&v| self.coal[v] == c && !matches!(self.kind[v], Kind::Ghost(_)))
            .fold(0, |m, v| m | bit(v))
    }

    fn ghosts(&self, c: usize) -> u64 {
        (0..self.len())
            .filter(|&v| self.coal[v] == c && matches!(self.kind[v], Kind::Ghost(_)))
            .fold(0, |m, v| m | bit(v))
    }

    fn has_named(&self, m: u64) -> bool {
        bits(m).any(|v| matches!(self.kind[v], Kind::Named(_)))
    }

    fn coalitions(&self) -> Vec<usize> {
        let mut cs: Vec<usize> = self.coal.clone();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Removes the vertices in `gone`, compacting indices; returns the mask remapping.
    fn remove(&mut self, gone: u64) -> impl Fn(u64) -> u64 {
        let keep: Vec<usize> = (0..self.len()).filter(|&v| gone & bit(v) == 0).collect();
        let mut pos = [usize::MAX; MAX_VERTICES];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let remap = |m: u64| bits(m & !gone).fold(0u64, |acc, v| acc | bit(pos[v]));
        self.adj = keep.iter().map(|&v| remap(self.adj[v])).collect();
        self.coal = keep.iter().map(|&v| self.coal[v]).collect();
        self.kind = keep.iter().map(|&v| self.kind[v].clone()).collect();
        self.req = keep.iter().map(|&v| self.req[v]).collect();
        move |m: u64| bits(m & !gone).fold(0u64, |acc, v| acc | bit(pos[v]))
    }

    /// Merges twin ghosts and produces the canonical state.
    fn finish(mut self) -> State {
        // Ghosts of one coalition with identical attachments: keep the smallest cap.
        let mut gone = 0u64;
        for v in 0..self.len() {
            let Kind::Ghost(cv) = self.kind[v] else { continue };
            if gone & bit(v) != 0 {
                continue;
            }
            let mut cap = cv;
            for w in v + 1..self.len() {
                if let Kind::Ghost(cw) = self.kind[w] {
                    if gone & bit(w) == 0 && self.coal[w] == self.coal[v] && self.adj[w] == self.adj[v] {
                        cap = cap.min(cw);
                        gone |= bit(w);
                    }
                }
            }
            self.kind[v] = Kind::Ghost(cap);
        }
        if gone != 0 {
            let _ = self.remove(gone);
        }
        // Coalition tags: the smallest named member.
        let mut tag: BTreeMap<usize, Agent> = BTreeMap::new();
        for v in 0..self.len() {
            if let Kind::Named(a) = self.kind[v] {
                let t = tag.entry(self.coal[v]).or_insert(a);
                *t = (*t).min(a);
            }
        }
        let colours: Vec<Colour> = (0..self.len())
            .map(|v| Colour { coal: tag[&self.coal[v]], kind: self.kind[v].clone(), req: self.req[v] })
            .collect();
        let order = canonical_order(&ColouredGraph { colours: colours.clone(), adj: self.adj.clone() });
        let mut pos = [0usize; MAX_VERTICES];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        State {
            colours: order.iter().map(|&v| colours[v].clone()).collect(),
            adj: order.iter().map(|&v| bits(self.adj[v]).fold(0u64, |m, w| m | bit(pos[w]))).collect(),
        }
    }
}

fn insert_record(ctx: &Ctx, table: &mut Table, state: State, rec: Record) -> Result<()> {
    match table.get_mut(&state) {
        Some(old) => {
            if rec.welfare > old.welfare || (rec.welfare == old.welfare && rec.witness < old.witness) {
                *old = rec;
            }
        }
        None => {
            if table.len() >= ctx.max_records {
                bail!(ResourceLimit, "more than {} topology records at one node", ctx.max_records);
            }
            table.insert(state, rec);
        }
    }
    Ok(())
}

fn introduce(ctx: &Ctx, child: &Table, a: Agent) -> Result<Table> {
    let mut out = Table::new();
    for (st, rec) in child {
        let base = Work::from_state(st);
        if base.len() >= MAX_VERTICES {
            bail!(ResourceLimit, "topology exceeds {MAX_VERTICES} vertices");
        }
        let fresh = base.coalitions().last().map_or(0, |&c| c + 1);
        let mut targets = base.coalitions();
        targets.push(fresh);
        for c in targets {
            if c != fresh && base.members(c).count_ones() as usize >= ctx.sz {
                continue;
            }
            let mut w = base.clone();
            let v = w.push(c, Kind::Named(a), 0);
            for u in 0..v {
                if let Kind::Named(b) = w.kind[u] {
                    if ctx.g.has_edge(a, b) && (ctx.mode == Mode::Ns || w.coal[u] == c) {
                        w.connect(u, v);
                    }
                }
            }
            let mut witness = rec.witness.clone();
            witness[a] = if c == fresh {
                a as u32
            } else {
                let m = bits(base.members(c))
                    .find_map(|u| if let Kind::Named(b) = base.kind[u] { Some(b) } else { None })
                    .expect("active coalitions have a named member");
                witness[m]
            };
            insert_record(ctx, &mut out, w.finish(), Record { welfare: rec.welfare, witness })?;
        }
    }
    Ok(out)
}

fn forget(ctx: &Ctx, child: &Table, a: Agent) -> Result<Table> {
    let mut out = Table::new();
    for (st, rec) in child {
        let mut w = Work::from_state(st);
        let v = w.named(a).expect("forgotten agent is in the bag");
        w.kind[v] = Kind::Anonymous;
        let c = w.coal[v];
        let members = w.members(c);
        let welfare = if w.has_named(members) {
            // Every component must still be able to connect through the bag.
            let mut rest = members;
            let mut ok = true;
            while rest != 0 {
                let start = rest.trailing_zeros() as usize;
                let comp = bfs(&w.adj, start, members)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &d)| d != UNREACHED)
                    .fold(0u64, |m, (u, _)| m | bit(u));
                if !w.has_named(comp) {
                    ok = false;
                    break;
                }
                rest &= !comp;
            }
            if !ok {
                continue;
            }
            rec.welfare
        } else {
            match complete(ctx, &mut w, c) {
                Some(x) => rec.welfare + x,
                None => continue,
            }
        };
        insert_record(ctx, &mut out, w.finish(), Record { welfare, witness: rec.witness.clone() })?;
    }
    Ok(out)
}

/// Completes coalition `c`: returns its welfare, or `None` if it is
/// infeasible for the mode; updates deviation data of the remaining vertices.
fn complete(ctx: &Ctx, w: &mut Work, c: usize) -> Option<i64> {
    let s = ctx.s;
    let members = w.members(c);
    let utils: Vec<(usize, i64)> =
        bits(members).map(|v| utility(s, &w.adj, v, members, members).finite().map(|u| (v, u))).collect::<Option<_>>()?;
    let total: i64 = utils.iter().map(|&(_, u)| u).sum();
    match ctx.mode {
        Mode::Welfare => {}
        Mode::Ir => {
            if utils.iter().any(|&(_, u)| u < 0) {
                return None;
            }
        }
        Mode::Ns => {
            if utils.iter().any(|&(v, u)| u < w.req[v]) {
                return None;
            }
            for gh in bits(w.ghosts(c)) {
                let Kind::Ghost(cap) = w.kind[gh] else { unreachable!() };
                if utility(s, &w.adj, gh, members, members) > ExtendedValue::Finite(cap) {
                    return None;
                }
            }
            let others: Vec<usize> = w.coalitions().into_iter().filter(|&d| d != c).collect();
            // Active agents next to `c` learn their deviation value into `c`.
            for d in &others {
                for v in bits(w.members(*d)) {
                    if w.adj[v] & members != 0 {
                        if let ExtendedValue::Finite(dev) = utility(s, &w.adj, v, members, members) {
                            w.req[v] = w.req[v].max(dev);
                        }
                    }
                }
            }
            // Members of `c` leave ghosts in adjacent active coalitions.
            let mut ghosts = Vec::new();
            for &(x, ux) in &utils {
                for &d in &others {
                    let att = w.adj[x] & w.members(d);
                    if att != 0 {
                        ghosts.push((d, att, ux));
                    }
                }
            }
            let remap = w.remove(members | w.ghosts(c));
            let ghosts: Vec<(usize, u64, i64)> = ghosts.into_iter().map(|(d, att, ux)| (d, remap(att), ux)).collect();
            for (d, att, ux) in ghosts {
                if w.len() >= MAX_VERTICES {
                    return None;
                }
                let gh = w.push(d, Kind::Ghost(ux), 0);
                for u in bits(att) {
                    w.connect(u, gh);
                }
            }
            return Some(total);
        }
    }
    let _ = w.remove(members | w.ghosts(c));
    Some(total)
}

fn join(ctx: &Ctx, left: &Table, right: &Table) -> Result<Table> {
    let key = |st: &State| -> Vec<(Agent, Agent)> {
        st.colours.iter().filter_map(|c| if let Kind::Named(a) = c.kind { Some((a, c.coal)) } else { None }).collect()
    };
    let mut groups: BTreeMap<Vec<(Agent, Agent)>, Vec<(&State, &Record)>> = BTreeMap::new();
    for (st, rec) in right {
        groups.entry(key(st)).or_default().push((st, rec));
    }
    let mut out = Table::new();
    for (ls, lr) in left {
        let Some(rs) = groups.get(&key(ls)) else { continue };
        for &(rst, rrec) in rs {
            let mut w = Work::from_state(ls);
            // Coalition ids of `w` are tags; map the right side's vertices onto them.
            let r = Work::from_state(rst);
            if w.len() + r.len() > MAX_VERTICES + key(ls).len() {
                bail!(ResourceLimit, "joined topology exceeds {MAX_VERTICES} vertices");
            }
            let mut pos = vec![usize::MAX; r.len()];
            for v in 0..r.len() {
                pos[v] = match r.kind[v] {
                    Kind::Named(a) => {
                        let u = w.named(a).expect("same named agents");
                        w.req[u] = w.req[u].max(r.req[v]);
                        u
                    }
                    ref k => w.push(r.coal[v], k.clone(), r.req[v]),
                };
            }
            for v in 0..r.len() {
                for x in bits(r.adj[v]) {
                    w.adj[pos[v]] |= bit(pos[x]);
                }
            }
            if w.coalitions().iter().any(|&c| w.members(c).count_ones() as usize > ctx.sz) {
                continue;
            }
            let witness = merge_witness(&key(ls), &lr.witness, &rrec.witness);
            insert_record(ctx, &mut out, w.finish(), Record { welfare: lr.welfare + rrec.welfare, witness })?;
        }
    }
    Ok(out)
}

fn merge_witness(named: &[(Agent, Agent)], l: &[u32], r: &[u32]) -> Vec<u32> {
    let map: BTreeMap<u32, u32> = named.iter().map(|&(a, _)| (r[a], l[a])).collect();
    l.iter()
        .zip(r)
        .map(|(&x, &y)| {
            if x != UNSET {
                x
            } else if y == UNSET {
                UNSET
            } else {
                *map.get(&y).unwrap_or(&y)
            }
        })
        .collect()
}

/// Smallest applicable coalition-size bound (treewidth bound when `s(2) < 0`,
/// degree bound for closed vectors), clamped to `n`; `None` if neither applies.
pub fn select_sz(s: &ScoringVector, g: &SocialNetwork) -> Option<usize> {
    let mut best: Option<usize> = None;
    if s.score(2) < ExtendedValue::ZERO {
        if let Ok(t) = compute_decomposition(g, crate::treedecomp::DEFAULT_BUDGET) {
            if let Ok(b) = treewidth_coalition_bound(s, t.width()) {
                best = Some(b);
            }
        }
    }
    if let Ok(b) = degree_coalition_bound(s, g.max_degree()) {
        best = Some(best.map_or(b, |x| x.min(b)));
    }
    best.map(|b| b.min(g.n()).max(1))
}

/// Optimum under `mode` among outcomes whose coalitions have at most `sz`
/// agents, or `None` if no such NS outcome exists.
///
/// `optimal` is set only when `sz` is at least `n` or at least the bound of
/// [`select_sz`], i.e. when the size limit cannot exclude every optimum.
pub fn solve_fpt(
    s: &ScoringVector,
    g: &SocialNetwork,
    d: &NiceTreeDecomposition,
    sz: usize,
    mode: Mode,
) -> Result<Option<SolveResult>> {
    solve_fpt_with(s, g, d, sz, mode, DEFAULT_MAX_RECORDS)
}

/// [`solve_fpt`] with an explicit per-node record budget.
pub fn solve_fpt_with(
    s: &ScoringVector,
    g: &SocialNetwork,
    d: &NiceTreeDecomposition,
    sz: usize,
    mode: Mode,
    max_records: usize,
) -> Result<Option<SolveResult>> {
    if sz == 0 {
        bail!(InvalidArgument, "the coalition size limit must be at least 1");
    }
    if let Err(e) = d.check_nice() {
        bail!(InvalidArgument, "decomposition is not nice: {e}");
    }
    if let Err(v) = validate(g, &d.to_tree_decomposition()) {
        bail!(InvalidArgument, "decomposition is invalid: {v}");
    }
    let ctx = Ctx { s, g, sz: sz.min(g.n().max(1)), mode, max_records };
    let mut tables: Vec<Option<Table>> = vec![None; d.nodes.len()];
    for (i, node) in d.nodes.iter().enumerate() {
        let mut take = |c: usize| tables[c].take().expect("children are processed first");
        let t = match node.kind {
            NiceKind::Leaf => {
                let mut t = Table::new();
                t.insert(State { colours: Vec::new(), adj: Vec::new() }, Record { welfare: 0, witness: vec![UNSET; g.n()] });
                t
            }
            NiceKind::Introduce(a) => introduce(&ctx, &take(node.children[0]), a)?,
            NiceKind::Forget(a) => forget(&ctx, &take(node.children[0]), a)?,
            NiceKind::Join => {
                let l = take(node.children[0]);
                let r = take(node.children[1]);
                join(&ctx, &l, &r)?
            }
        };
        tables[i] = Some(t);
    }
    let root = tables[d.root()].take().expect("root processed");
    let optimal = sz >= g.n() || select_sz(s, g).is_some_and(|b| sz >= b);
    Ok(root.into_iter().next().map(|(_, rec)| {
        let labels: Vec<u32> = rec.witness.iter().enumerate().map(|(a, &k)| if k == UNSET { a as u32 } else { k }).collect();
        SolveResult { outcome: Outcome::from_labels(&labels), welfare: ExtendedValue::Finite(rec.welfare), mode, optimal }
    }))
}
