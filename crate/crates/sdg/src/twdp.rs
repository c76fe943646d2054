//! Dynamic programs over a nice tree-decomposition for closed scoring vectors.
//!
//! # State
//!
//! For every coalition `P` meeting the current bag the state records
//!
//! * the bag members `B_P` and their *final* pairwise distances `D` inside
//!   `G[P]` (guessed when the later member is introduced, values in `1..=δ`),
//! * the multiset `T_P` of forgotten members, each described by its final
//!   distance vector to `B_P`,
//! * `nb_u` for every member `u`: the coordinate-wise minimum of the vectors of
//!   `u`'s forgotten neighbours inside `P`.
//!
//! Distances between a forgotten and a newly introduced agent are derived
//! through the bag, which separates them: `F(x,a) = min_b F(x,b) + D(b,a)`.
//! Guessed distances are verified when the first of the two agents is
//! forgotten, at which point all of its neighbours are known: the Bellman
//! equation `D(u,v) = 1 + min_{w ∈ N(u) ∩ P} D(w,v)` must hold.  These
//! equations (together with the derived values) have the true distances as
//! their unique solution, so every surviving record describes its witness
//! exactly.  Outcomes with a `-∞` agent are never optimal in any mode and are
//! discarded as soon as a distance above `δ` appears.
//!
//! Welfare is accumulated per ordered pair when the later agent of the pair
//! is introduced; join nodes subtract the bag pairs counted on both sides and
//! add pairs of forgotten agents from opposite sides, whose distance runs
//! through the bag (`min_b d_y[b] + d_z[b]`).
//!
//! # Individual rationality
//!
//! Bag members carry their partial utility.  Forgotten members with equal
//! vectors receive identical future contributions, so only the minimum
//! ("critical") utility per vector is kept; it is checked when the coalition
//! completes (its last bag member is forgotten).
//!
//! # Nash stability
//!
//! A deviation of agent `i` into coalition `C` is modelled by a *ghost*: a
//! pseudo-member of `C` adjacent to `N(i) ∩ C` that never lies on paths
//! between members.  Ghost distances to members are guessed (with the extra
//! value "beyond `δ`") and verified by Bellman equations from either side, in
//! capped arithmetic.  The state tracks, per bag agent, its best deviation into
//! completed coalitions, per ghost its partial deviation utility, and for
//! forgotten agents the minimum of `u(i) − max(0, best past deviation)` and
//! `u(i) − dev(i, C)` per (vector, ghost vector) class.  Every class is checked
//! when the relevant coalitions complete.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::{Mode, SolveResult};
use crate::treedecomp::{NiceKind, NiceTreeDecomposition};
use crate::value::ExtendedValue;
use crate::Agent;

/// "Beyond `δ`" / "no such neighbour" in distance vectors.
const INF: u8 = u8::MAX;
/// Witness marker for agents not yet introduced.
const UNSET: u32 = u32::MAX;

/// A deviation ghost of a bag agent inside a coalition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Ghost {
    owner: Agent,
    /// Distance from the ghost to each bag member of the coalition.
    h: Vec<u8>,
    /// Minimum over forgotten attachments `w` of `F(w, ·)` on bag members.
    gnb: Vec<u8>,
    /// Partial utility of the deviation.
    dev: ExtendedValue,
}

/// One coalition meeting the bag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Coal {
    members: Vec<Agent>,
    /// `k × k` distance matrix over `members`.
    dist: Vec<u8>,
    ghosts: Vec<Ghost>,
    /// Forgotten members: vector over members then ghosts, with multiplicity.
    forgotten: Vec<(Vec<u8>, u32)>,
    /// Per member: minimum vector of forgotten neighbours (members then ghosts).
    nb: Vec<Vec<u8>>,
    /// Per member: partial utility.
    util: Vec<i64>,
    /// Per member: `max(0, best deviation into a completed coalition)`.
    best_past: Vec<i64>,
    /// Forgotten members' critical slack `u − max(0, past)` per member vector.
    crit: Vec<(Vec<u8>, i64)>,
    /// Ghosts of forgotten agents whose own coalition completed: `u − dev` per ghost vector.
    orphans: Vec<(Vec<u8>, i64)>,
}

/// Slack `u(x) − dev(x, ghost coalition)` of forgotten agents in two active coalitions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Link {
    own: usize,
    f: Vec<u8>,
    target: usize,
    h: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    coals: Vec<Coal>,
    links: Vec<(Link, i64)>,
}

#[derive(Debug, Clone)]
struct Record {
    welfare: i64,
    witness: Vec<u32>,
}

type Table = BTreeMap<State, Record>;

struct Ctx<'a> {
    g: &'a SocialNetwork,
    delta: u8,
    scores: Vec<i64>,
    util: bool,
    ghosts: bool,
}

fn merge_min<K: Ord>(v: &mut Vec<(K, i64)>) {
    v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    v.dedup_by(|later, first| later.0 == first.0);
}

fn merge_count(v: &mut Vec<(Vec<u8>, u32)>) {
    v.sort();
    let mut out: Vec<(Vec<u8>, u32)> = Vec::with_capacity(v.len());
    for (k, c) in v.drain(..) {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    *v = out;
}

impl Ctx<'_> {
    fn add(&self, a: u8, b: u8) -> u8 {
        if a == INF || b == INF {
            return INF;
        }
        let s = a as u16 + b as u16;
        if s > self.delta as u16 {
            INF
        } else {
            s as u8
        }
    }

    fn score(&self, d: u8) -> ExtendedValue {
        if d == INF || d == 0 || d > self.delta {
            ExtendedValue::NegInf
        } else {
            ExtendedValue::Finite(self.scores[d as usize - 1])
        }
    }

    /// Finite score of a member distance (always `1..=δ`).
    fn sc(&self, d: u8) -> i64 {
        self.scores[d as usize - 1]
    }

    /// `min_i a[i] + b[i]` over the first `k` coordinates, capped.
    fn via(&self, a: &[u8], b: &[u8], k: usize) -> u8 {
        (0..k).map(|i| self.add(a[i], b[i])).min().unwrap_or(INF)
    }
}

impl Coal {
    fn k(&self) -> usize {
        self.members.len()
    }

    fn d(&self, p: usize, q: usize) -> u8 {
        self.dist[p * self.k() + q]
    }

    /// Row `p` of the distance matrix.
    fn row(&self, p: usize) -> Vec<u8> {
        (0..self.k()).map(|q| self.d(p, q)).collect()
    }

    fn ghost_index(&self, owner: Agent) -> Option<usize> {
        self.ghosts.iter().position(|g| g.owner == owner)
    }

    /// Removes member coordinate `p` everywhere inside this coalition.
    fn drop_member_coord(&mut self, p: usize) {
        let k = self.k();
        let mut dist = Vec::with_capacity((k - 1) * (k - 1));
        for a in 0..k {
            for b in 0..k {
                if a != p && b != p {
                    dist.push(self.dist[a * k + b]);
                }
            }
        }
        self.dist = dist;
        self.members.remove(p);
        for gh in &mut self.ghosts {
            gh.h.remove(p);
            gh.gnb.remove(p);
        }
        for (v, _) in &mut self.forgotten {
            v.remove(p);
        }
        merge_count(&mut self.forgotten);
        self.nb.remove(p);
        for row in &mut self.nb {
            row.remove(p);
        }
        if !self.util.is_empty() {
            self.util.remove(p);
            self.best_past.remove(p);
        }
        for (v, _) in &mut self.crit {
            v.remove(p);
        }
        merge_min(&mut self.crit);
        for (v, _) in &mut self.orphans {
            v.remove(p);
        }
        merge_min(&mut self.orphans);
    }

    /// Removes ghost `j` (coordinate `k + j` of forgotten vectors and `nb`).
    fn drop_ghost(&mut self, j: usize) -> Ghost {
        let k = self.k();
        for (v, _) in &mut self.forgotten {
            v.remove(k + j);
        }
        merge_count(&mut self.forgotten);
        for row in &mut self.nb {
            row.remove(k + j);
        }
        self.ghosts.remove(j)
    }
}

impl State {
    /// Sorts coalitions by smallest member, remapping link indices.
    fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.coals.len()).collect();
        order.sort_by_key(|&i| self.coals[i].members[0]);
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut coals: Vec<Option<Coal>> = core::mem::take(&mut self.coals).into_iter().map(Some).collect();
        self.coals = order.iter().map(|&i| coals[i].take().expect("each index once")).collect();
        for (l, _) in &mut self.links {
            l.own = new_index[l.own];
            l.target = new_index[l.target];
        }
        merge_min(&mut self.links);
    }

    fn coal_of(&self, a: Agent) -> Option<(usize, usize)> {
        self.coals
            .iter()
            .enumerate()
            .find_map(|(c, co)| co.members.iter().position(|&m| m == a).map(|p| (c, p)))
    }

    /// Shape compared at join nodes: members, distances and ghost vectors.
    fn shape(&self) -> Vec<(Vec<Agent>, Vec<u8>, Vec<(Agent, Vec<u8>)>)> {
        self.coals
            .iter()
            .map(|c| (c.members.clone(), c.dist.clone(), c.ghosts.iter().map(|g| (g.owner, g.h.clone())).collect()))
            .collect()
    }
}

/// Enumerates member distance guesses `D(a, b)` for the members of `c`.
fn member_guesses(ctx: &Ctx, c: &Coal, a: Agent) -> Vec<Vec<u8>> {
    let k = c.k();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(ctx: &Ctx, c: &Coal, a: Agent, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let p = cur.len();
        if p == c.k() {
            out.push(cur.clone());
            return;
        }
        let b = c.members[p];
        let range: Vec<u8> = if ctx.g.has_edge(a, b) { vec![1] } else { (2..=ctx.delta).collect() };
        for d in range {
            let ok = (0..p).all(|q| {
                let dq = cur[q] as i16;
                (d as i16 - dq).abs() <= c.d(p, q) as i16
            });
            if ok {
                cur.push(d);
                rec(ctx, c, a, cur, out);
                cur.pop();
            }
        }
    }
    rec(ctx, c, a, &mut cur, &mut out);
    let _ = k;
    out
}

/// Candidate values of a ghost distance to a member: `1` iff adjacent.
fn ghost_range(ctx: &Ctx, owner: Agent, member: Agent) -> Vec<u8> {
    if ctx.g.has_edge(owner, member) {
        vec![1]
    } else {
        let mut r: Vec<u8> = (2..=ctx.delta).collect();
        r.push(INF);
        r
    }
}

fn capped_le(ctx: &Ctx, x: u8, y: u8, d: u8) -> bool {
    // x ≤ y + d in capped arithmetic (INF above everything).
    let bound = ctx.add(y, d);
    bound == INF || (x != INF && x <= bound)
}

/// Enumerates ghost vectors of `owner` over all members of `c` (pairwise
/// consistent with member distances).
fn ghost_vectors(ctx: &Ctx, c: &Coal, owner: Agent) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    fn rec(ctx: &Ctx, c: &Coal, owner: Agent, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let p = cur.len();
        if p == c.k() {
            out.push(cur.clone());
            return;
        }
        for h in ghost_range(ctx, owner, c.members[p]) {
            let ok = (0..p).all(|q| capped_le(ctx, h, cur[q], c.d(p, q)) && capped_le(ctx, cur[q], h, c.d(p, q)));
            if ok {
                cur.push(h);
                rec(ctx, c, owner, cur, out);
                cur.pop();
            }
        }
    }
    rec(ctx, c, owner, &mut Vec::new(), &mut out);
    out
}

fn cartesian(lists: &[Vec<Vec<u8>>]) -> Vec<Vec<Vec<u8>>> {
    let mut acc: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(acc.len() * l.len());
        for prefix in &acc {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

fn insert_record(table: &mut Table, state: State, rec: Record) {
    match table.get_mut(&state) {
        Some(old) => {
            if rec.welfare > old.welfare || (rec.welfare == old.welfare && rec.witness < old.witness) {
                *old = rec;
            }
        }
        None => {
            table.insert(state, rec);
        }
    }
}

/// Adds ghost `owner` with vector `h` to coalition `c` (NS mode).
fn add_ghost(ctx: &Ctx, c: &mut Coal, owner: Agent, h: Vec<u8>) {
    let k = c.k();
    let j = c.ghosts.iter().position(|g| g.owner > owner).unwrap_or(c.ghosts.len());
    let mut dev: ExtendedValue = h.iter().map(|&d| ctx.score(d)).sum();
    for (v, cnt) in &mut c.forgotten {
        let hx = ctx.via(&h, v, k);
        dev += (*cnt as u64) * ctx.score(hx);
        v.insert(k + j, hx);
    }
    for row in &mut c.nb {
        let x = ctx.via(&h, row, k);
        row.insert(k + j, x);
    }
    c.ghosts.insert(j, Ghost { owner, gnb: vec![INF; k], h, dev });
}

fn introduce(ctx: &Ctx, child: &Table, a: Agent) -> Table {
    let mut out = Table::new();
    for (st, rec) in child {
        // Placement: an existing coalition or a fresh one.
        for place in 0..=st.coals.len() {
            let fresh = place == st.coals.len();
            let dguesses = if fresh { vec![Vec::new()] } else { member_guesses(ctx, &st.coals[place], a) };
            for dg in dguesses {
                // Ghost guesses: existing ghosts of the target coalition (value for `a`),
                // and `a`'s ghosts in every other coalition.
                let mut lists: Vec<Vec<Vec<u8>>> = Vec::new();
                if ctx.ghosts {
                    if fresh {
                        for co in &st.coals {
                            for &i in &co.members {
                                lists.push(ghost_range(ctx, i, a).into_iter().map(|x| vec![x]).collect());
                            }
                        }
                    } else {
                        let c = &st.coals[place];
                        for gh in &c.ghosts {
                            let cands: Vec<Vec<u8>> = ghost_range(ctx, gh.owner, a)
                                .into_iter()
                                .filter(|&x| {
                                    (0..c.k()).all(|b| capped_le(ctx, x, gh.h[b], dg[b]) && capped_le(ctx, gh.h[b], x, dg[b]))
                                })
                                .map(|x| vec![x])
                                .collect();
                            lists.push(cands);
                        }
                    }
                    for (q, co) in st.coals.iter().enumerate() {
                        if q != place {
                            lists.push(ghost_vectors(ctx, co, a));
                        }
                    }
                }
                for combo in cartesian(&lists) {
                    if let Some((ns, w)) = apply_introduce(ctx, st, rec.welfare, a, place, &dg, &combo) {
                        let mut witness = rec.witness.clone();
                        witness[a] = if fresh { a as u32 } else { witness[st.coals[place].members[0]] };
                        insert_record(&mut out, ns, Record { welfare: w, witness });
                    }
                }
            }
        }
    }
    out
}

fn apply_introduce(
    ctx: &Ctx,
    st: &State,
    welfare: i64,
    a: Agent,
    place: usize,
    dg: &[u8],
    combo: &[Vec<u8>],
) -> Option<(State, i64)> {
    let mut st = st.clone();
    let mut welfare = welfare;
    let mut combo_it = combo.iter();
    let fresh = place == st.coals.len();
    if fresh {
        let mut c = Coal {
            members: vec![a],
            dist: vec![0],
            ghosts: Vec::new(),
            forgotten: Vec::new(),
            nb: vec![Vec::new()],
            util: Vec::new(),
            best_past: Vec::new(),
            crit: Vec::new(),
            orphans: Vec::new(),
        };
        if ctx.util {
            c.util.push(0);
            c.best_past.push(0);
        }
        c.nb[0] = vec![INF];
        if ctx.ghosts {
            let mut owners: Vec<Agent> = st.coals.iter().flat_map(|co| co.members.iter().copied()).collect();
            // Guesses were produced in coalition order; pair them before sorting.
            let mut pairs: Vec<(Agent, Vec<u8>)> =
                owners.iter().map(|&i| (i, combo_it.next().expect("one guess per owner").clone())).collect();
            pairs.sort();
            owners.sort_unstable();
            for (i, h) in pairs {
                add_ghost(ctx, &mut c, i, h);
            }
        }
        st.coals.push(c);
    } else {
        let c = &mut st.coals[place];
        let k = c.k();
        let p = c.members.iter().position(|&m| m > a).unwrap_or(k);
        // Forgotten members: derived distance to `a`.
        let mut from_forgotten: i64 = 0;
        for (v, cnt) in &mut c.forgotten {
            let fa = ctx.via(v, dg, k);
            if fa == INF {
                return None;
            }
            from_forgotten += *cnt as i64 * ctx.sc(fa);
            welfare += 2 * *cnt as i64 * ctx.sc(fa);
            v.insert(p, fa);
        }
        for (v, val) in &mut c.crit {
            let fa = ctx.via(v, dg, k);
            if fa == INF {
                return None;
            }
            *val += ctx.sc(fa);
            v.insert(p, fa);
        }
        let mut orphans = Vec::with_capacity(c.orphans.len());
        for (mut v, val) in core::mem::take(&mut c.orphans) {
            let ha = ctx.via(&v, dg, k);
            if ha == INF {
                continue;
            }
            v.insert(p, ha);
            orphans.push((v, val - ctx.sc(ha)));
        }
        c.orphans = orphans;
        merge_min(&mut c.orphans);
        // Member distances and utilities.
        let mut ua: i64 = from_forgotten;
        for (b, &d) in dg.iter().enumerate() {
            welfare += 2 * ctx.sc(d);
            ua += ctx.sc(d);
            if ctx.util {
                c.util[b] += ctx.sc(d);
            }
        }
        let mut dist = Vec::with_capacity((k + 1) * (k + 1));
        for x in 0..=k {
            for y in 0..=k {
                let ox = if x == p { None } else { Some(if x > p { x - 1 } else { x }) };
                let oy = if y == p { None } else { Some(if y > p { y - 1 } else { y }) };
                dist.push(match (ox, oy) {
                    (None, None) => 0,
                    (None, Some(q)) | (Some(q), None) => dg[q],
                    (Some(u), Some(v)) => c.dist[u * k + v],
                });
            }
        }
        c.dist = dist;
        // nb rows of existing members get the derived coordinate for `a`.
        for row in &mut c.nb {
            let x = ctx.via(row, dg, k);
            row.insert(p, x);
        }
        // Existing ghosts: guessed distance to `a`.
        for gh in &mut c.ghosts {
            let x = combo_it.next().expect("one guess per ghost")[0];
            gh.dev += ctx.score(x);
            gh.h.insert(p, x);
            let gx = ctx.via(&gh.gnb, dg, k);
            gh.gnb.insert(p, gx);
        }
        c.members.insert(p, a);
        let width = k + 1 + c.ghosts.len();
        c.nb.insert(p, vec![INF; width]);
        if ctx.util {
            c.util.insert(p, ua);
            c.best_past.insert(p, 0);
        }
        // Links whose own coalition gains `a`.
        let mut links = Vec::with_capacity(st.links.len());
        for (mut l, val) in core::mem::take(&mut st.links) {
            let mut val = val;
            if l.own == place {
                let fa = ctx.via(&l.f, dg, k);
                if fa == INF {
                    return None;
                }
                val += ctx.sc(fa);
                l.f.insert(p, fa);
            }
            if l.target == place {
                let ha = ctx.via(&l.h, dg, k);
                if ha == INF {
                    continue;
                }
                val -= ctx.sc(ha);
                l.h.insert(p, ha);
            }
            links.push((l, val));
        }
        st.links = links;
    }
    // `a`'s ghosts in the other coalitions.
    if ctx.ghosts {
        for q in 0..st.coals.len() {
            if q == place || (fresh && q == st.coals.len() - 1) {
                continue;
            }
            let h = combo_it.next().expect("one vector per other coalition").clone();
            add_ghost(ctx, &mut st.coals[q], a, h);
        }
    }
    st.canonicalize();
    Some((st, welfare))
}

fn forget(ctx: &Ctx, child: &Table, u: Agent) -> Table {
    let mut out = Table::new();
    for (st, rec) in child {
        if let Some(ns) = apply_forget(ctx, st, u) {
            insert_record(&mut out, ns, rec.clone());
        }
    }
    out
}

fn apply_forget(ctx: &Ctx, st: &State, u: Agent) -> Option<State> {
    let g = ctx.g;
    let mut st = st.clone();
    let (c, p) = st.coal_of(u).expect("forgotten agent is in the bag");
    // Member-side checks inside u's coalition.
    {
        let co = &st.coals[c];
        let k = co.k();
        let nbrs: Vec<usize> = (0..k).filter(|&w| g.has_edge(u, co.members[w])).collect();
        for v in (0..k).filter(|&v| v != p) {
            let best = nbrs.iter().map(|&w| co.d(w, v)).min().unwrap_or(INF).min(co.nb[p][v]);
            if ctx.add(1, best) != co.d(p, v) {
                return None;
            }
        }
        for (j, gh) in co.ghosts.iter().enumerate() {
            let mut best = co.nb[p][k + j];
            if g.has_edge(u, gh.owner) {
                best = 0;
            }
            for &w in &nbrs {
                best = best.min(gh.h[w]);
            }
            let expect = if best == 0 { 1 } else { ctx.add(1, best) };
            if expect != gh.h[p] {
                return None;
            }
        }
    }
    // Ghost-side checks for u's ghosts; collect the live ones.
    let mut live: Vec<(usize, Vec<u8>, ExtendedValue)> = Vec::new();
    if ctx.ghosts {
        for q in 0..st.coals.len() {
            if q == c {
                continue;
            }
            let co = &st.coals[q];
            let j = co.ghost_index(u).expect("every bag agent has a ghost in other coalitions");
            let gh = &co.ghosts[j];
            let k = co.k();
            let atts: Vec<usize> = (0..k).filter(|&w| g.has_edge(u, co.members[w])).collect();
            for b in 0..k {
                let mut best = gh.gnb[b];
                for &w in &atts {
                    best = best.min(co.d(w, b));
                }
                if ctx.add(1, best) != gh.h[b] {
                    return None;
                }
            }
            let gh = st.coals[q].drop_ghost(j);
            if !gh.dev.is_neg_inf() {
                live.push((q, gh.h, gh.dev));
            }
        }
    }
    // Fold u into its coalition's forgotten members.
    let co = &mut st.coals[c];
    let k = co.k();
    let mut fu: Vec<u8> = co.row(p);
    fu.extend(co.ghosts.iter().map(|gh| gh.h[p]));
    for v in 0..k {
        if v != p && g.has_edge(u, co.members[v]) {
            for (x, &y) in co.nb[v].iter_mut().zip(&fu) {
                *x = (*x).min(y);
            }
        }
    }
    for gh in &mut co.ghosts {
        if g.has_edge(u, gh.owner) {
            for (x, &y) in gh.gnb.iter_mut().zip(&fu[..k]) {
                *x = (*x).min(y);
            }
        }
    }
    let (uu, bp) = if ctx.util { (co.util[p], co.best_past[p]) } else { (0, 0) };
    co.drop_member_coord(p);
    fu.remove(p);
    let f_members: Vec<u8> = fu[..k - 1].to_vec();
    if co.k() > 0 {
        co.forgotten.push((fu, 1));
        merge_count(&mut co.forgotten);
        if ctx.util {
            co.crit.push((f_members.clone(), uu - bp));
            merge_min(&mut co.crit);
        }
        for (q, h, dev) in live {
            let dv = dev.finite().expect("live ghosts are finite");
            st.links.push((Link { own: c, f: f_members.clone(), target: q, h }, uu - dv));
        }
        merge_min(&mut st.links);
        st.canonicalize();
        return Some(st);
    }
    // The coalition completes.
    if ctx.util {
        if uu - bp < 0 || co.crit.iter().any(|&(_, v)| v < 0) || co.orphans.iter().any(|&(_, v)| v < 0) {
            return None;
        }
    }
    let done = st.coals.remove(c);
    let remap = |x: usize| if x > c { x - 1 } else { x };
    for (q, h, dev) in live {
        let dv = dev.finite().expect("live ghosts are finite");
        st.coals[remap(q)].orphans.push((h, uu - dv));
    }
    let mut links = Vec::new();
    for (l, val) in core::mem::take(&mut st.links) {
        if l.own == c {
            st.coals[remap(l.target)].orphans.push((l.h, val));
        } else if l.target == c {
            st.coals[remap(l.own)].crit.push((l.f, val));
        } else {
            links.push((Link { own: remap(l.own), f: l.f, target: remap(l.target), h: l.h }, val));
        }
    }
    st.links = links;
    // Bag agents' deviations into the completed coalition are now final.
    for gh in &done.ghosts {
        if let ExtendedValue::Finite(d) = gh.dev {
            let (oc, op) = st.coal_of(gh.owner).expect("ghost owners are in the bag");
            let bp = &mut st.coals[oc].best_past[op];
            *bp = (*bp).max(d);
        }
    }
    for co in &mut st.coals {
        merge_min(&mut co.crit);
        merge_min(&mut co.orphans);
    }
    st.canonicalize();
    Some(st)
}

fn join(ctx: &Ctx, left: &Table, right: &Table) -> Table {
    let mut groups: BTreeMap<_, Vec<(&State, &Record)>> = BTreeMap::new();
    for (st, rec) in right {
        groups.entry(st.shape()).or_default().push((st, rec));
    }
    let mut out = Table::new();
    for (ls, lr) in left {
        let Some(rs) = groups.get(&ls.shape()) else { continue };
        for &(rst, rrec) in rs {
            if let Some((ns, w)) = apply_join(ctx, ls, lr.welfare, rst, rrec.welfare) {
                let witness = merge_witness(ls, &lr.witness, &rrec.witness);
                insert_record(&mut out, ns, Record { welfare: w, witness });
            }
        }
    }
    out
}

fn merge_witness(st: &State, l: &[u32], r: &[u32]) -> Vec<u32> {
    // Coalitions meeting the bag carry (possibly different) keys on each side.
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    for co in &st.coals {
        for &m in &co.members {
            map.insert(r[m], l[m]);
        }
    }
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

/// Sum of `cnt · s(via(vec, ·))` over the forgotten members of `other`.
fn cross(ctx: &Ctx, v: &[u8], other: &Coal) -> ExtendedValue {
    let k = other.k();
    other.forgotten.iter().map(|(w, cnt)| (*cnt as u64) * ctx.score(ctx.via(v, w, k))).sum()
}

fn apply_join(ctx: &Ctx, l: &State, lw: i64, r: &State, rw: i64) -> Option<(State, i64)> {
    let mut st = l.clone();
    let mut welfare = lw + rw;
    for (c, (lc, rc)) in l.coals.iter().zip(&r.coals).enumerate() {
        let k = lc.k();
        let co = &mut st.coals[c];
        for x in 0..k {
            for y in x + 1..k {
                welfare -= 2 * ctx.sc(lc.d(x, y));
            }
        }
        for (lv, lc_cnt) in &lc.forgotten {
            for (rv, rc_cnt) in &rc.forgotten {
                let d = ctx.via(lv, rv, k);
                if d == INF {
                    return None;
                }
                welfare += 2 * (*lc_cnt as i64) * (*rc_cnt as i64) * ctx.sc(d);
            }
        }
        co.forgotten.extend(rc.forgotten.iter().cloned());
        merge_count(&mut co.forgotten);
        for (row, rrow) in co.nb.iter_mut().zip(&rc.nb) {
            for (x, &y) in row.iter_mut().zip(rrow) {
                *x = (*x).min(y);
            }
        }
        for (gh, rg) in co.ghosts.iter_mut().zip(&rc.ghosts) {
            for (x, &y) in gh.gnb.iter_mut().zip(&rg.gnb) {
                *x = (*x).min(y);
            }
            let bag: ExtendedValue = gh.h.iter().map(|&d| ctx.score(d)).sum();
            gh.dev = match (gh.dev, rg.dev, bag) {
                (ExtendedValue::Finite(a), ExtendedValue::Finite(b), ExtendedValue::Finite(c)) => {
                    ExtendedValue::Finite(a + b - c)
                }
                _ => ExtendedValue::NegInf,
            };
        }
        if ctx.util {
            for x in 0..k {
                let dup: i64 = (0..k).filter(|&y| y != x).map(|y| ctx.sc(lc.d(x, y))).sum();
                co.util[x] = lc.util[x] + rc.util[x] - dup;
                co.best_past[x] = lc.best_past[x].max(rc.best_past[x]);
            }
            let mut crit = Vec::with_capacity(lc.crit.len() + rc.crit.len());
            for (v, val) in &lc.crit {
                let add = cross(ctx, v, rc).finite()?;
                crit.push((v.clone(), val + add));
            }
            for (v, val) in &rc.crit {
                let add = cross(ctx, v, lc).finite()?;
                crit.push((v.clone(), val + add));
            }
            co.crit = crit;
            merge_min(&mut co.crit);
            let mut orphans = Vec::new();
            for (v, val) in &lc.orphans {
                if let ExtendedValue::Finite(sub) = cross(ctx, v, rc) {
                    orphans.push((v.clone(), val - sub));
                }
            }
            for (v, val) in &rc.orphans {
                if let ExtendedValue::Finite(sub) = cross(ctx, v, lc) {
                    orphans.push((v.clone(), val - sub));
                }
            }
            co.orphans = orphans;
            merge_min(&mut co.orphans);
        }
    }
    let mut links = Vec::new();
    for (side, other) in [(l, r), (r, l)] {
        for (lk, val) in &side.links {
            let gain = cross(ctx, &lk.f, &other.coals[lk.own]).finite()?;
            if let ExtendedValue::Finite(loss) = cross(ctx, &lk.h, &other.coals[lk.target]) {
                links.push((lk.clone(), val + gain - loss));
            }
        }
    }
    st.links = links;
    merge_min(&mut st.links);
    Some((st, welfare))
}

fn check_input(s: &ScoringVector, g: &SocialNetwork, d: &NiceTreeDecomposition) -> Result<()> {
    if !s.is_closed() {
        bail!(Unsupported, "the treewidth dynamic program needs a closed scoring vector");
    }
    if s.delta() >= INF as usize {
        bail!(Unsupported, "scoring vectors longer than {} entries are not supported", INF - 1);
    }
    if let Err(e) = d.check_nice() {
        bail!(InvalidArgument, "decomposition is not nice: {e}");
    }
    if let Err(v) = crate::treedecomp::validate(g, &d.to_tree_decomposition()) {
        bail!(InvalidArgument, "decomposition is invalid: {v}");
    }
    Ok(())
}

/// Statistics of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Largest number of records stored at a single node.
    pub max_records: usize,
    /// Total records over all nodes.
    pub total_records: usize,
}

fn run(s: &ScoringVector, g: &SocialNetwork, d: &NiceTreeDecomposition, mode: Mode) -> Result<(Option<SolveResult>, DpStats)> {
    check_input(s, g, d)?;
    let ctx = Ctx {
        g,
        delta: s.delta() as u8,
        scores: s.scores().to_vec(),
        util: mode != Mode::Welfare,
        ghosts: mode == Mode::Ns,
    };
    let mut stats = DpStats::default();
    let mut tables: Vec<Option<Table>> = vec![None; d.nodes.len()];
    for (i, node) in d.nodes.iter().enumerate() {
        let mut take = |c: usize| tables[c].take().expect("children are processed first");
        let t = match node.kind {
            NiceKind::Leaf => {
                let mut t = Table::new();
                t.insert(State { coals: Vec::new(), links: Vec::new() }, Record { welfare: 0, witness: vec![UNSET; g.n()] });
                t
            }
            NiceKind::Introduce(a) => introduce(&ctx, &take(node.children[0]), a),
            NiceKind::Forget(a) => forget(&ctx, &take(node.children[0]), a),
            NiceKind::Join => {
                let l = take(node.children[0]);
                let r = take(node.children[1]);
                join(&ctx, &l, &r)
            }
        };
        stats.max_records = stats.max_records.max(t.len());
        stats.total_records += t.len();
        tables[i] = Some(t);
    }
    let root = tables[d.root()].take().expect("root processed");
    let best = root.into_iter().next().map(|(_, rec)| {
        let labels: Vec<u32> = rec.witness.iter().enumerate().map(|(a, &k)| if k == UNSET { a as u32 } else { k }).collect();
        SolveResult {
            outcome: Outcome::from_labels(&labels),
            welfare: ExtendedValue::Finite(rec.welfare),
            mode,
            optimal: true,
        }
    });
    Ok((best, stats))
}

/// Maximum-welfare outcome (closed tails only).
pub fn solve_tw_welfare(s: &ScoringVector, g: &SocialNetwork, d: &NiceTreeDecomposition) -> Result<SolveResult> {
    Ok(run(s, g, d, Mode::Welfare)?.0.expect("all-singletons is always feasible"))
}

/// Maximum-welfare individually rational outcome (closed tails only).
pub fn solve_tw_ir(s: &ScoringVector, g: &SocialNetwork, d: &NiceTreeDecomposition) -> Result<SolveResult> {
    Ok(run(s, g, d, Mode::Ir)?.0.expect("all-singletons is individually rational"))
}

/// Maximum-welfare Nash stable outcome, or `None` if none exists (closed tails only).
pub fn solve_tw_ns(s: &ScoringVector, g: &SocialNetwork, d: &NiceTreeDecomposition) -> Result<Option<SolveResult>> {
    Ok(run(s, g, d, Mode::Ns)?.0)
}

/// Dispatches on `mode` and also returns record statistics.
pub fn solve_tw(
    s: &ScoringVector,
    g: &SocialNetwork,
    d: &NiceTreeDecomposition,
    mode: Mode,
) -> Result<(Option<SolveResult>, DpStats)> {
    run(s, g, d, mode)
}
