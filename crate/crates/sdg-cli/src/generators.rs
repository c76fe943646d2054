//! Deterministic instance generators (seeded ChaCha8).

use anyhow::{bail, ensure, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdg::reductions::{ctcg_to_sdg, nae_to_3ctcg, three_coloring, NaeFormula};
use sdg::treedecomp::elimination_width;
use sdg::{ScoringVector, SocialNetwork};

/// Largest 3CTCG graph for which the generator also searches for a 3-colouring.
pub const COLOURING_METADATA_MAX: usize = 60;

/// A hardness instance: the game network, its welfare target and metadata.
#[derive(Debug, Clone)]
pub struct HardInstance {
    /// Complement of the triangle-covered graph.
    pub network: SocialNetwork,
    /// Welfare target `b`.
    pub target: i64,
    /// Comment lines for the `.gr` file (formula, target, colouring).
    pub comments: Vec<String>,
}

/// Builds the hardness instance for a formula and a closed `δ = 1` vector.
pub fn hard(phi: &NaeFormula, s: &ScoringVector) -> Result<HardInstance> {
    let h = nae_to_3ctcg(phi);
    let (network, target) = ctcg_to_sdg(&h, s)?;
    let mut comments = vec![
        format!("target {target}"),
        format!("scores {}", s.scores().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
        format!("formula vars {} clauses {}", phi.vars(), phi.clauses().len()),
    ];
    for c in phi.clauses() {
        let lits: Vec<String> =
            c.iter().map(|l| format!("{}{}", if l.negated { "-" } else { "" }, l.var + 1)).collect();
        comments.push(format!("clause {}", lits.join(" ")));
    }
    for t in &h.triangles {
        comments.push(format!("triangle {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    if h.graph.n() <= COLOURING_METADATA_MAX {
        match three_coloring(&h.graph) {
            Some(col) => {
                let c: Vec<String> = col.iter().map(ToString::to_string).collect();
                comments.push(format!("colouring {}", c.join(" ")));
            }
            None => comments.push("colouring none".to_string()),
        }
    }
    Ok(HardInstance { network, target, comments })
}

/// Reads the `c target <b>` comment written by [`hard`].
pub fn target_from_comments(text: &str) -> Option<i64> {
    text.lines().find_map(|l| l.trim().strip_prefix("c target ")?.trim().parse().ok())
}

/// A connected graph of treewidth at most `k`: a random `k`-tree whose edges
/// are kept with probability `p`, except one edge per new vertex that keeps
/// the graph connected.  The width is checked against the construction order.
pub fn random_tw(n: usize, k: usize, p: f64, seed: u64) -> Result<SocialNetwork> {
    ensure!((0.0..=1.0).contains(&p), "edge probability {p} is outside [0, 1]");
    ensure!(k >= 1 || n <= 1, "a connected graph on {n} agents needs treewidth at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let base = n.min(k + 1);
    // Initial clique, thinned to a random spanning tree plus kept edges.
    for v in 1..base {
        let keep = rng.gen_range(0..v);
        for u in 0..v {
            if u == keep || rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    if base == k + 1 {
        for skip in 0..base {
            cliques.push((0..base).filter(|&x| x != skip).collect());
        }
    }
    for v in base..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        let keep = c[rng.gen_range(0..c.len())];
        for &u in &c {
            if u == keep || rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
        for &skip in &c {
            let mut next: Vec<usize> = c.iter().copied().filter(|&x| x != skip).collect();
            next.push(v);
            cliques.push(next);
        }
    }
    let g = SocialNetwork::new(n, &edges)?;
    // Eliminating in reverse insertion order never creates a bag larger than k + 1.
    let order: Vec<usize> = (0..n).rev().collect();
    let width = elimination_width(&g, &order);
    ensure!(width <= k, "internal error: generated width {width} exceeds {k}");
    ensure!(g.is_connected(), "internal error: generated graph is disconnected");
    Ok(g)
}

/// A connected graph with maximum degree at most `max_deg`: a random spanning
/// tree respecting the cap, plus up to `extra` random edges that respect it.
pub fn random_degree(n: usize, max_deg: usize, extra: usize, seed: u64) -> Result<SocialNetwork> {
    if n >= 3 && max_deg < 2 || n == 2 && max_deg < 1 {
        bail!("no connected graph on {n} agents has maximum degree {max_deg}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    let mut has = std::collections::BTreeSet::new();
    for i in 1..n {
        let open: Vec<usize> = perm[..i].iter().copied().filter(|&u| deg[u] < max_deg).collect();
        // A tree built so far always has a vertex of degree < 2 ≤ max_deg.
        let u = open[rng.gen_range(0..open.len())];
        let v = perm[i];
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u.min(v), u.max(v)));
        has.insert((u.min(v), u.max(v)));
    }
    for _ in 0..extra {
        if n < 2 {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let e = (u.min(v), u.max(v));
        if u != v && deg[u] < max_deg && deg[v] < max_deg && has.insert(e) {
            deg[u] += 1;
            deg[v] += 1;
            edges.push(e);
        }
    }
    let g = SocialNetwork::new(n, &edges)?;
    ensure!(g.max_degree() <= max_deg, "internal error: degree {} exceeds {max_deg}", g.max_degree());
    ensure!(g.is_connected(), "internal error: generated graph is disconnected");
    Ok(g)
}

/// A random NAE-3-SAT formula; clauses use distinct variables when `vars ≥ 3`.
pub fn random_nae(vars: usize, clauses: usize, seed: u64) -> Result<NaeFormula> {
    ensure!(vars >= 1, "a formula needs at least one variable");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cs = Vec::with_capacity(clauses);
    for _ in 0..clauses {
        let picked: Vec<usize> = if vars >= 3 {
            rand::seq::index::sample(&mut rng, vars, 3).into_vec()
        } else {
            (0..3).map(|_| rng.gen_range(0..vars)).collect()
        };
        let mut c = [0i64; 3];
        for (l, v) in c.iter_mut().zip(picked) {
            let x = v as i64 + 1;
            *l = if rng.gen_bool(0.5) { -x } else { x };
        }
        cs.push(c);
    }
    Ok(NaeFormula::from_dimacs(vars, &cs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(random_tw(12, 2, 0.5, 7).unwrap(), random_tw(12, 2, 0.5, 7).unwrap());
        assert_eq!(random_degree(10, 3, 10, 7).unwrap(), random_degree(10, 3, 10, 7).unwrap());
        assert_eq!(random_nae(4, 3, 1).unwrap(), random_nae(4, 3, 1).unwrap());
    }

    #[test]
    fn degenerate_sizes() {
        assert_eq!(random_tw(0, 2, 0.5, 1).unwrap().n(), 0);
        assert_eq!(random_tw(1, 0, 0.5, 1).unwrap().n(), 1);
        assert_eq!(random_tw(3, 5, 1.0, 1).unwrap().edge_count(), 3);
        assert!(random_tw(3, 0, 0.5, 1).is_err());
        assert!(random_degree(4, 1, 0, 1).is_err());
        assert_eq!(random_degree(2, 1, 5, 1).unwrap().edge_count(), 1);
    }

    #[test]
    fn hard_metadata() {
        let phi = NaeFormula::from_dimacs(3, &[[1, 2, 3]]).unwrap();
        let h = hard(&phi, &ScoringVector::closed(&[1])).unwrap();
        assert_eq!(h.network.n(), 12);
        assert_eq!(h.target, 3 * 4 * 3);
        assert!(h.comments.iter().any(|c| c.starts_with("colouring ") && c != "colouring none"));
        let text = crate::formats::write_graph(&h.network, &h.comments);
        assert_eq!(target_from_comments(&text), Some(h.target));
        assert!(hard(&phi, &ScoringVector::closed(&[1, 0])).is_err());
    }
}
