//! Shared fixtures and generators for the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdg::treedecomp::{compute_decomposition, make_nice, NiceTreeDecomposition};
use sdg::SocialNetwork;

/// Agents of the seven-agent example: x, x1, y, y1, a1, a2, a3.
pub fn seven_agents() -> SocialNetwork {
    let (x, x1, y, y1, a1, a2, a3) = (0, 1, 2, 3, 4, 5, 6);
    SocialNetwork::from_edges(
        7,
        &[(x, x1), (y, y1), (x, a1), (x, a2), (x, a3), (y, a1), (y, a2), (y, a3), (a1, a2), (a2, a3), (a1, a3)],
    )
}

/// Path p1–p2–x–p4–p5 (agents 0..5, x = 2) plus `clique` extra agents forming a
/// clique fully joined to p1 and p5.
pub fn path_with_clique(clique: usize) -> SocialNetwork {
    let n = 5 + clique;
    let mut e = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
    for a in 5..n {
        e.push((0, a));
        e.push((4, a));
        for b in a + 1..n {
            e.push((a, b));
        }
    }
    SocialNetwork::from_edges(n, &e)
}

/// [`path_with_clique`] with 4 clique agents plus an agent `y = 9` adjacent only to x.
pub fn path_clique_pendant() -> SocialNetwork {
    let base = path_with_clique(4);
    let mut e = base.edges();
    e.push((2, 9));
    SocialNetwork::from_edges(10, &e)
}

pub fn nice(g: &SocialNetwork) -> NiceTreeDecomposition {
    make_nice(&compute_decomposition(g, 100_000).unwrap()).unwrap()
}

/// Random partial k-tree on `n` agents: a k-tree with each edge kept with probability `p`.
pub fn partial_ktree(n: usize, k: usize, p: f64, seed: u64) -> SocialNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let base = k.min(n);
    let first: Vec<usize> = (0..base).collect();
    for a in 0..base {
        for b in a + 1..base {
            edges.push((a, b));
        }
    }
    cliques.push(first);
    for v in base..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &c {
            edges.push((u, v));
        }
        for drop in 0..c.len() {
            let mut nc: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &u)| u).collect();
            nc.push(v);
            cliques.push(nc);
        }
        if c.is_empty() {
            cliques.push(vec![v]);
        }
    }
    let kept: Vec<(usize, usize)> = edges.into_iter().filter(|_| rng.gen_bool(p)).collect();
    SocialNetwork::from_edges(n, &kept)
}
