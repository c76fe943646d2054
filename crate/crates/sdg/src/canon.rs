//! Canonical labelling of small vertex-coloured graphs (at most 64 vertices).
//!
//! Colour refinement followed by individualisation of the first smallest
//! non-singleton cell; the lexicographically smallest encoding over all
//! branches is returned.  Vertices with identical colour and identical
//! neighbourhoods (twins) are interchangeable, so only one representative of
//! each twin class is individualised per cell.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// A graph whose vertices carry totally ordered colours.
#[derive(Debug, Clone)]
pub(crate) struct ColouredGraph<C> {
    pub colours: Vec<C>,
    pub adj: Vec<u64>,
}

/// Result: `order[k]` is the original vertex placed at canonical position `k`.
pub(crate) fn canonical_order<C: Ord + Clone>(g: &ColouredGraph<C>) -> Vec<usize> {
    let n = g.colours.len();
    debug_assert!(n <= 64);
    if n == 0 {
        return Vec::new();
    }
    // Initial cells: vertices grouped by colour, in colour order.
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| g.colours[a].cmp(&g.colours[b]));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &sorted {
        match cells.last_mut() {
            Some(c) if g.colours[c[0]] == g.colours[v] => c.push(v),
            _ => cells.push(alloc::vec![v]),
        }
    }
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    search(g, cells, &mut best);
    best.expect("at least one leaf").1
}

/// Refines `cells` until every vertex of a cell has the same number of
/// neighbours in every cell (an equitable partition), keeping the order of
/// cells deterministic and isomorphism-invariant.
fn refine(adj: &[u64], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let masks: Vec<u64> = cells.iter().map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        let mut changed = false;
        for c in &cells {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut by_sig: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
            for &v in c {
                let sig: Vec<u32> = masks.iter().map(|m| (adj[v] & m).count_ones()).collect();
                by_sig.entry(sig).or_default().push(v);
            }
            if by_sig.len() > 1 {
                changed = true;
            }
            next.extend(by_sig.into_values());
        }
        cells = next;
        if !changed {
            return cells;
        }
    }
}

fn encode<C: Ord>(g: &ColouredGraph<C>, order: &[usize]) -> Vec<u64> {
    let mut pos = [0usize; 64];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    order
        .iter()
        .map(|&v| {
            let mut row = 0u64;
            let mut m = g.adj[v];
            while m != 0 {
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                row |= 1 << pos[w];
            }
            row
        })
        .collect()
}

fn search<C: Ord + Clone>(g: &ColouredGraph<C>, cells: Vec<Vec<usize>>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
    let cells = refine(&g.adj, cells);
    let target = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i);
    let Some(t) = target else {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let code = encode(g, &order);
        if best.as_ref().map_or(true, |(b, _)| code < *b) {
            *best = Some((code, order));
        }
        return;
    };
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cells[t] {
        // Twins (same cell, same neighbourhood apart from each other) give identical branches.
        let twin = |u: usize| g.adj[u] & !(1u64 << v) == g.adj[v] & !(1u64 << u);
        if tried.iter().any(|&u| twin(u)) {
            continue;
        }
        tried.push(v);
        let mut next = cells.clone();
        let rest: Vec<usize> = next[t].iter().copied().filter(|&w| w != v).collect();
        next[t] = alloc::vec![v];
        next.insert(t + 1, rest);
        search(g, next, best);
    }
}
