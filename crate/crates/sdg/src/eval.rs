//! Intra-coalition distances, utilities and social welfare.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::value::ExtendedValue;
use crate::Agent;

fn membership(g: &SocialNetwork, c: &[Agent]) -> Vec<bool> {
    let mut m = vec![false; g.n()];
    for &a in c {
        m[a] = true;
    }
    m
}

/// Distance between `i` and `j` in the subgraph induced by coalition `c`;
/// `0` for `i == j` and `-∞` when they are disconnected inside `c`.
pub fn coalition_distance(
    g: &SocialNetwork,
    c: &[Agent],
    i: Agent,
    j: Agent,
) -> Result<ExtendedValue> {
    if !c.contains(&i) || !c.contains(&j) {
        bail!(InvalidArgument, "agents {i} and {j} must both belong to the coalition");
    }
    let d = g.bfs_within(i, &membership(g, c));
    Ok(match d[j] {
        Some(d) => ExtendedValue::Finite(d as i64),
        None => ExtendedValue::NegInf,
    })
}

/// Utility of `i` inside coalition `c` (which must contain `i`).
pub fn utility_in(s: &ScoringVector, g: &SocialNetwork, c: &[Agent], i: Agent) -> ExtendedValue {
    let d = g.bfs_within(i, &membership(g, c));
    c.iter()
        .filter(|&&j| j != i)
        .map(|&j| match d[j] {
            Some(d) => s.score(d),
            None => ExtendedValue::NegInf,
        })
        .sum()
}

/// Utilities of all members of `c`, in the order of `c`.
pub fn coalition_utilities(s: &ScoringVector, g: &SocialNetwork, c: &[Agent]) -> Vec<ExtendedValue> {
    let m = membership(g, c);
    c.iter()
        .map(|&i| {
            let d = g.bfs_within(i, &m);
            c.iter()
                .filter(|&&j| j != i)
                .map(|&j| d[j].map_or(ExtendedValue::NegInf, |d| s.score(d)))
                .sum()
        })
        .collect()
}

/// Total utility of the members of `c`.
pub fn coalition_welfare(s: &ScoringVector, g: &SocialNetwork, c: &[Agent]) -> ExtendedValue {
    coalition_utilities(s, g, c).into_iter().sum()
}

/// `u(i, Π)`: the sum of scores of `i`'s distances to its coalition mates.
pub fn agent_utility(s: &ScoringVector, g: &SocialNetwork, p: &Outcome, i: Agent) -> ExtendedValue {
    utility_in(s, g, p.coalition_of(i), i)
}

/// All agent utilities under `p`, indexed by agent.
pub fn utilities(s: &ScoringVector, g: &SocialNetwork, p: &Outcome) -> Vec<ExtendedValue> {
    let mut out = vec![ExtendedValue::ZERO; g.n()];
    for c in p.coalitions() {
        for (&a, u) in c.iter().zip(coalition_utilities(s, g, c)) {
            out[a] = u;
        }
    }
    out
}

/// `SW(Π)`: the sum of all agent utilities.
pub fn social_welfare(s: &ScoringVector, g: &SocialNetwork, p: &Outcome) -> ExtendedValue {
    p.coalitions().iter().map(|c| coalition_welfare(s, g, c)).sum()
}

/// Largest intra-coalition distance of `c`; `-∞` when `G[c]` is disconnected.
pub fn coalition_diameter(g: &SocialNetwork, c: &[Agent]) -> ExtendedValue {
    let m = membership(g, c);
    let mut best = 0usize;
    for &i in c {
        let d = g.bfs_within(i, &m);
        for &j in c {
            match d[j] {
                Some(x) => best = best.max(x),
                None => return ExtendedValue::NegInf,
            }
        }
    }
    ExtendedValue::Finite(best as i64)
}
