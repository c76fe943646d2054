//! Exhaustive partition enumeration: the ground-truth solver.
//!
//! Every set partition of the agents is visited as a restricted-growth string
//! (RGS) in lexicographic order.  Utilities of every agent in every possible
//! coalition are tabulated once per instance (`2^n · n` entries), so each
//! partition is evaluated with table lookups only.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::eval::coalition_utilities;
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::{Mode, SolveResult};
use crate::value::ExtendedValue;

/// Default agent cap of the oracle (`Bell(12) = 4 213 597` partitions).
pub const DEFAULT_CAP: usize = 12;

/// Largest cap accepted at all; the tables grow as `2^n · n`.
pub const HARD_CAP: usize = 16;

/// Iterator over the set partitions of `0..n` as restricted-growth strings.
#[derive(Debug, Clone)]
pub struct Partitions {
    rgs: Vec<usize>,
    max_prefix: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.rgs.clone();
        // Advance: find the rightmost position that can still grow.
        let n = self.rgs.len();
        let mut k = n;
        loop {
            if k <= 1 {
                self.done = true;
                break;
            }
            k -= 1;
            if self.rgs[k] <= self.max_prefix[k - 1] {
                self.rgs[k] += 1;
                let m = self.max_prefix[k - 1].max(self.rgs[k]);
                self.max_prefix[k] = m;
                for j in k + 1..n {
                    self.rgs[j] = 0;
                    self.max_prefix[j] = m;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Enumerates all set partitions of `{0..n-1}` in RGS lexicographic order.
pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    if n == 0 {
        bail!(InvalidArgument, "partition enumeration needs at least one agent");
    }
    Ok(Partitions { rgs: vec![0; n], max_prefix: vec![0; n], done: false })
}

/// Oracle configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximum number of agents.
    pub cap: usize,
    /// Skip partitions whose coalitions must exceed diameter `δ` (closed tail,
    /// welfare mode only; such coalitions score `-∞`).
    pub diameter_pruning: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { cap: DEFAULT_CAP, diameter_pruning: true }
    }
}

/// Per-instance tables: utility of agent `i` inside every coalition `S ∋ i`.
struct Tables {
    n: usize,
    util: Vec<ExtendedValue>,
    welfare: Vec<ExtendedValue>,
    min_util: Vec<ExtendedValue>,
}

impl Tables {
    fn build(s: &ScoringVector, g: &SocialNetwork) -> Tables {
        let n = g.n();
        let size = 1usize << n;
        let mut util = vec![ExtendedValue::ZERO; size * n];
        let mut welfare = vec![ExtendedValue::ZERO; size];
        let mut min_util = vec![ExtendedValue::ZERO; size];
        for mask in 1..size {
            let members: Vec<usize> = (0..n).filter(|&a| mask >> a & 1 == 1).collect();
            let us = coalition_utilities(s, g, &members);
            let mut w = ExtendedValue::ZERO;
            let mut m = ExtendedValue::Finite(i64::MAX);
            for (&a, &u) in members.iter().zip(&us) {
                util[mask * n + a] = u;
                w += u;
                m = m.min(u);
            }
            welfare[mask] = w;
            min_util[mask] = m;
        }
        Tables { n, util, welfare, min_util }
    }

    fn util(&self, mask: usize, a: usize) -> ExtendedValue {
        self.util[mask * self.n + a]
    }
}

struct Search<'a> {
    tables: &'a Tables,
    mode: Mode,
    far: Option<Vec<u64>>,
    rgs: Vec<usize>,
    blocks: Vec<usize>,
    best: Option<(ExtendedValue, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, a: usize) {
        let n = self.tables.n;
        if a == n {
            self.leaf();
            return;
        }
        for b in 0..=self.blocks.len() {
            let fresh = b == self.blocks.len();
            if !fresh {
                if let Some(far) = &self.far {
                    if far[a] & self.blocks[b] as u64 != 0 {
                        continue;
                    }
                }
                self.blocks[b] |= 1 << a;
            } else {
                self.blocks.push(1 << a);
            }
            self.rgs[a] = b;
            self.run(a + 1);
            if fresh {
                self.blocks.pop();
            } else {
                self.blocks[b] &= !(1 << a);
            }
        }
    }

    fn leaf(&mut self) {
        let t = self.tables;
        let w: ExtendedValue = self.blocks.iter().map(|&m| t.welfare[m]).sum();
        if w.is_neg_inf() && self.mode != Mode::Welfare {
            return;
        }
        if let Some((bw, _)) = &self.best {
            if w <= *bw {
                return;
            }
        }
        let ok = match self.mode {
            Mode::Welfare => true,
            Mode::Ir => self.blocks.iter().all(|&m| t.min_util[m] >= ExtendedValue::ZERO),
            Mode::Ns => self.nash_stable(),
        };
        if ok {
            self.best = Some((w, self.rgs.clone()));
        }
    }

    fn nash_stable(&self) -> bool {
        let t = self.tables;
        for a in 0..t.n {
            let own = self.blocks[self.rgs[a]];
            let u = t.util(own, a);
            if u < ExtendedValue::ZERO {
                return false;
            }
            for (k, &m) in self.blocks.iter().enumerate() {
                if k != self.rgs[a] && t.util(m | 1 << a, a) > u {
                    return false;
                }
            }
        }
        true
    }
}

/// Maximum-welfare outcome under `mode` with the default configuration.
///
/// Returns the lexicographically smallest (by RGS) optimal outcome; `None`
/// only in NS mode when no Nash stable outcome exists.
pub fn brute_force_solve(s: &ScoringVector, g: &SocialNetwork, mode: Mode) -> Result<Option<SolveResult>> {
    brute_force_solve_with(s, g, mode, OracleConfig::default())
}

/// [`brute_force_solve`] with an explicit configuration.
pub fn brute_force_solve_with(
    s: &ScoringVector,
    g: &SocialNetwork,
    mode: Mode,
    cfg: OracleConfig,
) -> Result<Option<SolveResult>> {
    let n = g.n();
    let cap = cfg.cap.min(HARD_CAP);
    if n > cap {
        bail!(ResourceLimit, "brute force is capped at {cap} agents, instance has {n}");
    }
    if n == 0 {
        return Ok(Some(SolveResult {
            outcome: Outcome::singletons(0),
            welfare: ExtendedValue::ZERO,
            mode,
            optimal: true,
        }));
    }
    let tables = Tables::build(s, g);
    let far = (cfg.diameter_pruning && s.is_closed() && mode == Mode::Welfare).then(|| {
        let d = g.all_pairs();
        (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| d[a][b].map_or(true, |x| x > s.delta()))
                    .fold(0u64, |m, b| m | 1 << b)
            })
            .collect()
    });
    let mut search = Search { tables: &tables, mode, far, rgs: vec![0; n], blocks: Vec::new(), best: None };
    search.run(0);
    Ok(search.best.map(|(welfare, rgs)| SolveResult {
        outcome: Outcome::from_labels(&rgs),
        welfare,
        mode,
        optimal: true,
    }))
}

/// Decision version: is there an admissible outcome with welfare at least `b`?
pub fn decide_welfare_at_least(s: &ScoringVector, g: &SocialNetwork, b: i64, mode: Mode) -> Result<bool> {
    Ok(brute_force_solve(s, g, mode)?.is_some_and(|r| r.welfare >= ExtendedValue::Finite(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partition_counts() {
        assert!(enumerate_partitions(0).is_err());
        assert_eq!(enumerate_partitions(1).unwrap().collect::<Vec<_>>(), vec![vec![0]]);
        let p3: Vec<_> = enumerate_partitions(3).unwrap().collect();
        assert_eq!(p3, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn path_on_three() {
        let g = SocialNetwork::from_edges(3, &[(0, 1), (1, 2)]);
        let r = brute_force_solve(&ScoringVector::closed(&[1]), &g, Mode::Welfare).unwrap().unwrap();
        assert_eq!(r.welfare, ExtendedValue::Finite(2));
        assert_eq!(r.outcome.coalitions(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn cap_is_enforced() {
        let g = SocialNetwork::from_edges(13, &[]);
        let e = brute_force_solve(&ScoringVector::closed(&[1]), &g, Mode::Welfare).unwrap_err();
        assert!(matches!(e, crate::SdgError::ResourceLimit(_)));
    }
}
