//! Outcomes: partitions of the agents into coalitions.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{bail, Result};
use crate::Agent;

/// A partition of `0..n` into non-empty coalitions, stored in canonical form:
/// members ascending, coalitions ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    coalitions: Vec<Vec<Agent>>,
    owner: Vec<usize>,
}

impl Outcome {
    /// Validates and canonicalises a list of coalitions over `n` agents.
    pub fn new(n: usize, coalitions: Vec<Vec<Agent>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut cs = Vec::with_capacity(coalitions.len());
        for mut c in coalitions {
            if c.is_empty() {
                bail!(InvalidArgument, "empty coalition");
            }
            for &a in &c {
                if a >= n {
                    bail!(InvalidArgument, "agent {a} is outside 0..{n}");
                }
                if seen[a] {
                    bail!(InvalidArgument, "agent {a} appears in more than one coalition");
                }
                seen[a] = true;
            }
            c.sort_unstable();
            cs.push(c);
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            bail!(InvalidArgument, "agent {a} is not covered by any coalition");
        }
        cs.sort_unstable_by_key(|c| c[0]);
        let mut owner = vec![0; n];
        for (k, c) in cs.iter().enumerate() {
            for &a in c {
                owner[a] = k;
            }
        }
        Ok(Outcome { coalitions: cs, owner })
    }

    /// Builds the outcome whose coalitions are the classes of `label`
    /// (agents with equal labels share a coalition).
    pub fn from_labels<L: Ord + Copy>(label: &[L]) -> Self {
        let n = label.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| label[a].cmp(&label[b]).then(a.cmp(&b)));
        let mut cs: Vec<Vec<Agent>> = Vec::new();
        for (k, &a) in order.iter().enumerate() {
            if k == 0 || label[order[k - 1]] != label[a] {
                cs.push(Vec::new());
            }
            cs.last_mut().expect("pushed above").push(a);
        }
        Outcome::new(n, cs).expect("labels always form a partition")
    }

    /// The outcome in which every agent is alone.
    pub fn singletons(n: usize) -> Self {
        Outcome::new(n, (0..n).map(|a| vec![a]).collect()).expect("singletons form a partition")
    }

    /// The outcome with one coalition of all agents (`n ≥ 1`).
    pub fn grand(n: usize) -> Self {
        Outcome::new(n, vec![(0..n).collect()]).expect("grand coalition is a partition")
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.owner.len()
    }

    /// The coalitions in canonical order.
    pub fn coalitions(&self) -> &[Vec<Agent>] {
        &self.coalitions
    }

    /// Index (in canonical order) of the coalition containing `a`.
    pub fn coalition_index(&self, a: Agent) -> usize {
        self.owner[a]
    }

    /// The coalition `Π_a` containing `a`.
    pub fn coalition_of(&self, a: Agent) -> &[Agent] {
        &self.coalitions[self.owner[a]]
    }

    /// Restricted-growth string: agent `a` maps to the canonical index of its coalition.
    pub fn rgs(&self) -> &[usize] {
        &self.owner
    }

    /// Moves agent `a` to coalition `target` (canonical index) or, for `None`,
    /// into a fresh singleton; returns the new canonical outcome.
    pub fn with_move(&self, a: Agent, target: Option<usize>) -> Outcome {
        let mut cs: Vec<Vec<Agent>> = self.coalitions.clone();
        let from = self.owner[a];
        cs[from].retain(|&x| x != a);
        match target {
            Some(t) => cs[t].push(a),
            None => cs.push(vec![a]),
        }
        cs.retain(|c| !c.is_empty());
        Outcome::new(self.n(), cs).expect("moving an agent keeps a partition")
    }

    /// Merges outcomes of disjoint agent groups: `parts[k]` is an outcome over
    /// `groups[k].len()` local agents that map to global agents `groups[k]`.
    pub fn merge(n: usize, groups: &[Vec<Agent>], parts: &[Outcome]) -> Outcome {
        let mut cs = Vec::new();
        for (g, o) in groups.iter().zip(parts) {
            for c in o.coalitions() {
                cs.push(c.iter().map(|&a| g[a]).collect());
            }
        }
        Outcome::new(n, cs).expect("components partition the agents")
    }
}

/// Lexicographic order of restricted-growth strings, the tie-break for optima.
impl Ord for Outcome {
    fn cmp(&self, other: &Self) -> Ordering {
        self.owner.cmp(&other.owner)
    }
}

impl PartialOrd for Outcome {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coalitions.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            for (i, a) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}
