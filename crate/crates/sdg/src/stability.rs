//! Individual rationality and Nash stability checks with deviation witnesses.

use alloc::vec::Vec;

use crate::eval::{utilities, utility_in};
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::Mode;
use crate::value::ExtendedValue;
use crate::Agent;

/// Where a deviating agent moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationKind {
    /// Into a fresh singleton coalition.
    ToSingleton,
    /// Into an existing coalition.
    ToCoalition,
}

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    /// The deviating agent.
    pub agent: Agent,
    /// Kind of move.
    pub kind: DeviationKind,
    /// Canonical index of the target coalition (`None` for a fresh singleton).
    pub target: Option<usize>,
    /// Utility before the move.
    pub before: ExtendedValue,
    /// Utility after the move.
    pub after: ExtendedValue,
}

impl Deviation {
    /// Utility gain; `None` stands for an unbounded gain out of `-∞`.
    pub fn gain(&self) -> Option<i64> {
        match (self.before, self.after) {
            (ExtendedValue::Finite(b), ExtendedValue::Finite(a)) => Some(a - b),
            _ => None,
        }
    }
}

/// `u(i, C ∪ {i})` for a coalition `c` not containing `i`; distances are
/// recomputed in the enlarged induced subgraph.
pub fn utility_if_joined(s: &ScoringVector, g: &SocialNetwork, c: &[Agent], i: Agent) -> ExtendedValue {
    let mut joined: Vec<Agent> = c.to_vec();
    joined.push(i);
    utility_in(s, g, &joined, i)
}

/// First deviation under `mode` in the order: agents ascending, targets by
/// canonical coalition index, fresh singleton last.  Welfare mode imposes no
/// stability requirement and always returns `None`.
pub fn find_deviation(s: &ScoringVector, g: &SocialNetwork, p: &Outcome, mode: Mode) -> Option<Deviation> {
    let util = utilities(s, g, p);
    match mode {
        Mode::Welfare => None,
        Mode::Ir => (0..g.n()).find(|&i| util[i] < ExtendedValue::ZERO).map(|i| Deviation {
            agent: i,
            kind: DeviationKind::ToSingleton,
            target: None,
            before: util[i],
            after: ExtendedValue::ZERO,
        }),
        Mode::Ns => {
            for i in 0..g.n() {
                let own = p.coalition_index(i);
                for (k, c) in p.coalitions().iter().enumerate() {
                    if k == own {
                        continue;
                    }
                    let after = utility_if_joined(s, g, c, i);
                    if after > util[i] {
                        return Some(Deviation {
                            agent: i,
                            kind: DeviationKind::ToCoalition,
                            target: Some(k),
                            before: util[i],
                            after,
                        });
                    }
                }
                if util[i] < ExtendedValue::ZERO {
                    return Some(Deviation {
                        agent: i,
                        kind: DeviationKind::ToSingleton,
                        target: None,
                        before: util[i],
                        after: ExtendedValue::ZERO,
                    });
                }
            }
            None
        }
    }
}

/// True iff no agent has negative utility.
pub fn is_individually_rational(s: &ScoringVector, g: &SocialNetwork, p: &Outcome) -> bool {
    find_deviation(s, g, p, Mode::Ir).is_none()
}

/// True iff no agent strictly gains by joining another coalition or going alone.
pub fn is_nash_stable(s: &ScoringVector, g: &SocialNetwork, p: &Outcome) -> bool {
    find_deviation(s, g, p, Mode::Ns).is_none()
}

/// True iff `p` is admissible under `mode`.
pub fn satisfies(s: &ScoringVector, g: &SocialNetwork, p: &Outcome, mode: Mode) -> bool {
    find_deviation(s, g, p, mode).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_singletons_not_ns() {
        let g = SocialNetwork::from_edges(2, &[(0, 1)]);
        let s = ScoringVector::closed(&[1]);
        let p = Outcome::singletons(2);
        assert!(is_individually_rational(&s, &g, &p));
        let d = find_deviation(&s, &g, &p, Mode::Ns).unwrap();
        assert_eq!((d.agent, d.target, d.gain()), (0, Some(1), Some(1)));
        assert!(is_nash_stable(&s, &g, &Outcome::grand(2)));
    }
}
