//! Scoring vectors and their tail semantics.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};
use crate::value::ExtendedValue;

/// Behaviour of a scoring vector beyond its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tail {
    /// Distances greater than `δ` score `-∞`.
    Closed,
    /// Distances greater than `δ` score `s_δ`.
    Open,
}

/// A non-increasing integer scoring vector `s₁ ≥ s₂ ≥ … ≥ s_δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScoringVector {
    scores: Vec<i64>,
    tail: Tail,
}

impl ScoringVector {
    /// Builds a scoring vector, checking `δ ≥ 1` and monotonicity.
    pub fn new(scores: Vec<i64>, tail: Tail) -> Result<Self> {
        if scores.is_empty() {
            bail!(InvalidArgument, "scoring vector needs at least one entry");
        }
        if let Some(w) = scores.windows(2).find(|w| w[1] > w[0]) {
            bail!(InvalidArgument, "scoring vector must be non-increasing ({} < {})", w[0], w[1]);
        }
        Ok(ScoringVector { scores, tail })
    }

    /// Closed-tail vector; panics on invalid input (convenience for fixtures).
    pub fn closed(scores: &[i64]) -> Self {
        Self::new(scores.to_vec(), Tail::Closed).expect("valid scoring vector")
    }

    /// Open-tail vector; panics on invalid input (convenience for fixtures).
    pub fn open(scores: &[i64]) -> Self {
        Self::new(scores.to_vec(), Tail::Open).expect("valid scoring vector")
    }

    /// The entries `s₁..s_δ`.
    pub fn scores(&self) -> &[i64] {
        &self.scores
    }

    /// Tail semantics.
    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// `δ`, the number of entries.
    pub fn delta(&self) -> usize {
        self.scores.len()
    }

    /// `s₁`, the largest score.
    pub fn s1(&self) -> i64 {
        self.scores[0]
    }

    /// `s_δ`, the last entry.
    pub fn last(&self) -> i64 {
        self.scores[self.scores.len() - 1]
    }

    /// True for closed tails.
    pub fn is_closed(&self) -> bool {
        self.tail == Tail::Closed
    }

    /// Score of a finite positive distance `d`.
    ///
    /// # Panics
    /// Panics if `d == 0`; callers in the library never score an agent against itself.
    pub fn score(&self, d: usize) -> ExtendedValue {
        assert!(d >= 1, "distance 0 has no score");
        if d <= self.scores.len() {
            ExtendedValue::Finite(self.scores[d - 1])
        } else {
            match self.tail {
                Tail::Closed => ExtendedValue::NegInf,
                Tail::Open => ExtendedValue::Finite(self.last()),
            }
        }
    }
}

impl fmt::Display for ScoringVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.scores.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        let t = match self.tail {
            Tail::Closed => "closed",
            Tail::Open => "open",
        };
        write!(f, ") {t}")
    }
}

/// Scores a distance given as an extended value; `-∞` (disconnected) scores `-∞`.
pub fn score_at(s: &ScoringVector, d: ExtendedValue) -> Result<ExtendedValue> {
    match d {
        ExtendedValue::NegInf => Ok(ExtendedValue::NegInf),
        ExtendedValue::Finite(d) if d >= 1 => Ok(s.score(d as usize)),
        ExtendedValue::Finite(d) => bail!(InvalidArgument, "distance {d} is not positive"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ExtendedValue::*;

    #[test]
    fn score_at_examples() {
        let c = ScoringVector::closed(&[1, 0, -1]);
        let o = ScoringVector::open(&[1, 0, -1]);
        assert_eq!(score_at(&c, Finite(2)).unwrap(), Finite(0));
        assert_eq!(score_at(&c, Finite(4)).unwrap(), NegInf);
        assert_eq!(score_at(&o, Finite(4)).unwrap(), Finite(-1));
        assert_eq!(score_at(&o, NegInf).unwrap(), NegInf);
        assert!(score_at(&c, Finite(0)).is_err());
        assert!(score_at(&c, Finite(-2)).is_err());
    }

    #[test]
    fn rejects_increasing_and_empty() {
        assert!(ScoringVector::new(alloc::vec![1, 2], Tail::Closed).is_err());
        assert!(ScoringVector::new(alloc::vec![], Tail::Open).is_err());
    }
}
