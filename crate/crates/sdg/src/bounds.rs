//! Structural bounds on coalition size and diameter, and outcome certificates.
//!
//! * [`degree_coalition_bound`] – on networks of maximum degree `Δ` with a
//!   closed scoring vector, every member of a larger coalition has negative utility.
//! * [`treewidth_coalition_bound`] – when `s(2) < 0`, a larger coalition has
//!   negative total utility on networks of treewidth at most `tw`.
//! * [`stable_diameter_limit`] – with an open vector whose tail score is
//!   negative, a coalition of larger diameter contains an agent with negative utility.

use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::eval::{coalition_diameter, social_welfare, utilities};
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::scoring::ScoringVector;
use crate::solution::Mode;
use crate::stability::{find_deviation, Deviation};
use crate::treedecomp::compute_decomposition;
use crate::value::ExtendedValue;

/// All bounds applicable to an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    /// Coalition-size bound from the maximum degree (closed tails).
    pub max_coalition_size_degree: Option<usize>,
    /// Coalition-size bound from the treewidth (when `s(2) < 0`).
    pub max_coalition_size_treewidth: Option<usize>,
    /// Diameter limit for IR/NS outcomes (open tails with negative tail score).
    pub stable_diameter_limit: Option<usize>,
    /// `δ`: diameter limit of any coalition with finite utilities (closed tails).
    pub welfare_diameter_limit: usize,
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// The counting bound `(s₁+1)·Δ·(Δ−1)^{δ−2}` (`(s₁+1)·Δ` when `δ = 1`);
/// `None` when `Δ ≤ 1` and `δ ≥ 2`, where the product degenerates.
pub fn degree_formula(s: &ScoringVector, max_degree: usize) -> Option<u128> {
    let delta = s.delta();
    let factor = (s.s1() + 1).max(0) as u128;
    let d = max_degree as u128;
    if delta == 1 {
        return Some(factor.saturating_mul(d));
    }
    if max_degree < 2 {
        return None;
    }
    Some(factor.saturating_mul(d).saturating_mul(saturating_pow(d - 1, delta - 2)))
}

/// Largest coalition size `m` for which some member could still have
/// non-negative utility: greedily place the other `m − 1` members at the
/// smallest distances allowed by the degree bound (at most `Δ(Δ−1)^{d−1}`
/// agents at distance exactly `d`, none beyond `δ`).
pub fn degree_threshold(s: &ScoringVector, max_degree: usize) -> u128 {
    let d = max_degree as u128;
    let mut size: u128 = 1;
    let mut util: i128 = 0;
    for (layer, &score) in s.scores().iter().enumerate() {
        let cap = if layer == 0 { d } else { d.saturating_mul(saturating_pow(d.saturating_sub(1), layer)) };
        if cap == 0 {
            break;
        }
        if score >= 0 {
            util = util.saturating_add((cap.min(i128::MAX as u128) as i128).saturating_mul(score as i128));
            size = size.saturating_add(cap);
        } else {
            let fit = (util / (-score as i128)) as u128;
            if fit < cap {
                return size.saturating_add(fit);
            }
            util -= (cap as i128) * (-score as i128);
            size = size.saturating_add(cap);
        }
    }
    size
}

fn clamp(v: u128) -> usize {
    v.min(usize::MAX as u128) as usize
}

/// Coalition-size bound from the maximum degree for closed scoring vectors:
/// every member of a coalition with more agents has negative utility.
///
/// Returns `max((s₁+1)·Δ·(Δ−1)^{δ−2}, m*)`, where `m*` is
/// [`degree_threshold`].  The counting formula alone is not sound for every
/// vector (a five-agent path centred at an agent of utility `2` under
/// `(1,0,-1)` with `Δ = 2` exceeds the formula value `4`), so the greedy
/// threshold, which is sound by construction, is folded in.
pub fn degree_coalition_bound(s: &ScoringVector, max_degree: usize) -> Result<usize> {
    if !s.is_closed() {
        bail!(Unsupported, "the degree bound needs a closed scoring vector");
    }
    let formula = degree_formula(s, max_degree).unwrap_or(0);
    Ok(clamp(formula.max(degree_threshold(s, max_degree)).max(1)))
}

/// Coalition-size bound `2·(s₁+1)·tw + 1` for vectors with `s(2) < 0`:
/// a larger coalition has negative total utility.
pub fn treewidth_coalition_bound(s: &ScoringVector, tw: usize) -> Result<usize> {
    if s.score(2) >= ExtendedValue::ZERO {
        bail!(PreconditionViolated, "the treewidth bound needs s(2) < 0");
    }
    let v = 2u128 * ((s.s1() + 1).max(0) as u128) * tw as u128 + 1;
    Ok(clamp(v))
}

/// Diameter limit `ℓ = 2·s₁·δ` for open vectors: a coalition of larger
/// diameter always contains an agent with negative utility, so the outcome is
/// neither individually rational nor Nash stable.
///
/// Requires `s₁ > 0` and a negative tail score `s_δ < 0`; with `s_δ ≥ 0` far
/// agents cost nothing and arbitrarily long paths are individually rational.
pub fn stable_diameter_limit(s: &ScoringVector) -> Result<usize> {
    if s.is_closed() {
        bail!(NotApplicable, "closed vectors already force diameter at most δ");
    }
    if s.s1() <= 0 {
        bail!(PreconditionViolated, "the diameter limit needs s₁ > 0");
    }
    if s.last() >= 0 {
        bail!(PreconditionViolated, "the diameter limit needs a negative tail score s_δ");
    }
    Ok(2 * s.s1() as usize * s.delta())
}

/// Collects every bound whose premise holds; `tw` is a treewidth upper bound.
pub fn bound_report(s: &ScoringVector, g: &SocialNetwork, tw: Option<usize>) -> BoundReport {
    BoundReport {
        max_coalition_size_degree: degree_coalition_bound(s, g.max_degree()).ok(),
        max_coalition_size_treewidth: tw.and_then(|tw| treewidth_coalition_bound(s, tw).ok()),
        stable_diameter_limit: stable_diameter_limit(s).ok(),
        welfare_diameter_limit: s.delta(),
    }
}

/// A bound or mode requirement that an outcome violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundViolation {
    /// The outcome is not admissible under the requested mode.
    Mode(Deviation),
    /// A coalition exceeds the degree bound (all its members have negative utility).
    DegreeSize {
        /// Canonical coalition index.
        coalition: usize,
        /// Coalition size.
        size: usize,
        /// The bound.
        bound: usize,
    },
    /// A coalition exceeds the treewidth bound (negative total utility).
    TreewidthSize {
        /// Canonical coalition index.
        coalition: usize,
        /// Coalition size.
        size: usize,
        /// The bound.
        bound: usize,
    },
    /// A coalition of a closed-vector instance is disconnected or wider than `δ`.
    WelfareDiameter {
        /// Canonical coalition index.
        coalition: usize,
        /// Its diameter.
        diameter: ExtendedValue,
    },
    /// A coalition of an open-vector instance is wider than the stable limit.
    StableDiameter {
        /// Canonical coalition index.
        coalition: usize,
        /// Its diameter.
        diameter: ExtendedValue,
        /// The limit.
        limit: usize,
    },
}

/// Independent validation report for an outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Social welfare.
    pub welfare: ExtendedValue,
    /// Utility of every agent.
    pub utilities: Vec<ExtendedValue>,
    /// Individual rationality verdict.
    pub individually_rational: bool,
    /// Nash stability verdict.
    pub nash_stable: bool,
    /// Diameter of each coalition in canonical order.
    pub diameters: Vec<ExtendedValue>,
    /// Bounds in force.
    pub bounds: BoundReport,
    /// Everything the outcome violates (empty for a clean certificate).
    pub violations: Vec<BoundViolation>,
}

impl Certificate {
    /// True when no violation was recorded.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Certifies an outcome: welfare, IR/NS verdicts, coalition diameters and bound violations.
pub fn certify_outcome(s: &ScoringVector, g: &SocialNetwork, p: &Outcome, mode: Mode) -> Certificate {
    let tw = compute_decomposition(g, 2_000).ok().map(|t| t.width());
    let bounds = bound_report(s, g, tw);
    let ir = find_deviation(s, g, p, Mode::Ir);
    let ns = find_deviation(s, g, p, Mode::Ns);
    let mut violations = Vec::new();
    match mode {
        Mode::Welfare => {}
        Mode::Ir => violations.extend(ir.clone().map(BoundViolation::Mode)),
        Mode::Ns => violations.extend(ns.clone().map(BoundViolation::Mode)),
    }
    let diameters: Vec<ExtendedValue> = p.coalitions().iter().map(|c| coalition_diameter(g, c)).collect();
    for (k, (c, &diameter)) in p.coalitions().iter().zip(&diameters).enumerate() {
        let size = c.len();
        if let Some(bound) = bounds.max_coalition_size_degree.filter(|&b| size > b) {
            violations.push(BoundViolation::DegreeSize { coalition: k, size, bound });
        }
        if let Some(bound) = bounds.max_coalition_size_treewidth.filter(|&b| size > b) {
            violations.push(BoundViolation::TreewidthSize { coalition: k, size, bound });
        }
        if s.is_closed() && (diameter.is_neg_inf() || diameter > ExtendedValue::Finite(s.delta() as i64)) {
            violations.push(BoundViolation::WelfareDiameter { coalition: k, diameter });
        }
        if let Some(limit) = bounds.stable_diameter_limit {
            if diameter > ExtendedValue::Finite(limit as i64) {
                violations.push(BoundViolation::StableDiameter { coalition: k, diameter, limit });
            }
        }
    }
    Certificate {
        welfare: social_welfare(s, g, p),
        utilities: utilities(s, g, p),
        individually_rational: ir.is_none(),
        nash_stable: ns.is_none(),
        diameters,
        bounds,
        violations,
    }
}
