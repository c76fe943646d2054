//! Solver modes and results shared by all algorithms.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Result;
use crate::network::SocialNetwork;
use crate::outcome::Outcome;
use crate::value::ExtendedValue;
use crate::Agent;

/// Which outcomes are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Every outcome.
    Welfare,
    /// Individually rational outcomes (no agent has negative utility).
    Ir,
    /// Nash stable outcomes.
    Ns,
}

impl Mode {
    /// All modes, weakest constraint first.
    pub const ALL: [Mode; 3] = [Mode::Welfare, Mode::Ir, Mode::Ns];

    /// Lower-case name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Welfare => "welfare",
            Mode::Ir => "ir",
            Mode::Ns => "ns",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An optimal (or size-constrained optimal) outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// The outcome.
    pub outcome: Outcome,
    /// Its social welfare.
    pub welfare: ExtendedValue,
    /// The mode it was optimised for.
    pub mode: Mode,
    /// True when the welfare is the optimum over all admissible outcomes;
    /// false when a coalition-size cap below every valid bound was imposed.
    pub optimal: bool,
}

/// Solves each connected component separately and merges the answers.
///
/// `solve` receives the induced component network (agents relabelled in
/// ascending order) and returns the component optimum, or `None` when the
/// component has no admissible outcome (then neither has the whole network,
/// because agents of different components never gain from each other).
pub(crate) fn solve_by_components<F>(
    g: &SocialNetwork,
    mode: Mode,
    mut solve: F,
) -> Result<Option<SolveResult>>
where
    F: FnMut(&SocialNetwork) -> Result<Option<SolveResult>>,
{
    let comps: Vec<Vec<Agent>> = g.components();
    let mut parts = Vec::with_capacity(comps.len());
    let mut welfare = ExtendedValue::ZERO;
    let mut optimal = true;
    for comp in &comps {
        let sub = g.induced(comp);
        match solve(&sub)? {
            Some(r) => {
                welfare += r.welfare;
                optimal &= r.optimal;
                parts.push(r.outcome);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(SolveResult { outcome: Outcome::merge(g.n(), &comps, &parts), welfare, mode, optimal }))
}
