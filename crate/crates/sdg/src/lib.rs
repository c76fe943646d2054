//! Exact solvers for score-based social distance games.
//!
//! A social distance game places `n` agents on a simple undirected graph.
//! An outcome partitions the agents into coalitions, and an agent's utility
//! is the sum of `s(d)` over its coalition mates, where `d` is their distance
//! inside the subgraph induced by the coalition and `s` is a non-increasing
//! scoring vector.  The crate computes outcomes of maximum social welfare,
//! optionally restricted to individually rational (IR) or Nash stable (NS)
//! outcomes, with four independent exact algorithms:
//!
//! * [`oracle`] – exhaustive partition enumeration (ground truth),
//! * [`twdp`] – a dynamic program over a nice tree-decomposition,
//! * [`fptdp`] – a dynamic program over coalition topologies of bounded size,
//! * [`vc`] – branching over coalition structures on a vertex cover combined
//!   with a small integer quadratic program.
//!
//! Supporting modules provide stability checks ([`stability`]), structural
//! bounds ([`bounds`]), tree-decompositions ([`treedecomp`]) and the hardness
//! instance chain ([`reductions`]).
//!
//! The crate is `no_std` and only needs `alloc`; file formats, generators and
//! the command-line front end live in the companion `sdg-cli` crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
mod canon;
pub mod error;
pub mod eval;
pub mod fptdp;
pub mod network;
pub mod oracle;
pub mod outcome;
pub mod reductions;
pub mod scoring;
pub mod solution;
pub mod stability;
pub mod treedecomp;
pub mod twdp;
pub mod value;
pub mod vc;

pub use error::SdgError;
pub use eval::{agent_utility, coalition_diameter, coalition_distance, social_welfare};
pub use network::SocialNetwork;
pub use outcome::Outcome;
pub use scoring::{score_at, ScoringVector, Tail};
pub use solution::{Mode, SolveResult};
pub use value::ExtendedValue;

/// Agents are identified by their index `0..n`.
pub type Agent = usize;
