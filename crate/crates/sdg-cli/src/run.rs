//! Algorithm selection and the `solve`/`check` pipelines.

use std::time::Instant;

use anyhow::{bail, Result};
use log::{info, warn};

use sdg::bounds::certify_outcome;
use sdg::fptdp::{select_sz, solve_fpt};
use sdg::oracle::{brute_force_solve_with, OracleConfig, HARD_CAP};
use sdg::stability::find_deviation;
use sdg::treedecomp::{compute_decomposition, make_nice, validate, TreeDecomposition, DEFAULT_BUDGET};
use sdg::twdp::solve_tw;
use sdg::vc::{compute_vertex_cover_with, solve_vc};
use sdg::{Mode, Outcome, ScoringVector, SocialNetwork, SolveResult, Tail};

use crate::report::{coalitions_1based, CertificateInfo, InstanceInfo, Report, Status, Timings, Value};

/// Algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Algorithm {
    /// Pick deterministically from the instance shape.
    Auto,
    /// Exhaustive partition enumeration.
    Brute,
    /// Treewidth dynamic program (closed vectors only).
    Twdp,
    /// Coalition-size-bounded dynamic program.
    Fptdp,
    /// Vertex-cover structure branching.
    Vc,
}

impl Algorithm {
    /// Name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Brute => "brute",
            Algorithm::Twdp => "twdp",
            Algorithm::Fptdp => "fptdp",
            Algorithm::Vc => "vc",
        }
    }
}

/// Largest instance the exhaustive search is chosen for automatically.
pub const AUTO_BRUTE_MAX: usize = 10;
/// Largest width for which auto selects the treewidth dynamic program.
pub const AUTO_TW_MAX: usize = 4;
/// Largest cover for which auto selects the vertex-cover solver.
pub const AUTO_COVER_MAX: usize = 8;

/// A concrete algorithm choice with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    /// The algorithm (never `Auto`).
    pub algorithm: Algorithm,
    /// Coalition-size limit for `fptdp`.
    pub sz: Option<usize>,
    /// Agent cap for `brute`.
    pub cap: usize,
    /// Why it was chosen.
    pub reason: String,
}

/// Deterministic automatic selection: brute for `n ≤ 10`; twdp for width ≤ 4
/// and a closed tail; fptdp when a coalition-size bound applies; vc for a
/// cover of at most 8 agents; otherwise brute with the raised agent cap.
pub fn select(s: &ScoringVector, g: &SocialNetwork) -> Choice {
    let n = g.n();
    let choice = |algorithm, sz, cap, reason: String| Choice { algorithm, sz, cap, reason };
    if n <= AUTO_BRUTE_MAX {
        return choice(Algorithm::Brute, None, OracleConfig::default().cap, format!("{n} agents ≤ {AUTO_BRUTE_MAX}"));
    }
    if s.is_closed() {
        if let Ok(t) = compute_decomposition(g, DEFAULT_BUDGET) {
            if t.width() <= AUTO_TW_MAX {
                return choice(Algorithm::Twdp, None, 0, format!("width {} ≤ {AUTO_TW_MAX}, closed tail", t.width()));
            }
        }
    }
    if let Some(sz) = select_sz(s, g) {
        return choice(Algorithm::Fptdp, Some(sz), 0, format!("coalition-size bound {sz} applies"));
    }
    if let Ok(cover) = compute_vertex_cover_with(g, 1_000_000) {
        if cover.len() <= AUTO_COVER_MAX {
            return choice(Algorithm::Vc, None, 0, format!("vertex cover {} ≤ {AUTO_COVER_MAX}", cover.len()));
        }
    }
    warn!("no parameterised algorithm applies; falling back to brute force with the raised cap of {HARD_CAP} agents");
    choice(Algorithm::Brute, None, HARD_CAP, "fallback".to_string())
}

/// Parses a comma-separated scoring vector.
pub fn parse_scores(text: &str, tail: Tail) -> Result<ScoringVector> {
    let scores = text
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| anyhow::anyhow!("score `{}` is not an integer", t.trim())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoringVector::new(scores, tail)?)
}

/// Rejects algorithm/vector combinations the solvers do not support.
pub fn check_supported(s: &ScoringVector, algorithm: Algorithm) -> Result<()> {
    if algorithm == Algorithm::Twdp && !s.is_closed() {
        bail!(
            "twdp needs a closed scoring vector: with an open tail, coalitions of unbounded diameter \
             score s(δ) per pair, so the per-bag distance tables are not finite; use fptdp, vc or brute"
        );
    }
    Ok(())
}

/// Runs one concrete algorithm.  `td` overrides the computed decomposition.
pub fn run_algorithm(
    s: &ScoringVector,
    g: &SocialNetwork,
    mode: Mode,
    choice: &Choice,
    td: Option<&TreeDecomposition>,
) -> Result<Option<SolveResult>> {
    check_supported(s, choice.algorithm)?;
    let nice = || -> Result<_> {
        let t = match td {
            Some(t) => {
                if let Err(v) = validate(g, t) {
                    bail!("the tree-decomposition is invalid: {v}");
                }
                t.clone()
            }
            None => compute_decomposition(g, DEFAULT_BUDGET)?,
        };
        Ok(make_nice(&t)?)
    };
    Ok(match choice.algorithm {
        Algorithm::Auto => unreachable!("auto is resolved by select()"),
        Algorithm::Brute => {
            brute_force_solve_with(s, g, mode, OracleConfig { cap: choice.cap, diameter_pruning: true })?
        }
        Algorithm::Twdp => solve_tw(s, g, &nice()?, mode)?.0,
        Algorithm::Fptdp => {
            let sz = match choice.sz {
                Some(sz) => sz,
                None => select_sz(s, g).unwrap_or(g.n()).max(1),
            };
            solve_fpt(s, g, &nice()?, sz, mode)?
        }
        Algorithm::Vc => solve_vc(s, g, mode)?,
    })
}

/// Resolves an algorithm request into a concrete choice.
pub fn resolve(s: &ScoringVector, g: &SocialNetwork, algorithm: Algorithm, sz: Option<usize>) -> Choice {
    if algorithm == Algorithm::Auto {
        let mut c = select(s, g);
        if sz.is_some() && c.algorithm == Algorithm::Fptdp {
            c.sz = sz;
        }
        info!("auto selected {} ({})", c.algorithm.name(), c.reason);
        return c;
    }
    Choice { algorithm, sz, cap: OracleConfig::default().cap, reason: "requested".to_string() }
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros().min(u64::MAX as u128) as u64
}

/// Solves an instance and builds the report.
pub fn solve_report(
    source: Option<String>,
    s: &ScoringVector,
    g: &SocialNetwork,
    mode: Mode,
    algorithm: Algorithm,
    sz: Option<usize>,
    td: Option<&TreeDecomposition>,
) -> Result<Report> {
    let start = Instant::now();
    let choice = resolve(s, g, algorithm, sz);
    let solve_start = Instant::now();
    let result = run_algorithm(s, g, mode, &choice, td)?;
    let solve_us = micros(solve_start);
    let instance = InstanceInfo::new(source, g, s);
    let mut report = match result {
        None => Report {
            instance,
            mode: mode.name().to_string(),
            algorithm: choice.algorithm.name().to_string(),
            status: Status::Infeasible,
            optimal: Some(true),
            welfare: None,
            coalitions: Vec::new(),
            utilities: Vec::new(),
            certificate: None,
            timings: Timings::default(),
        },
        Some(r) => {
            let mut rep = outcome_report(instance, s, g, &r.outcome, mode);
            rep.algorithm = choice.algorithm.name().to_string();
            rep.status = Status::Solved;
            rep.optimal = Some(r.optimal);
            rep
        }
    };
    report.timings = Timings { solve_us, total_us: micros(start) };
    Ok(report)
}

/// Certifies an outcome; the report has status `checked`.
pub fn check_report(source: Option<String>, s: &ScoringVector, g: &SocialNetwork, p: &Outcome, mode: Mode) -> Report {
    let start = Instant::now();
    let mut report = outcome_report(InstanceInfo::new(source, g, s), s, g, p, mode);
    let t = micros(start);
    report.timings = Timings { solve_us: t, total_us: t };
    report
}

fn outcome_report(instance: InstanceInfo, s: &ScoringVector, g: &SocialNetwork, p: &Outcome, mode: Mode) -> Report {
    let cert = certify_outcome(s, g, p, mode);
    let witness = find_deviation(s, g, p, Mode::Ns);
    Report {
        instance,
        mode: mode.name().to_string(),
        algorithm: "input".to_string(),
        status: Status::Checked,
        optimal: None,
        welfare: Some(Value(cert.welfare)),
        coalitions: coalitions_1based(p),
        utilities: cert.utilities.iter().copied().map(Value).collect(),
        certificate: Some(CertificateInfo::new(&cert, witness.as_ref())),
        timings: Timings::default(),
    }
}
