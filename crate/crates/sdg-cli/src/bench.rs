//! Cross-algorithm benchmark over a corpus of `.gr` files.
//!
//! Every instance is solved by every requested algorithm for every scoring
//! vector and mode.  All successful runs must report the same optimal welfare
//! and return outcomes that are admissible and whose welfare recomputes to the
//! reported value; anything else is a disagreement.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use sdg::stability::satisfies;
use sdg::{social_welfare, Mode, ScoringVector, SocialNetwork};

use crate::formats::{parse_graph, read_file, write_graph};
use crate::report::Value;
use crate::run::{check_supported, resolve, run_algorithm, Algorithm};

/// Benchmark settings.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Directory holding `.gr` files (searched non-recursively).
    pub corpus: PathBuf,
    /// Modes to solve.
    pub modes: Vec<Mode>,
    /// Algorithms to compare (`auto` is resolved per instance).
    pub algorithms: Vec<Algorithm>,
    /// Scoring vectors to solve with.
    pub scores: Vec<ScoringVector>,
    /// Where the smallest failing instance is written.
    pub dump: PathBuf,
    /// Worker threads (at least 1).
    pub jobs: usize,
}

/// One algorithm run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoResult {
    /// Algorithm name.
    pub algorithm: String,
    /// `solved`, `infeasible`, `skipped` or `error`.
    pub status: String,
    /// Welfare when solved.
    pub welfare: Option<Value>,
    /// Explanation for `skipped`/`error` and for invalid outcomes.
    pub message: Option<String>,
    /// Wall time in microseconds.
    pub time_us: u64,
}

/// One (instance, scoring vector, mode) row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    /// Instance file.
    pub instance: String,
    /// Number of agents.
    pub agents: usize,
    /// Number of edges.
    pub edges: usize,
    /// Scoring vector, comma-separated.
    pub scores: String,
    /// `closed` or `open`.
    pub tail: String,
    /// Mode name.
    pub mode: String,
    /// Per-algorithm results in the requested order.
    pub results: Vec<AlgoResult>,
    /// True when all successful runs agree and returned valid outcomes.
    pub agree: bool,
}

/// The smallest instance on which algorithms disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchFailure {
    /// Offending row.
    pub row: BenchRow,
    /// Where the instance was dumped.
    pub dump: String,
}

/// Benchmark output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchReport {
    /// All rows, ordered by instance, scoring vector and mode.
    pub rows: Vec<BenchRow>,
    /// Set when any row disagrees.
    pub failure: Option<BenchFailure>,
}

/// The `.gr` files of a corpus directory, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "gr") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn scores_text(s: &ScoringVector) -> String {
    s.scores().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Runs every algorithm on one instance/vector/mode and checks agreement.
pub fn bench_row(name: &str, g: &SocialNetwork, s: &ScoringVector, mode: Mode, algorithms: &[Algorithm]) -> BenchRow {
    let mut results = Vec::with_capacity(algorithms.len());
    let mut valid = true;
    for &a in algorithms {
        let start = Instant::now();
        let mut r = AlgoResult { algorithm: a.name().to_string(), status: String::new(), welfare: None, message: None, time_us: 0 };
        if let Err(e) = check_supported(s, a) {
            r.status = "skipped".into();
            r.message = Some(e.to_string());
            results.push(r);
            continue;
        }
        let choice = resolve(s, g, a, None);
        match run_algorithm(s, g, mode, &choice, None) {
            Ok(Some(sol)) => {
                r.status = "solved".into();
                r.welfare = Some(Value(sol.welfare));
                if social_welfare(s, g, &sol.outcome) != sol.welfare {
                    valid = false;
                    r.message = Some(format!("outcome welfare {} differs from the reported value", social_welfare(s, g, &sol.outcome)));
                } else if !satisfies(s, g, &sol.outcome, mode) {
                    valid = false;
                    r.message = Some(format!("outcome is not admissible for mode {mode}"));
                } else if !sol.optimal {
                    valid = false;
                    r.message = Some("solver did not certify optimality".into());
                }
            }
            Ok(None) => r.status = "infeasible".into(),
            Err(e) => {
                r.status = "error".into();
                r.message = Some(format!("{e:#}"));
            }
        }
        r.time_us = start.elapsed().as_micros() as u64;
        results.push(r);
    }
    let answers: Vec<Option<Value>> =
        results.iter().filter(|r| r.status == "solved" || r.status == "infeasible").map(|r| r.welfare).collect();
    let agree = valid && answers.windows(2).all(|w| w[0] == w[1]);
    BenchRow {
        instance: name.to_string(),
        agents: g.n(),
        edges: g.edge_count(),
        scores: scores_text(s),
        tail: if s.is_closed() { "closed" } else { "open" }.into(),
        mode: mode.name().into(),
        results,
        agree,
    }
}

/// Runs the benchmark.  On disagreement the smallest failing instance is
/// written to `cfg.dump` and reported in `failure`.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let files = corpus_files(&cfg.corpus)?;
    let instances = files
        .iter()
        .map(|f| Ok((f.display().to_string(), parse_graph(&read_file(f)?).with_context(|| format!("in {}", f.display()))?)))
        .collect::<Result<Vec<_>>>()?;
    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, Vec<BenchRow>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.max(1).min(instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, g)) = instances.get(i) else { break };
                let mut rows = Vec::new();
                for s in &cfg.scores {
                    for &mode in &cfg.modes {
                        rows.push(bench_row(name, g, s, mode, &cfg.algorithms));
                    }
                }
                done.lock().expect("no worker panicked").push((i, rows));
            });
        }
    });
    let mut done = done.into_inner().expect("no worker panicked");
    done.sort_by_key(|(i, _)| *i);
    let rows: Vec<BenchRow> = done.into_iter().flat_map(|(_, r)| r).collect();
    let failure = dump_smallest_failure(&rows, &instances, &cfg.dump)?;
    Ok(BenchReport { rows, failure })
}

/// Picks the failing row with the fewest agents (then edges, then position),
/// writes its instance to `dump` with the disagreement as comments, and
/// returns it; `None` when every row agrees.
pub fn dump_smallest_failure(
    rows: &[BenchRow],
    instances: &[(String, SocialNetwork)],
    dump: &Path,
) -> Result<Option<BenchFailure>> {
    let Some((_, row)) = rows.iter().enumerate().filter(|(_, r)| !r.agree).min_by_key(|(k, r)| (r.agents, r.edges, *k))
    else {
        return Ok(None);
    };
    let g = &instances.iter().find(|(n, _)| *n == row.instance).context("failing row refers to an unknown instance")?.1;
    let mut comments = vec![
        format!("disagreement on {}", row.instance),
        format!("scores {} {}", row.scores, row.tail),
        format!("mode {}", row.mode),
    ];
    for r in &row.results {
        comments.push(format!("{} {} {}", r.algorithm, r.status, r.welfare.map_or("-".to_string(), |w| w.to_string())));
    }
    std::fs::write(dump, write_graph(g, &comments)).with_context(|| format!("cannot write {}", dump.display()))?;
    Ok(Some(BenchFailure { row: row.clone(), dump: dump.display().to_string() }))
}

/// Tab-separated table with a header line.
pub fn to_table(report: &BenchReport) -> String {
    let mut out = String::from("instance\tagents\tedges\tscores\ttail\tmode\talgorithm\tstatus\twelfare\ttime_us\tagree\n");
    for row in &report.rows {
        for r in &row.results {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.instance,
                row.agents,
                row.edges,
                row.scores,
                row.tail,
                row.mode,
                r.algorithm,
                r.status,
                r.welfare.map_or("-".to_string(), |w| w.to_string()),
                r.time_us,
                row.agree
            );
        }
    }
    if let Some(f) = &report.failure {
        let _ = writeln!(out, "DISAGREEMENT on {} ({} {}, mode {}); instance dumped to {}", f.row.instance, f.row.scores, f.row.tail, f.row.mode, f.dump);
    }
    out
}
