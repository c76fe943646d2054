//! `sdg` command-line front end.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use sdg::bounds::bound_report;
use sdg::fptdp::select_sz;
use sdg::reductions::NaeFormula;
use sdg::treedecomp::{compute_decomposition_detailed, DEFAULT_BUDGET};
use sdg::vc::compute_vertex_cover_with;
use sdg::{Mode, ScoringVector, SocialNetwork, Tail};

use sdg_cli::bench::{run_bench, to_table, BenchConfig};
use sdg_cli::exit;
use sdg_cli::formats::{parse_graph, parse_nae, parse_outcome, parse_td, read_file, write_graph, write_nae, write_outcome};
use sdg_cli::generators;
use sdg_cli::report::Report;
use sdg_cli::run::{check_report, parse_scores, select, solve_report, Algorithm};

#[derive(Parser, Debug)]
#[command(name = "sdg", version, about = "Exact solvers for score-based social distance games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a welfare-optimal (IR / NS) outcome.
    Solve(SolveArgs),
    /// Certify a given outcome: welfare, IR/NS verdicts and bound diagnostics.
    Check(CheckArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Compare algorithms on a corpus of .gr files.
    Bench(BenchArgs),
    /// Print the structural bounds that apply to an instance.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Welfare,
    Ir,
    Ns,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Welfare => Mode::Welfare,
            ModeArg::Ir => Mode::Ir,
            ModeArg::Ns => Mode::Ns,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Graph file (.gr, or a plain 1-indexed edge list).
    #[arg(long)]
    graph: PathBuf,
    /// Scoring vector s(1),…,s(δ), comma-separated and non-increasing.
    #[arg(long, allow_hyphen_values = true)]
    scores: String,
    /// Open tail: distances beyond δ score s(δ) instead of -∞.
    #[arg(long)]
    open: bool,
}

impl InstanceArgs {
    fn load(&self) -> Result<(SocialNetwork, ScoringVector)> {
        let g = parse_graph(&read_file(&self.graph)?).with_context(|| format!("in {}", self.graph.display()))?;
        let s = parse_scores(&self.scores, if self.open { Tail::Open } else { Tail::Closed })?;
        Ok((g, s))
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Admissible outcomes.
    #[arg(long, value_enum, default_value = "welfare")]
    mode: ModeArg,
    /// Algorithm.
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algorithm,
    /// Coalition-size limit for fptdp (default: the smallest valid bound).
    #[arg(long)]
    sz: Option<usize>,
    /// Tree-decomposition (.td) for twdp/fptdp (default: computed).
    #[arg(long)]
    td: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Also write the outcome to this .out file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Outcome file (.out): one coalition per line, 1-indexed agents.
    #[arg(long)]
    outcome: PathBuf,
    /// Mode whose requirement is reported as a violation.
    #[arg(long, value_enum, default_value = "ns")]
    mode: ModeArg,
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Hardness instance from a NAE-3-SAT formula (.gr with a `c target <b>` line).
    Hard {
        /// Formula in DIMACS style.
        #[arg(long)]
        formula: PathBuf,
        /// Scoring vector with δ = 1.
        #[arg(long, default_value = "1")]
        scores: String,
        /// Output .gr (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connected graph of treewidth at most --tw (random partial k-tree).
    RandomTw {
        /// Number of agents.
        #[arg(long)]
        n: usize,
        /// Treewidth bound.
        #[arg(long)]
        tw: usize,
        /// Probability of keeping each optional k-tree edge.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output .gr (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connected graph of maximum degree at most --max-deg.
    RandomDegree {
        /// Number of agents.
        #[arg(long)]
        n: usize,
        /// Degree bound.
        #[arg(long)]
        max_deg: usize,
        /// Attempts to add edges beyond the spanning tree (default: n).
        #[arg(long)]
        extra: Option<usize>,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output .gr (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random NAE-3-SAT formula.
    RandomNae {
        /// Number of variables.
        #[arg(long)]
        vars: usize,
        /// Number of clauses.
        #[arg(long)]
        clauses: usize,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output .cnf (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory of .gr files.
    #[arg(long)]
    corpus: PathBuf,
    /// Closed scoring vectors (repeatable).
    #[arg(long = "scores", allow_hyphen_values = true)]
    scores: Vec<String>,
    /// Open scoring vectors (repeatable).
    #[arg(long = "open-scores", allow_hyphen_values = true)]
    open_scores: Vec<String>,
    /// Modes.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "welfare,ir,ns")]
    modes: Vec<ModeArg>,
    /// Algorithms.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "brute,twdp,fptdp,vc")]
    algos: Vec<Algorithm>,
    /// Where the smallest failing instance is written.
    #[arg(long, default_value = "bench-failure.gr")]
    dump: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush());
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Human => print_out(&report.to_human()),
        Format::Json => print_out(&(report.to_json() + "\n")),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print_out(text);
            Ok(())
        }
    }
}

fn solve(a: SolveArgs) -> Result<i32> {
    let (g, s) = a.instance.load()?;
    let td = match &a.td {
        Some(p) => Some(parse_td(&read_file(p)?, g.n()).with_context(|| format!("in {}", p.display()))?),
        None => None,
    };
    let source = Some(a.instance.graph.display().to_string());
    let report = solve_report(source, &s, &g, a.mode.into(), a.algo, a.sz, td.as_ref())?;
    if let Some(out) = &a.out {
        let p = sdg::Outcome::new(
            g.n(),
            report.coalitions.iter().map(|c| c.iter().map(|x| x - 1).collect()).collect(),
        );
        if let Ok(p) = p {
            std::fs::write(out, write_outcome(&p)).with_context(|| format!("cannot write {}", out.display()))?;
        }
    }
    emit(&report, a.format);
    Ok(report.exit_code())
}

fn check(a: CheckArgs) -> Result<i32> {
    let (g, s) = a.instance.load()?;
    let p = parse_outcome(&read_file(&a.outcome)?, g.n()).with_context(|| format!("in {}", a.outcome.display()))?;
    let report = check_report(Some(a.instance.graph.display().to_string()), &s, &g, &p, a.mode.into());
    emit(&report, a.format);
    Ok(exit::OK)
}

fn gen(cmd: GenCommand) -> Result<i32> {
    match cmd {
        GenCommand::Hard { formula, scores, out } => {
            let phi: NaeFormula =
                parse_nae(&read_file(&formula)?).with_context(|| format!("in {}", formula.display()))?;
            let s = parse_scores(&scores, Tail::Closed)?;
            let h = generators::hard(&phi, &s)?;
            write_or_print(out.as_deref(), &write_graph(&h.network, &h.comments))?;
            if out.is_some() {
                print_out(&format!("target {}\n", h.target));
            }
        }
        GenCommand::RandomTw { n, tw, p, seed, out } => {
            let g = generators::random_tw(n, tw, p, seed)?;
            let comments = vec![format!("random-tw n {n} tw {tw} p {p} seed {seed}")];
            write_or_print(out.as_deref(), &write_graph(&g, &comments))?;
        }
        GenCommand::RandomDegree { n, max_deg, extra, seed, out } => {
            let extra = extra.unwrap_or(n);
            let g = generators::random_degree(n, max_deg, extra, seed)?;
            let comments = vec![format!("random-degree n {n} max-deg {max_deg} extra {extra} seed {seed}")];
            write_or_print(out.as_deref(), &write_graph(&g, &comments))?;
        }
        GenCommand::RandomNae { vars, clauses, seed, out } => {
            let f = generators::random_nae(vars, clauses, seed)?;
            write_or_print(out.as_deref(), &write_nae(&f))?;
        }
    }
    Ok(exit::OK)
}

fn bench(a: BenchArgs) -> Result<i32> {
    let mut scores = Vec::new();
    for t in &a.scores {
        scores.push(parse_scores(t, Tail::Closed)?);
    }
    for t in &a.open_scores {
        scores.push(parse_scores(t, Tail::Open)?);
    }
    if scores.is_empty() {
        bail!("bench needs at least one --scores or --open-scores vector");
    }
    let cfg = BenchConfig {
        corpus: a.corpus,
        modes: a.modes.into_iter().map(Into::into).collect(),
        algorithms: a.algos,
        scores,
        dump: a.dump,
        jobs: a.jobs,
    };
    let report = run_bench(&cfg)?;
    match a.format {
        Format::Human => print_out(&to_table(&report)),
        Format::Json => print_out(&(serde_json::to_string_pretty(&report)? + "\n")),
    }
    Ok(if report.failure.is_some() { exit::DISAGREEMENT } else { exit::OK })
}

#[derive(Serialize)]
struct BoundsSummary {
    agents: usize,
    edges: usize,
    max_degree: usize,
    treewidth: Option<usize>,
    treewidth_exact: bool,
    vertex_cover: Option<usize>,
    max_coalition_size_degree: Option<usize>,
    max_coalition_size_treewidth: Option<usize>,
    stable_diameter_limit: Option<usize>,
    welfare_diameter_limit: usize,
    fpt_size_limit: Option<usize>,
    auto_algorithm: String,
}

fn bounds(a: BoundsArgs) -> Result<i32> {
    let (g, s) = a.instance.load()?;
    let td = compute_decomposition_detailed(&g, DEFAULT_BUDGET).ok();
    let tw = td.as_ref().map(|t| t.decomposition.width());
    let b = bound_report(&s, &g, tw);
    let summary = BoundsSummary {
        agents: g.n(),
        edges: g.edge_count(),
        max_degree: g.max_degree(),
        treewidth: tw,
        treewidth_exact: td.as_ref().is_some_and(|t| t.exact),
        vertex_cover: compute_vertex_cover_with(&g, 1_000_000).ok().map(|c| c.len()),
        max_coalition_size_degree: b.max_coalition_size_degree,
        max_coalition_size_treewidth: b.max_coalition_size_treewidth,
        stable_diameter_limit: b.stable_diameter_limit,
        welfare_diameter_limit: b.welfare_diameter_limit,
        fpt_size_limit: select_sz(&s, &g),
        auto_algorithm: select(&s, &g).algorithm.name().to_string(),
    };
    match a.format {
        Format::Json => print_out(&(serde_json::to_string_pretty(&summary)? + "\n")),
        Format::Human => {
            let value = serde_json::to_value(&summary)?;
            for (k, v) in value.as_object().expect("struct serialises to an object") {
                let v = if v.is_null() { "n/a".to_string() } else { v.to_string().trim_matches('"').to_string() };
                print_out(&format!("{k:<30} {v}\n"));
            }
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are successes; every usage error is exit 1.
            return ExitCode::from(if e.use_stderr() { exit::ERROR as u8 } else { exit::OK as u8 });
        }
    };
    info!("{:?}", cli.command);
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Gen(g) => gen(g),
        Command::Bench(a) => bench(a),
        Command::Bounds(a) => bounds(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
