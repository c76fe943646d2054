//! Text formats: graphs (`.gr`), tree-decompositions (`.td`), outcomes
//! (`.out`) and NAE-3-SAT formulas (DIMACS-style `.cnf`).
//!
//! All formats number agents from 1; the library numbers them from 0.
//! Parse errors name the offending line.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use sdg::reductions::NaeFormula;
use sdg::treedecomp::TreeDecomposition;
use sdg::{Outcome, SocialNetwork};

/// Meaningful lines: `(line number, content)` without comments (`c …`) and blanks.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#') && !l.starts_with('%'))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| anyhow!("line {line}: {what} `{tok}` is not a non-negative integer"))
}

/// Converts a 1-based agent number to a 0-based index.
fn agent(tok: &str, line: usize, n: usize) -> Result<usize> {
    let v = parse_usize(tok, line, "agent")?;
    if v == 0 || v > n {
        bail!("line {line}: agent {v} is outside 1..={n}");
    }
    Ok(v - 1)
}

/// Parses a PACE `.gr` graph (`p tw <n> <m>` header, one `u v` edge per line)
/// or, without a `p` header, a plain edge list whose optional first line holds
/// the agent count alone.
pub fn parse_graph(text: &str) -> Result<SocialNetwork> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let Some(&(first_no, first)) = lines.first() else {
        return Ok(SocialNetwork::from_edges(0, &[]));
    };
    let toks: Vec<&str> = first.split_whitespace().collect();
    let (n, declared_m, body) = if toks[0] == "p" {
        if toks.len() != 4 || toks[1] != "tw" {
            bail!("line {first_no}: expected `p tw <agents> <edges>`");
        }
        (parse_usize(toks[2], first_no, "agent count")?, Some(parse_usize(toks[3], first_no, "edge count")?), &lines[1..])
    } else if toks.len() == 1 {
        (parse_usize(toks[0], first_no, "agent count")?, None, &lines[1..])
    } else {
        // Plain edge list: the agent count is the largest agent mentioned.
        let mut n = 0;
        for &(no, l) in &lines {
            for t in l.split_whitespace() {
                n = n.max(parse_usize(t, no, "agent")?);
            }
        }
        (n, None, &lines[..])
    };
    let mut edges = Vec::with_capacity(body.len());
    for &(no, l) in body {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            bail!("line {no}: expected an edge `u v`, found `{l}`");
        }
        let (u, v) = (agent(t[0], no, n)?, agent(t[1], no, n)?);
        if u == v {
            bail!("line {no}: self-loop at agent {}", u + 1);
        }
        edges.push((u, v));
    }
    if let Some(m) = declared_m {
        if m != edges.len() {
            bail!("header declares {m} edges but {} were listed", edges.len());
        }
    }
    SocialNetwork::new(n, &edges).map_err(|e| anyhow!("invalid graph: {e}"))
}

/// Serialises a graph in PACE `.gr` format, with optional leading comments.
pub fn write_graph(g: &SocialNetwork, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let edges = g.edges();
    let _ = writeln!(out, "p tw {} {}", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

/// Parses a PACE `.td` tree-decomposition (`s td <bags> <width+1> <agents>`,
/// `b <i> <agents…>` lines, then tree edges `i j`) for a network with `n` agents.
pub fn parse_td(text: &str, n: usize) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (no, l) in content_lines(text) {
        let t: Vec<&str> = l.split_whitespace().collect();
        match t[0] {
            "s" => {
                if header.is_some() {
                    bail!("line {no}: duplicate solution header");
                }
                if t.len() != 5 || t[1] != "td" {
                    bail!("line {no}: expected `s td <bags> <width+1> <agents>`");
                }
                let count = parse_usize(t[2], no, "bag count")?;
                let size = parse_usize(t[3], no, "bag size")?;
                let agents = parse_usize(t[4], no, "agent count")?;
                if agents != n {
                    bail!("line {no}: decomposition is for {agents} agents, the network has {n}");
                }
                header = Some((count, size));
                bags = vec![None; count];
            }
            "b" => {
                let Some((count, size)) = header else { bail!("line {no}: bag before the `s td` header") };
                if t.len() < 2 {
                    bail!("line {no}: bag line without an index");
                }
                let i = parse_usize(t[1], no, "bag index")?;
                if i == 0 || i > count {
                    bail!("line {no}: bag index {i} is outside 1..={count}");
                }
                if bags[i - 1].is_some() {
                    bail!("line {no}: bag {i} is defined twice");
                }
                let mut bag = t[2..].iter().map(|x| agent(x, no, n)).collect::<Result<Vec<_>>>()?;
                if bag.len() > size {
                    bail!("line {no}: bag {i} has {} agents, more than the declared {size}", bag.len());
                }
                bag.sort_unstable();
                bag.dedup();
                bags[i - 1] = Some(bag);
            }
            _ => {
                let Some((count, _)) = header else { bail!("line {no}: tree edge before the `s td` header") };
                if t.len() != 2 {
                    bail!("line {no}: expected a tree edge `i j`, found `{l}`");
                }
                let (i, j) = (parse_usize(t[0], no, "bag index")?, parse_usize(t[1], no, "bag index")?);
                if i == 0 || j == 0 || i > count || j > count {
                    bail!("line {no}: tree edge {i} {j} refers to a bag outside 1..={count}");
                }
                edges.push((i - 1, j - 1));
            }
        }
    }
    if header.is_none() {
        bail!("missing `s td` header");
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| anyhow!("bag {} is never defined", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition { bags, edges, root: 0 })
}

/// Serialises a tree-decomposition in PACE `.td` format.
pub fn write_td(t: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    let size = t.bags.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "s td {} {} {}", t.bags.len(), size, n);
    for (i, b) in t.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for a in b {
            let _ = write!(out, " {}", a + 1);
        }
        out.push('\n');
    }
    for &(i, j) in &t.edges {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

/// Parses an outcome: one coalition per line, space-separated 1-based agents.
/// Agents not listed anywhere are rejected, as are agents listed twice.
pub fn parse_outcome(text: &str, n: usize) -> Result<Outcome> {
    let mut seen: Vec<Option<usize>> = vec![None; n];
    let mut coalitions = Vec::new();
    for (no, l) in content_lines(text) {
        let mut c = Vec::new();
        for tok in l.split_whitespace() {
            let a = agent(tok, no, n)?;
            if let Some(prev) = seen[a] {
                bail!("line {no}: agent {} already belongs to the coalition on line {prev}", a + 1);
            }
            seen[a] = Some(no);
            c.push(a);
        }
        coalitions.push(c);
    }
    if let Some(a) = seen.iter().position(Option::is_none) {
        bail!("agent {} is not assigned to any coalition", a + 1);
    }
    Outcome::new(n, coalitions).map_err(|e| anyhow!("invalid outcome: {e}"))
}

/// Serialises an outcome (one coalition per line, 1-based agents).
pub fn write_outcome(p: &Outcome) -> String {
    let mut out = String::new();
    for c in p.coalitions() {
        let line: Vec<String> = c.iter().map(|a| (a + 1).to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// Parses a NAE-3-SAT formula in DIMACS style (`p cnf <vars> <clauses>`, then
/// clauses of three non-zero literals terminated by `0`).
pub fn parse_nae(text: &str) -> Result<NaeFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<[i64; 3]> = Vec::new();
    let mut pending: Vec<(i64, usize)> = Vec::new();
    for (no, l) in content_lines(text) {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t[0] == "p" {
            if header.is_some() || t.len() != 4 || t[1] != "cnf" {
                bail!("line {no}: expected a single `p cnf <vars> <clauses>` header");
            }
            header = Some((parse_usize(t[2], no, "variable count")?, parse_usize(t[3], no, "clause count")?));
            continue;
        }
        let Some((vars, _)) = header else { bail!("line {no}: clause before the `p cnf` header") };
        for tok in t {
            let x: i64 = tok.parse().map_err(|_| anyhow!("line {no}: literal `{tok}` is not an integer"))?;
            if x == 0 {
                if pending.len() != 3 {
                    bail!("line {no}: clause has {} literals, NAE-3-SAT needs exactly 3", pending.len());
                }
                clauses.push([pending[0].0, pending[1].0, pending[2].0]);
                pending.clear();
            } else {
                if x.unsigned_abs() as usize > vars {
                    bail!("line {no}: literal {x} refers to a variable outside 1..={vars}");
                }
                pending.push((x, no));
            }
        }
    }
    let Some((vars, m)) = header else { bail!("missing `p cnf` header") };
    if let Some(&(_, no)) = pending.first() {
        bail!("line {no}: clause is not terminated by 0");
    }
    if clauses.len() != m {
        bail!("header declares {m} clauses but {} were listed", clauses.len());
    }
    NaeFormula::from_dimacs(vars, &clauses).map_err(|e| anyhow!("invalid formula: {e}"))
}

/// Serialises a NAE-3-SAT formula in DIMACS style.
pub fn write_nae(f: &NaeFormula) -> String {
    let mut out = String::from("c nae3sat\n");
    let _ = writeln!(out, "p cnf {} {}", f.vars(), f.clauses().len());
    for c in f.clauses() {
        for l in c {
            let v = l.var as i64 + 1;
            let _ = write!(out, "{} ", if l.negated { -v } else { v });
        }
        out.push_str("0\n");
    }
    out
}

/// Reads a file with a readable error message.
pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
