//! Hardness instance chain: NAE-3-SAT → 3-colouring of triangle-covered
//! graphs → welfare maximisation on the complement graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::network::SocialNetwork;
use crate::scoring::ScoringVector;
use crate::Agent;

/// A literal: variable index (0-based) and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// Variable index in `0..vars`.
    pub var: usize,
    /// True for a negated occurrence.
    pub negated: bool,
}

/// A NAE-3-SAT formula: every clause must contain a true and a false literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaeFormula {
    vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl NaeFormula {
    /// Builds a formula, checking that literals refer to declared variables.
    pub fn new(vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if vars == 0 {
            bail!(InvalidArgument, "a formula needs at least one variable");
        }
        if let Some(l) = clauses.iter().flatten().find(|l| l.var >= vars) {
            bail!(InvalidArgument, "literal refers to variable {} of {vars}", l.var + 1);
        }
        Ok(NaeFormula { vars, clauses })
    }

    /// Builds a formula from DIMACS-style signed 1-based literals.
    pub fn from_dimacs(vars: usize, clauses: &[[i64; 3]]) -> Result<Self> {
        let mut cs = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut lits = [Literal { var: 0, negated: false }; 3];
            for (l, &x) in lits.iter_mut().zip(c) {
                if x == 0 || x.unsigned_abs() as usize > vars {
                    bail!(InvalidArgument, "literal {x} is not a variable of 1..={vars}");
                }
                *l = Literal { var: x.unsigned_abs() as usize - 1, negated: x < 0 };
            }
            cs.push(lits);
        }
        NaeFormula::new(vars, cs)
    }

    /// Number of variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// The clauses.
    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// True when `assignment` NAE-satisfies every clause.
    pub fn nae_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            let v: Vec<bool> = c.iter().map(|l| assignment[l.var] != l.negated).collect();
            v.contains(&true) && v.contains(&false)
        })
    }

    /// Exhaustive NAE-satisfiability check (small formulas only).
    pub fn is_nae_satisfiable(&self) -> bool {
        (0u64..1 << self.vars).any(|m| {
            let a: Vec<bool> = (0..self.vars).map(|i| m >> i & 1 == 1).collect();
            self.nae_satisfied_by(&a)
        })
    }
}

/// A graph on `3m` vertices together with `m` vertex-disjoint triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCoveredGraph {
    /// The graph.
    pub graph: SocialNetwork,
    /// The covering triangles.
    pub triangles: Vec<[Agent; 3]>,
}

impl TriangleCoveredGraph {
    /// Checks that the triangles are disjoint, cover all vertices and are present as edges.
    pub fn new(graph: SocialNetwork, triangles: Vec<[Agent; 3]>) -> Result<Self> {
        let mut seen = vec![false; graph.n()];
        for t in &triangles {
            for &v in t {
                if v >= graph.n() || seen[v] {
                    bail!(InvalidArgument, "triangles must be disjoint and use vertices of the graph");
                }
                seen[v] = true;
            }
            if !(graph.has_edge(t[0], t[1]) && graph.has_edge(t[1], t[2]) && graph.has_edge(t[0], t[2])) {
                bail!(InvalidArgument, "({},{},{}) is not a triangle", t[0], t[1], t[2]);
            }
        }
        if seen.iter().any(|s| !s) {
            bail!(InvalidArgument, "triangles do not cover every vertex");
        }
        Ok(TriangleCoveredGraph { graph, triangles })
    }
}

/// Vertex of literal `l`: variable `i` owns vertices `a_i = 3i`, `x_i = 3i+1`, `¬x_i = 3i+2`.
fn literal_vertex(l: Literal) -> Agent {
    3 * l.var + if l.negated { 2 } else { 1 }
}

/// Builds the triangle-covered graph whose 3-colourability is equivalent to
/// NAE-satisfiability of `phi`.
///
/// Variable `i` contributes the triangle `(a_i, x_i, ¬x_i)` and edges from
/// `x_i`, `¬x_i` to `a_{i+1}`; clause `j` contributes the triangle
/// `(C_j1, C_j2, C_j3)` (vertices `3·vars + 3j + r`) with `C_jr` joined to the
/// vertex of its `r`-th literal.
pub fn nae_to_3ctcg(phi: &NaeFormula) -> TriangleCoveredGraph {
    let n = phi.vars;
    let m = phi.clauses.len();
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    for i in 0..n {
        let (a, x, nx) = (3 * i, 3 * i + 1, 3 * i + 2);
        edges.extend([(a, x), (a, nx), (x, nx)]);
        triangles.push([a, x, nx]);
        if i + 1 < n {
            edges.push((x, 3 * (i + 1)));
            edges.push((nx, 3 * (i + 1)));
        }
    }
    for (j, c) in phi.clauses.iter().enumerate() {
        let base = 3 * n + 3 * j;
        edges.extend([(base, base + 1), (base, base + 2), (base + 1, base + 2)]);
        triangles.push([base, base + 1, base + 2]);
        for (r, &l) in c.iter().enumerate() {
            edges.push((base + r, literal_vertex(l)));
        }
    }
    let graph = SocialNetwork::from_edges(3 * (n + m), &edges);
    TriangleCoveredGraph::new(graph, triangles).expect("construction yields a valid instance")
}

/// Complement network and welfare target `b = 3m·s₁·(m−1)`; requires a closed
/// vector with `δ = 1`.
pub fn ctcg_to_sdg(h: &TriangleCoveredGraph, s: &ScoringVector) -> Result<(SocialNetwork, i64)> {
    if !s.is_closed() || s.delta() != 1 {
        bail!(PreconditionViolated, "the reduction needs a closed scoring vector with δ = 1, got {s}");
    }
    let m = h.triangles.len() as i64;
    Ok((h.graph.complement(), 3 * m * s.s1() * (m - 1)))
}

/// A proper 3-colouring found by backtracking, or `None`.
pub fn three_coloring(g: &SocialNetwork) -> Option<Vec<u8>> {
    fn go(g: &SocialNetwork, v: usize, col: &mut Vec<u8>) -> bool {
        if v == g.n() {
            return true;
        }
        // Symmetry breaking: vertex v may only open the next unused colour.
        let used = col[..v].iter().copied().max().map_or(0, |c| c + 1);
        for c in 0..3u8.min(used + 1) {
            if g.neighbors(v).iter().all(|&w| w > v || col[w] != c) {
                col[v] = c;
                if go(g, v + 1, col) {
                    return true;
                }
            }
        }
        false
    }
    let mut col = vec![0u8; g.n()];
    go(g, 0, &mut col).then_some(col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clause_sizes() {
        let phi = NaeFormula::from_dimacs(3, &[[1, 2, 3]]).unwrap();
        let h = nae_to_3ctcg(&phi);
        assert_eq!(h.graph.n(), 12);
        assert_eq!(h.triangles.len(), 4);
        assert_eq!(h.graph.edge_count(), 19);
        assert!(three_coloring(&h.graph).is_some());
    }

    #[test]
    fn complement_of_two_triangles() {
        let g = SocialNetwork::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let h = TriangleCoveredGraph::new(g, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
        let (c, b) = ctcg_to_sdg(&h, &ScoringVector::closed(&[1])).unwrap();
        assert_eq!(b, 6);
        assert_eq!(c.edge_count(), 9);
        assert!(ctcg_to_sdg(&h, &ScoringVector::closed(&[1, 0])).is_err());
    }

    #[test]
    fn one_variable_no_clause() {
        let h = nae_to_3ctcg(&NaeFormula::from_dimacs(1, &[]).unwrap());
        assert_eq!((h.graph.n(), h.triangles.len()), (3, 1));
    }
}
