//! JSON/human reports for `solve` and `check`.
//!
//! Agents and coalitions are 1-based in reports.  Values that may be `-∞`
//! serialise as a JSON integer or the string `"-inf"`.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use sdg::bounds::{BoundViolation, Certificate};
use sdg::stability::{Deviation, DeviationKind};
use sdg::{ExtendedValue, Mode, Outcome, ScoringVector, SocialNetwork};

/// An integer or `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Value(pub ExtendedValue);

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ExtendedValue::Finite(v) => ser.serialize_i64(v),
            ExtendedValue::NegInf => ser.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(v) => Ok(Value(ExtendedValue::Finite(v))),
            Raw::Text(t) if t == "-inf" => Ok(Value(ExtendedValue::NegInf)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected an integer or \"-inf\", found {t:?}"))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// What the run concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// An optimal admissible outcome was found.
    Solved,
    /// No admissible outcome exists (only possible for Nash stability).
    Infeasible,
    /// A given outcome was certified.
    Checked,
}

/// The instance the report refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceInfo {
    /// Path of the graph file, if any.
    pub source: Option<String>,
    /// Number of agents.
    pub agents: usize,
    /// Number of friendship edges.
    pub edges: usize,
    /// Scoring vector entries `s(1), …, s(δ)`.
    pub scores: Vec<i64>,
    /// `"closed"` or `"open"`.
    pub tail: String,
}

impl InstanceInfo {
    /// Describes an instance.
    pub fn new(source: Option<String>, g: &SocialNetwork, s: &ScoringVector) -> Self {
        InstanceInfo {
            source,
            agents: g.n(),
            edges: g.edge_count(),
            scores: s.scores().to_vec(),
            tail: if s.is_closed() { "closed" } else { "open" }.to_string(),
        }
    }
}

/// A profitable move, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationInfo {
    /// The deviating agent.
    pub agent: usize,
    /// Target coalition (1-based canonical index); `null` for a fresh singleton.
    pub target: Option<usize>,
    /// Utility before the move.
    pub before: Value,
    /// Utility after the move.
    pub after: Value,
}

impl From<&Deviation> for DeviationInfo {
    fn from(d: &Deviation) -> Self {
        DeviationInfo {
            agent: d.agent + 1,
            target: match d.kind {
                DeviationKind::ToSingleton => None,
                DeviationKind::ToCoalition => d.target.map(|t| t + 1),
            },
            before: Value(d.before),
            after: Value(d.after),
        }
    }
}

/// One violated requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ViolationInfo {
    /// The requested mode (IR or NS) fails, with a witness move.
    Mode {
        /// The witness.
        deviation: DeviationInfo,
    },
    /// Coalition larger than the degree-based bound.
    DegreeSize {
        /// 1-based coalition index.
        coalition: usize,
        /// Coalition size.
        size: usize,
        /// The bound.
        bound: usize,
    },
    /// Coalition larger than the treewidth-based bound.
    TreewidthSize {
        /// 1-based coalition index.
        coalition: usize,
        /// Coalition size.
        size: usize,
        /// The bound.
        bound: usize,
    },
    /// Coalition disconnected or wider than `δ` under a closed vector.
    WelfareDiameter {
        /// 1-based coalition index.
        coalition: usize,
        /// Its diameter (`-inf` when disconnected).
        diameter: Value,
    },
    /// Coalition wider than the stable diameter limit under an open vector.
    StableDiameter {
        /// 1-based coalition index.
        coalition: usize,
        /// Its diameter (`-inf` when disconnected).
        diameter: Value,
        /// The limit.
        limit: usize,
    },
}

impl From<&BoundViolation> for ViolationInfo {
    fn from(v: &BoundViolation) -> Self {
        match v {
            BoundViolation::Mode(d) => ViolationInfo::Mode { deviation: d.into() },
            &BoundViolation::DegreeSize { coalition, size, bound } => {
                ViolationInfo::DegreeSize { coalition: coalition + 1, size, bound }
            }
            &BoundViolation::TreewidthSize { coalition, size, bound } => {
                ViolationInfo::TreewidthSize { coalition: coalition + 1, size, bound }
            }
            &BoundViolation::WelfareDiameter { coalition, diameter } => {
                ViolationInfo::WelfareDiameter { coalition: coalition + 1, diameter: Value(diameter) }
            }
            &BoundViolation::StableDiameter { coalition, diameter, limit } => {
                ViolationInfo::StableDiameter { coalition: coalition + 1, diameter: Value(diameter), limit }
            }
        }
    }
}

/// Bounds in force for the instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsInfo {
    /// Degree-based coalition-size bound, if its premise holds.
    pub max_coalition_size_degree: Option<usize>,
    /// Treewidth-based coalition-size bound, if its premise holds.
    pub max_coalition_size_treewidth: Option<usize>,
    /// Diameter limit for IR/NS outcomes under an open vector, if applicable.
    pub stable_diameter_limit: Option<usize>,
    /// `δ`.
    pub welfare_diameter_limit: usize,
}

/// Stability certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateInfo {
    /// Individually rational?
    pub individually_rational: bool,
    /// Nash stable?
    pub nash_stable: bool,
    /// A profitable deviation witnessing instability, if any.
    pub ns_witness: Option<DeviationInfo>,
    /// Diameter of every coalition, in report order.
    pub diameters: Vec<Value>,
    /// Bounds in force.
    pub bounds: BoundsInfo,
    /// Violated requirements (empty when the outcome is clean for its mode).
    pub violations: Vec<ViolationInfo>,
}

impl CertificateInfo {
    /// Converts a library certificate; `ns_witness` is supplied separately.
    pub fn new(c: &Certificate, ns_witness: Option<&Deviation>) -> Self {
        CertificateInfo {
            individually_rational: c.individually_rational,
            nash_stable: c.nash_stable,
            ns_witness: ns_witness.map(Into::into),
            diameters: c.diameters.iter().copied().map(Value).collect(),
            bounds: BoundsInfo {
                max_coalition_size_degree: c.bounds.max_coalition_size_degree,
                max_coalition_size_treewidth: c.bounds.max_coalition_size_treewidth,
                stable_diameter_limit: c.bounds.stable_diameter_limit,
                welfare_diameter_limit: c.bounds.welfare_diameter_limit,
            },
            violations: c.violations.iter().map(Into::into).collect(),
        }
    }
}

/// Wall-clock timings in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Timings {
    /// Time spent in the solver (or the certifier for `check`).
    pub solve_us: u64,
    /// Total time including parsing and certification.
    pub total_us: u64,
}

/// Result of `solve` or `check`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    /// The instance.
    pub instance: InstanceInfo,
    /// `"welfare"`, `"ir"` or `"ns"`.
    pub mode: String,
    /// Algorithm that produced the outcome (`"input"` for `check`).
    pub algorithm: String,
    /// What the run concluded.
    pub status: Status,
    /// Whether the welfare is optimal for the mode (`null` for `check`).
    pub optimal: Option<bool>,
    /// Social welfare of the outcome (`null` when infeasible).
    pub welfare: Option<Value>,
    /// Coalitions of 1-based agents, in canonical order.
    pub coalitions: Vec<Vec<usize>>,
    /// Utility of agent `i` at position `i−1`.
    pub utilities: Vec<Value>,
    /// Certificate of the outcome (`null` when infeasible).
    pub certificate: Option<CertificateInfo>,
    /// Timings.
    pub timings: Timings,
}

/// Parses a mode name.
pub fn parse_mode(name: &str) -> Option<Mode> {
    Mode::ALL.into_iter().find(|m| m.name() == name)
}

/// 1-based coalitions of an outcome.
pub fn coalitions_1based(p: &Outcome) -> Vec<Vec<usize>> {
    p.coalitions().iter().map(|c| c.iter().map(|a| a + 1).collect()).collect()
}

impl Report {
    /// Serialises as pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    /// Process exit code for the report: no stable outcome is exit 2.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Infeasible => crate::exit::NO_STABLE_OUTCOME,
            Status::Solved | Status::Checked => crate::exit::OK,
        }
    }

    /// Parses a JSON report.
    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    /// Human-readable rendering.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let i = &self.instance;
        let _ = writeln!(
            out,
            "instance   {} ({} agents, {} edges), scores {:?} {}",
            i.source.as_deref().unwrap_or("<memory>"),
            i.agents,
            i.edges,
            i.scores,
            i.tail
        );
        let _ = writeln!(out, "mode       {}", self.mode);
        let _ = writeln!(out, "algorithm  {}", self.algorithm);
        let status = match self.status {
            Status::Solved => "solved",
            Status::Infeasible => "infeasible: no Nash stable outcome exists",
            Status::Checked => "checked",
        };
        let _ = writeln!(out, "status     {status}");
        if let Some(o) = self.optimal {
            let _ = writeln!(out, "optimal    {o}");
        }
        if let Some(w) = self.welfare {
            let _ = writeln!(out, "welfare    {w}");
        }
        for (k, c) in self.coalitions.iter().enumerate() {
            let members: Vec<String> = c.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "coalition {:>3}: {}", k + 1, members.join(" "));
        }
        if !self.utilities.is_empty() {
            let u: Vec<String> = self.utilities.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "utilities  {}", u.join(" "));
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(out, "IR         {}", c.individually_rational);
            let _ = writeln!(out, "NS         {}", c.nash_stable);
            if let Some(d) = &c.ns_witness {
                let to = d.target.map_or("a new singleton".to_string(), |t| format!("coalition {t}"));
                let _ = writeln!(out, "witness    agent {} gains by moving to {to} ({} -> {})", d.agent, d.before, d.after);
            }
            let diam: Vec<String> = c.diameters.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "diameters  {}", diam.join(" "));
            let b = &c.bounds;
            let show = |v: Option<usize>| v.map_or("n/a".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "bounds     size(degree) {}, size(treewidth) {}, stable diameter {}, welfare diameter {}",
                show(b.max_coalition_size_degree),
                show(b.max_coalition_size_treewidth),
                show(b.stable_diameter_limit),
                b.welfare_diameter_limit
            );
            if c.violations.is_empty() {
                let _ = writeln!(out, "violations none");
            }
            for v in &c.violations {
                let _ = writeln!(out, "violation  {}", serde_json::to_string(v).expect("serialisable"));
            }
        }
        let _ = writeln!(out, "time       {} us solve, {} us total", self.timings.solve_us, self.timings.total_us);
        out
    }
}
