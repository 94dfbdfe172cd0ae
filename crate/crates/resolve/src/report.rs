//! Deterministic JSON reports and certificate serialization.
//!
//! Reports carry no timings and no paths, so a plan and its data fully
//! determine the bytes written.

use resolve_core::certify::{CoverPiece, PieceVerdict, SmoothnessCertificate, SmoothnessReport};
use resolve_core::cover::CoverProof;
use resolve_core::ideal::{Budget, UnitCertificate};
use resolve_core::poly::{Polynomial, VarRegistry};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(it: impl IntoIterator<Item = Status>) -> Status {
        it.into_iter().max().unwrap_or(Status::Pass)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub detail: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), status: Status::of(ok), detail: Vec::new(), certificates: Vec::new() }
    }

    pub fn inconclusive(name: impl Into<String>, why: String) -> Self {
        Check { name: name.into(), status: Status::Inconclusive, detail: vec![why], certificates: Vec::new() }
    }

    pub fn detail(mut self, d: impl IntoIterator<Item = String>) -> Self {
        self.detail.extend(d);
        self
    }

    pub fn certificates(mut self, c: impl IntoIterator<Item = Value>) -> Self {
        self.certificates.extend(c);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalReport {
    pub goal: String,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Observations that do not affect the status (e.g. printed values that
    /// differ from recomputed ones).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl GoalReport {
    pub fn new(goal: String, checks: Vec<Check>, notes: Vec<String>) -> Self {
        let status = Status::combine(checks.iter().map(|c| c.status));
        GoalReport { goal, status, checks, notes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetEntry {
    pub max_spairs: u64,
    pub max_degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub status: Status,
    pub budget: BudgetEntry,
    pub goals: Vec<GoalReport>,
}

impl Report {
    pub fn new(goals: Vec<GoalReport>, budget: &Budget) -> Self {
        let status = Status::combine(goals.iter().map(|g| g.status));
        Report {
            schema_version: crate::data::SCHEMA_VERSION,
            status,
            budget: BudgetEntry { max_spairs: budget.max_spairs, max_degree: budget.max_degree },
            goals,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn strings(ps: &[Polynomial]) -> Vec<String> {
    ps.iter().map(ToString::to_string).collect()
}

fn names(reg: &VarRegistry, cols: &[usize]) -> Vec<String> {
    cols.iter().map(|&i| reg.name(i).to_string()).collect()
}

/// `Σ combiners·generators = 1`; generators are the relations of the
/// surrounding certificate, then its targets, then `u·f − 1` per inverse.
pub fn unit_json(c: &UnitCertificate) -> Value {
    let inverted: Vec<Value> = c.inverted().iter().map(|(u, f)| json!({ "var": u, "of": f.to_string() })).collect();
    json!({
        "inverted": inverted,
        "targets": strings(c.targets()),
        "combiners": strings(c.combiners()),
    })
}

pub fn piece_json(p: &CoverPiece) -> Value {
    json!({ "inverted": strings(&p.inverted) })
}

pub fn smoothness_json(c: &SmoothnessCertificate) -> Value {
    let reg = c.witness.registry();
    let minors: Vec<Value> = c
        .minors
        .iter()
        .map(|m| json!({ "cols": names(reg, &m.cols), "minor": m.value.to_string() }))
        .collect();
    json!({
        "chart": c.piece.chart,
        "piece": piece_json(&c.piece),
        "rows": strings(&c.rows),
        "side": strings(&c.side),
        "minors": minors,
        "witness": unit_json(&c.witness),
    })
}

/// Every piece of a smoothness report: a Jacobian certificate, an emptiness
/// certificate, or (on failure) the obstructing basis.
pub fn smoothness_report_json(r: &SmoothnessReport) -> Vec<Value> {
    r.pieces
        .iter()
        .map(|p| match &p.verdict {
            PieceVerdict::Certified(c) => smoothness_json(c),
            PieceVerdict::Empty(w) => json!({ "chart": r.chart, "piece": piece_json(&p.piece), "empty": unit_json(w) }),
            PieceVerdict::Failed { basis } => json!({ "chart": r.chart, "piece": piece_json(&p.piece), "obstruction": strings(basis) }),
        })
        .collect()
}

pub fn cover_proof_json(p: &CoverProof) -> Value {
    match p {
        CoverProof::Leaf(c) => json!({ "leaf": unit_json(c) }),
        CoverProof::Split { exclusion, branches } => json!({
            "split": { "exclusion": exclusion, "branches": branches.iter().map(cover_proof_json).collect::<Vec<_>>() }
        }),
    }
}
