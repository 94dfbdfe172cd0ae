//! Verification goals and the plan runner.

use std::time::{Duration, Instant};

use resolve_core::certify::{nc_intersection, semistable, smooth_center, solved_variables, PieceVerdict, SmoothnessReport};
use resolve_core::chart::{covering_check, pullback_check, validate, CoveringOutcome};
use resolve_core::ideal::Budget;
use resolve_core::pluecker::pluecker_relations;
use resolve_core::poly::parse;
use resolve_core::schubert::hasse;
use serde_json::json;

use crate::data::Dataset;
use crate::pluecker::{check_identity, factorization, m_table, nonvanishing, root_minors, step_entry, Nonvanishing};
use crate::replay::{base_chart, replay_step};
use crate::report::{cover_proof_json, piece_json, smoothness_report_json, unit_json, Check, GoalReport, Report};
use crate::Error;

/// Covering relations of the g = 3 Bruhat poset, as `smaller-larger` in the
/// Schubert-index sense.
pub const HASSE_G3_EDGES: [&str; 8] = ["456-356", "356-246", "246-145", "246-236", "145-135", "236-135", "135-124", "124-123"];
pub const HASSE_G3_DIMS: [usize; 8] = [0, 1, 2, 3, 3, 4, 5, 6];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Schubert,
    /// Validation and pull-back of one shipped chart.
    Chart(String),
    /// Replay, center smoothness and normal crossings of one construction step.
    Step(u32),
    /// Identities and minor factorizations, optionally only those on the
    /// chart produced by one step.
    Identities(Option<u32>),
    Nonvanishing(usize),
    Cover,
    Semistable(String),
}

impl Goal {
    pub fn id(&self) -> String {
        match self {
            Goal::Schubert => "schubert".into(),
            Goal::Chart(c) => format!("chart:{c}"),
            Goal::Step(k) => format!("step:{k}"),
            Goal::Identities(None) => "identities".into(),
            Goal::Identities(Some(k)) => format!("identities:{k}"),
            Goal::Nonvanishing(k) => format!("nonvanishing:{k}"),
            Goal::Cover => "cover".into(),
            Goal::Semistable(c) => format!("semistable:{c}"),
        }
    }

    /// Parses a goal id (`step:3`, also `step-3`, `step3`) and checks it
    /// refers to shipped data.
    pub fn parse(s: &str, ds: &Dataset) -> Result<Goal, Error> {
        let unknown = || Error::UnknownGoal(s.to_string());
        let lower = s.trim();
        let (head, arg) = match lower.find([':', '-', '=']) {
            Some(i) => (&lower[..i], Some(&lower[i + 1..])),
            None => {
                let i = lower.find(|c: char| c.is_ascii_digit()).unwrap_or(lower.len());
                if i < lower.len() && lower[..i].chars().all(|c| c.is_ascii_alphabetic()) && !lower[..i].is_empty() {
                    (&lower[..i], Some(&lower[i..]))
                } else {
                    (lower, None)
                }
            }
        };
        let num = |a: Option<&str>| a.and_then(|x| x.parse::<u32>().ok());
        let goal = match (head, arg) {
            ("schubert", None) => Goal::Schubert,
            ("cover", None) => Goal::Cover,
            ("identities", None) => Goal::Identities(None),
            ("identities", a) => Goal::Identities(Some(num(a).ok_or_else(unknown)?)),
            ("step", a) => Goal::Step(num(a).ok_or_else(unknown)?),
            ("nonvanishing" | "k", a) => Goal::Nonvanishing(num(a).ok_or_else(unknown)? as usize),
            ("chart", Some(c)) => Goal::Chart(c.to_string()),
            ("semistable", Some(c)) => Goal::Semistable(c.to_string()),
            _ => return Err(unknown()),
        };
        goal.check(ds).map_err(|_| unknown())?;
        Ok(goal)
    }

    /// The goal refers to existing shipped data.
    pub fn check(&self, ds: &Dataset) -> Result<(), Error> {
        let bad = || Error::UnknownGoal(self.id());
        match self {
            Goal::Schubert | Goal::Cover | Goal::Identities(None) => Ok(()),
            Goal::Chart(c) | Goal::Semistable(c) => ds.chart(c).map(|_| ()).ok_or_else(bad),
            Goal::Step(k) => ds.step(*k).map(|_| ()).ok_or_else(bad),
            Goal::Identities(Some(k)) => {
                let chart = &ds.step(*k).ok_or_else(bad)?.result;
                let any = ds.pluecker.identities.iter().any(|e| &e.chart == chart) || ds.pluecker.steps.iter().any(|e| &e.chart == chart);
                if any {
                    Ok(())
                } else {
                    Err(bad())
                }
            }
            Goal::Nonvanishing(k) => step_entry(ds, *k).map(|_| ()).ok_or_else(bad),
        }
    }
}

/// Every goal over the shipped data, in report order.
pub fn all_goals(ds: &Dataset) -> Vec<Goal> {
    let mut out = vec![Goal::Schubert];
    out.extend(ds.tower.charts().iter().map(|c| Goal::Chart(c.name.clone())));
    out.extend(ds.steps.iter().map(|s| Goal::Step(s.step)));
    out.push(Goal::Identities(None));
    out.extend(ds.pluecker.steps.iter().map(|s| Goal::Nonvanishing(s.k)));
    out.push(Goal::Cover);
    out.extend(ds.tower.charts().iter().filter(|c| c.parent.is_some()).map(|c| Goal::Semistable(c.name.clone())));
    out
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub goals: Vec<Goal>,
    pub budget: Budget,
}

/// Turns a budget exhaustion into an inconclusive check; other errors abort.
fn attempt(name: &str, f: impl FnOnce() -> Result<Check, Error>) -> Result<Check, Error> {
    match f() {
        Err(e) if e.is_inconclusive() => Ok(Check::inconclusive(name, e.to_string())),
        r => r,
    }
}

fn smoothness_check(name: &str, r: &SmoothnessReport, certificates: bool) -> Check {
    let verified = r.certificates().all(|c| c.verify());
    let mut detail = vec![format!("{} pieces, {} Jacobian rows in {} variables", r.pieces.len(), r.codimension, r.ambient)];
    for p in &r.pieces {
        detail.push(match &p.verdict {
            PieceVerdict::Empty(_) => format!("{}: empty", p.piece.label()),
            PieceVerdict::Certified(c) => {
                let cols: Vec<String> = c.minors.iter().map(|m| minor_cols(c.witness.registry(), &m.cols)).collect();
                format!("{}: minor {}", p.piece.label(), cols.join(" | "))
            }
            PieceVerdict::Failed { basis } => format!("{}: no unit minor; basis has {} elements", p.piece.label(), basis.len()),
        });
    }
    if !verified {
        detail.push("certificate re-verification failed".into());
    }
    let mut c = Check::new(name, r.passed() && verified).detail(detail);
    if certificates {
        c = c.certificates(smoothness_report_json(r));
    }
    c
}

fn minor_cols(reg: &resolve_core::poly::VarRegistry, cols: &[usize]) -> String {
    let n: Vec<&str> = cols.iter().map(|&i| reg.name(i)).collect();
    format!("({})", n.join(","))
}

fn schubert_goal() -> Result<GoalReport, Error> {
    let h2 = hasse(2)?;
    let chain = h2.nodes.len() == 4
        && h2.covers.len() == 3
        && h2.nodes.iter().map(|n| n.dimension()).eq(0..4)
        && h2.covers.iter().all(|&(a, b)| b == a + 1);
    let c2 = Check::new("g=2 chain", chain).detail(h2.edge_names());
    let h3 = hasse(3)?;
    let mut edges = h3.edge_names();
    let mut expected: Vec<String> = HASSE_G3_EDGES.iter().map(|s| s.to_string()).collect();
    edges.sort();
    expected.sort();
    let dims: Vec<usize> = h3.nodes.iter().map(|n| n.dimension()).collect();
    let c3 = Check::new("g=3 diagram", edges == expected && dims == HASSE_G3_DIMS)
        .detail(h3.edge_names())
        .detail([format!("dimensions {dims:?}")]);
    Ok(GoalReport::new(Goal::Schubert.id(), vec![c2, c3], Vec::new()))
}

fn chart_goal(ds: &Dataset, name: &str, b: &Budget) -> Result<GoalReport, Error> {
    let c = ds.tower.get(name)?;
    let v = validate(c);
    let mut checks = vec![Check::new("validate", v.is_valid())
        .detail([format!("ambient dimension {}", v.ambient)])
        .detail(v.violations.iter().map(|x| x.to_string()))];
    if c.parent.is_some() {
        checks.push(attempt("pullback", || {
            let r = pullback_check(&ds.tower, name, b)?;
            let mut detail = vec![format!("parent {}", r.parent)];
            for (i, res) in r.residuals.iter().enumerate() {
                if let Some(res) = res {
                    detail.push(format!("equation {i}: residual {res}"));
                }
            }
            let mut certs = Vec::new();
            for e in &r.exclusions {
                match (&e.proof, &e.obstruction) {
                    (Some(p), _) => certs.push(json!({ "exclusion": e.index, "proof": cover_proof_json(p) })),
                    (None, Some(o)) => detail.push(format!(
                        "exclusion {}: not covered where {:?} are inverted",
                        e.index,
                        o.inverted.iter().map(|f| f.to_string()).collect::<Vec<_>>()
                    )),
                    (None, None) => detail.push(format!("exclusion {}: not covered", e.index)),
                }
            }
            Ok(Check::new("pullback", r.passed()).detail(detail).certificates(certs))
        })?);
    }
    Ok(GoalReport::new(Goal::Chart(name.into()).id(), checks, Vec::new()))
}

fn step_goal(ds: &Dataset, k: u32, b: &Budget) -> Result<GoalReport, Error> {
    let step = ds.step(k).ok_or_else(|| Error::UnknownGoal(format!("step:{k}")))?;
    let mut checks = Vec::new();
    checks.push(attempt("replay", || {
        let cmp = replay_step(ds, step, b)?;
        let mut detail = Vec::new();
        for (i, c) in cmp.iter().enumerate() {
            let order: Vec<String> = step.orders[i].iter().map(|x| x.result.clone()).collect();
            let renamed: Vec<String> = c.renaming.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("{a}->{b}")).collect();
            detail.push(format!(
                "order {} ({}): isomorphic={}, equations {:?}, exclusions syntactic={} semantic={}, renaming [{}]",
                i + 1,
                order.join(" then "),
                c.isomorphic(),
                c.equations,
                c.exclusions_syntactic,
                c.exclusions_semantic,
                renamed.join(", ")
            ));
        }
        Ok(Check::new("replay", cmp.iter().all(|c| c.isomorphic())).detail(detail))
    })?);
    let base = base_chart(ds, step)?;
    for (i, center) in step.centers.iter().enumerate() {
        let gens = center.spec(&base)?.generators;
        let label = if step.centers.len() > 1 { format!(" {}", i + 1) } else { String::new() };
        let name = format!("smooth center{label}");
        checks.push(attempt(&name, || Ok(smoothness_check(&name, &smooth_center(&base, &gens, b)?, true)))?);
        let name = format!("normal crossings{label}");
        checks.push(attempt(&name, || {
            let r = nc_intersection(&base, &gens, b)?;
            let mut ok = r.passed();
            let mut detail = Vec::new();
            for x in &r.intersections {
                let names: Vec<&str> = x.branches.iter().map(|&v| base.reg.name(v)).collect();
                let verified = x.report.certificates().all(|c| c.verify());
                ok &= verified;
                let state = if x.empty {
                    "empty".to_string()
                } else if x.report.passed() {
                    format!("smooth of codimension {} ({} certified pieces)", names.len(), x.report.certificates().count())
                } else {
                    format!("{} pieces without a unit minor", x.report.failures().count())
                };
                detail.push(format!("{{{}}}: {state}", names.join(",")));
            }
            Ok(Check::new(&name, ok).detail(detail))
        })?);
    }
    Ok(GoalReport::new(Goal::Step(k).id(), checks, Vec::new()))
}

fn identities_goal(ds: &Dataset, step: Option<u32>, b: &Budget) -> Result<GoalReport, Error> {
    let chart = match step {
        Some(k) => Some(ds.step(k).ok_or_else(|| Error::UnknownGoal(format!("identities:{k}")))?.result.clone()),
        None => None,
    };
    let wanted = |c: &str| chart.as_deref().is_none_or(|x| x == c);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for e in ds.pluecker.identities.iter().filter(|e| wanted(&e.chart)) {
        let name = format!("identity {}", e.name);
        checks.push(attempt(&name, || {
            let r = check_identity(ds, e, b)?;
            let mut detail = vec![format!("on {}: {} = {}", r.chart, e.lhs, e.rhs)];
            if let Some(res) = &r.residual {
                detail.push(format!("residual {res}"));
            }
            Ok(Check::new(&name, r.residual.is_none()).detail(detail))
        })?);
    }
    for e in ds.pluecker.steps.iter().filter(|e| wanted(&e.chart)) {
        let name = format!("factorization k={}", e.k);
        checks.push(attempt(&name, || {
            let r = factorization(ds, e, b)?;
            let mut detail = vec![format!("{} minors on {} with unit factor {}", r.entries.len(), r.chart, e.unit_factor)];
            for x in &r.entries {
                if let Some(res) = &x.residual {
                    detail.push(format!("{:?}: residual {res}", x.index));
                }
            }
            for u in &r.unmatched {
                detail.push(format!("{u:?}: no matching table entry"));
            }
            Ok(Check::new(&name, r.passed()).detail(detail))
        })?);
        let table = root_minors(ds, e)?;
        let (n, failed) = pluecker_relations(&table, &ds.tower.charts()[0].reg);
        checks.push(
            Check::new(format!("pluecker relations k={}", e.k), failed.is_empty())
                .detail([format!("{n} three-term relations")])
                .detail(failed.iter().map(|f| format!("fails at {f:?}"))),
        );
        for row in m_table(ds, e)? {
            if let Some(p) = row.printed.as_ref().filter(|_| !row.agrees()) {
                notes.push(format!("k={}: printed m{:?} = {p}, recomputed {}", e.k, row.index, row.computed));
            }
        }
    }
    Ok(GoalReport::new(Goal::Identities(step).id(), checks, notes))
}

fn nonvanishing_goal(ds: &Dataset, k: usize, b: &Budget) -> Result<GoalReport, Error> {
    let e = step_entry(ds, k).ok_or_else(|| Error::UnknownGoal(format!("nonvanishing:{k}")))?;
    let mut checks = Vec::new();
    let mut outcome = None;
    checks.push(attempt("certificates", || {
        let n = nonvanishing(ds, e, b)?;
        let c = nonvanishing_check(&n);
        outcome = Some(n);
        Ok(c)
    })?);
    if let Some(n) = outcome {
        checks.push(Check::new("re-verification", n.verify()).detail(["certificates re-expanded without Gröbner bases".to_string()]));
    }
    Ok(GoalReport::new(Goal::Nonvanishing(k).id(), checks, Vec::new()))
}

fn nonvanishing_check(n: &Nonvanishing) -> Check {
    match n {
        Nonvanishing::Direct(r) => {
            let mut detail = vec![format!("{} targets on {}, {} pieces", r.targets.len(), r.chart, r.pieces.len())];
            let mut certs = Vec::new();
            for p in &r.pieces {
                match &p.certificate {
                    Some(c) => {
                        detail.push(format!("{}: unit certificate of size {}", p.piece.label(), c.size()));
                        certs.push(json!({ "piece": piece_json(&p.piece), "certificate": unit_json(c) }));
                    }
                    None => detail.push(format!("{}: common zero; basis has {} elements", p.piece.label(), p.obstruction.len())),
                }
            }
            Check::new("certificates", n.passed()).detail(detail).certificates(certs)
        }
        Nonvanishing::Replay(r) => {
            let mut detail = vec![format!("{} targets on {}, {} pieces, deduction:", r.targets.len(), r.chart, r.pieces.len())];
            detail.extend(r.script.iter().enumerate().map(|(i, d)| format!("  {}. {}", i + 1, d.describe())));
            let mut certs = Vec::new();
            for p in &r.pieces {
                let used: Vec<String> = p.steps.iter().map(|(i, _)| (i + 1).to_string()).collect();
                detail.push(match (&p.contradiction, p.stuck) {
                    (Some(_), _) => format!("{}: empty after steps [{}]", p.piece.label(), used.join(",")),
                    (None, Some(s)) => format!("{}: stuck at step {}", p.piece.label(), s + 1),
                    (None, None) => format!("{}: no contradiction", p.piece.label()),
                });
                let steps: Vec<_> = p
                    .steps
                    .iter()
                    .map(|(i, c)| json!({ "deduction": r.script[*i].describe(), "certificate": unit_json(c) }))
                    .collect();
                certs.push(json!({
                    "piece": piece_json(&p.piece),
                    "steps": steps,
                    "contradiction": p.contradiction.as_ref().map(unit_json),
                }));
            }
            Check::new("certificates", n.passed()).detail(detail).certificates(certs)
        }
    }
}

fn cover_goal(ds: &Dataset, b: &Budget) -> Result<GoalReport, Error> {
    let c = ds.tower.get(&ds.covering.chart)?;
    let open = parse(&ds.covering.open, &c.reg)?;
    let names: Vec<&str> = ds.elements.iter().map(|(n, _)| n.as_str()).collect();
    let all: Vec<_> = ds.elements.iter().map(|(_, e)| e.clone()).collect();
    let mut checks = Vec::new();
    let name = format!("covered by {} ≠ 0 and its translates under {}", open, names.join(","));
    checks.push(attempt(&name, || {
        Ok(match covering_check(&ds.tower, &c.name, &open, &all, b)? {
            CoveringOutcome::Covered { targets, proof } => {
                let ok = c.cover_problem(targets.clone()).verify(&proof);
                Check::new(&name, ok)
                    .detail(targets.iter().map(|t| format!("target {t}")))
                    .detail([format!("case split of depth {} with {} unit certificates", proof.depth(), proof.leaves().len())])
                    .certificates([cover_proof_json(&proof)])
            }
            CoveringOutcome::Refuted { point, .. } => Check::new(&name, false).detail([format!("uncovered point {}", point_text(&point))]),
            CoveringOutcome::Inconclusive { .. } => Check::inconclusive(&name, "no certificate and no small rational point".into()),
        })
    })?);
    if let Some(((last, _), rest)) = ds.elements.split_last() {
        let rest: Vec<_> = rest.iter().map(|(_, e)| e.clone()).collect();
        let name = format!("without {last}: refuted by a rational point");
        checks.push(attempt(&name, || {
            Ok(match covering_check(&ds.tower, &c.name, &open, &rest, b)? {
                CoveringOutcome::Refuted { targets, point } => {
                    let values: Vec<_> = point.iter().map(|(_, v)| v.clone()).collect();
                    let ok = c.cover_problem(targets).is_witness_point(&values);
                    Check::new(&name, ok).detail([format!("uncovered point {}", point_text(&point))])
                }
                CoveringOutcome::Covered { .. } => Check::new(&name, false).detail(["unexpectedly covered".to_string()]),
                CoveringOutcome::Inconclusive { .. } => Check::inconclusive(&name, "no small rational point".into()),
            })
        })?);
    }
    Ok(GoalReport::new(Goal::Cover.id(), checks, Vec::new()))
}

/// Nonzero coordinates only.
pub fn point_text(point: &[(String, resolve_core::poly::Coeff)]) -> String {
    let zero = resolve_core::poly::q(0);
    let nz: Vec<String> = point.iter().filter(|(_, v)| *v != zero).map(|(n, v)| format!("{n}={v}")).collect();
    if nz.is_empty() {
        "origin".into()
    } else {
        nz.join(", ")
    }
}

fn semistable_goal(ds: &Dataset, name: &str, b: &Budget) -> Result<GoalReport, Error> {
    let c = ds.tower.get(name)?;
    let check = attempt("semistable", || {
        let r = semistable(c, b)?;
        let mut check = smoothness_check("semistable", &r, true);
        // solved variables replace the minor column lists
        check.detail.truncate(1);
        for p in &r.pieces {
            check.detail.push(match &p.verdict {
                PieceVerdict::Empty(_) => format!("{}: empty", p.piece.label()),
                PieceVerdict::Certified(cert) => {
                    let s: Vec<String> = solved_variables(c, cert).iter().map(|v| v.join(",")).collect();
                    format!("{}: solved for {}", p.piece.label(), if s.iter().all(String::is_empty) { "nothing".into() } else { s.join(" | ") })
                }
                PieceVerdict::Failed { .. } => format!("{}: no unit minor outside the monomial variables", p.piece.label()),
            });
        }
        Ok(check)
    })?;
    Ok(GoalReport::new(Goal::Semistable(name.into()).id(), vec![check], Vec::new()))
}

pub fn run_goal(ds: &Dataset, goal: &Goal, b: &Budget) -> Result<GoalReport, Error> {
    match goal {
        Goal::Schubert => schubert_goal(),
        Goal::Chart(c) => chart_goal(ds, c, b),
        Goal::Step(k) => step_goal(ds, *k, b),
        Goal::Identities(k) => identities_goal(ds, *k, b),
        Goal::Nonvanishing(k) => nonvanishing_goal(ds, *k, b),
        Goal::Cover => cover_goal(ds, b),
        Goal::Semistable(c) => semistable_goal(ds, c, b),
    }
}

/// Runs the plan's goals on `jobs` threads; results are in plan order
/// regardless of scheduling. Wall times are returned beside the report.
pub fn run(ds: &Dataset, plan: &Plan, jobs: usize) -> Result<(Report, Vec<Duration>), Error> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| Error::Pool(e.to_string()))?;
    let results: Vec<Result<(GoalReport, Duration), Error>> = pool.install(|| {
        plan.goals
            .par_iter()
            .map(|g| {
                let t = Instant::now();
                let r = run_goal(ds, g, &plan.budget)?;
                Ok((r, t.elapsed()))
            })
            .collect()
    });
    let mut goals = Vec::new();
    let mut times = Vec::new();
    for r in results {
        let (g, t) = r?;
        goals.push(g);
        times.push(t);
    }
    Ok((Report::new(goals, &plan.budget), times))
}
