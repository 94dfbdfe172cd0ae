//! Human-readable derivation traces.

use std::fmt::Write;

use resolve_core::certify::{nc_intersection, smooth_center, PieceVerdict};
use resolve_core::chart::ChartPresentation;
use resolve_core::ideal::Budget;
use resolve_core::poly::{parse, PolyMatrix, Polynomial};

use crate::data::{CenterEntry, Dataset};
use crate::goals::{run_goal, Goal};
use crate::pluecker::{nonvanishing, step_entry, Nonvanishing};
use crate::replay::base_chart;
use crate::report::GoalReport;
use crate::Error;

const GREEK: [(&str, &str); 4] = [("l", "λ"), ("m", "μ"), ("n", "ν"), ("P", "P")];
const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

/// Chart coordinate in superscript notation: `a23_4` → `a²₃[4]`,
/// `d13_4` → `δ¹₃[4]`, `l0` → `λ₀`; unknown shapes are kept.
pub fn pretty_name(name: &str) -> String {
    let b = name.as_bytes();
    let digit = |i: usize| b.get(i).filter(|c| c.is_ascii_digit()).map(|c| (c - b'0') as usize);
    if matches!(b.first(), Some(b'a' | b'd')) && b.len() >= 3 {
        if let (Some(i), Some(j)) = (digit(1), digit(2)) {
            let head = if b[0] == b'a' { "a" } else { "δ" };
            let stage = match &name[3..] {
                "" => String::new(),
                s if s.starts_with('_') && s[1..].bytes().all(|c| c.is_ascii_digit()) && s.len() > 1 => format!("[{}]", &s[1..]),
                _ => return name.into(),
            };
            return format!("{head}{}{}{stage}", SUP[i], SUB[j]);
        }
    }
    for (ascii, greek) in GREEK {
        if let Some(rest) = name.strip_prefix(ascii) {
            if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) {
                return format!("{greek}{}", rest.bytes().map(|c| SUB[(c - b'0') as usize]).collect::<String>());
            }
        }
    }
    name.into()
}

/// Rewrites every identifier of a printed polynomial with [`pretty_name`].
pub fn pretty(text: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            word.push(ch);
            continue;
        }
        if !word.is_empty() {
            let starts_alpha = word.starts_with(|c: char| c.is_ascii_alphabetic());
            out.push_str(&if starts_alpha { pretty_name(&word) } else { word.clone() });
            word.clear();
        }
        out.push(ch);
    }
    out.pop();
    out
}

/// How a computed Jacobian entry relates to a printed one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryMatch {
    Equal,
    /// `computed = unit·printed` with `unit` a constant times a monomial in
    /// variables that are units on the chart.
    UpToUnit(Polynomial),
    /// `computed = unit·printed + remainder` for the unit factor leaving the
    /// shortest remainder (`unit = 1` when none applies).
    Differs { unit: Polynomial, remainder: Polynomial },
}

pub fn compare_entry(c: &ChartPresentation, computed: &Polynomial, printed: &Polynomial) -> EntryMatch {
    if computed == printed {
        return EntryMatch::Equal;
    }
    let units = c.unit_variables();
    let mut best = (Polynomial::one(&c.reg), computed - printed);
    if let Some((mp, cp)) = printed.leading_term() {
        for (m, k) in computed.terms() {
            let Some(q) = mp.quotient_of(m) else { continue };
            let u = Polynomial::monomial(&c.reg, q, k / cp);
            if !u.support().iter().all(|v| units.contains(v)) {
                continue;
            }
            let rest = computed - &(&u * printed);
            if rest.is_zero() {
                return EntryMatch::UpToUnit(u);
            }
            if rest.num_terms() < best.1.num_terms() {
                best = (u, rest);
            }
        }
    }
    EntryMatch::Differs { unit: best.0, remainder: best.1 }
}

/// One compared entry of a printed row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowComparison {
    pub generator: usize,
    pub var: String,
    pub computed: Polynomial,
    pub printed: Polynomial,
    pub outcome: EntryMatch,
}

fn jacobian(c: &ChartPresentation, gens: &[Polynomial]) -> (Vec<Polynomial>, PolyMatrix) {
    let mut rows = c.equations.clone();
    rows.extend(gens.iter().cloned());
    let all: Vec<usize> = (0..c.reg.len()).collect();
    let jac = PolyMatrix::jacobian(&rows, &all, &c.reg);
    (rows, jac)
}

/// Computed Jacobian entries beside the printed rows of a center.
pub fn compare_rows(ds: &Dataset, step: u32, center: usize) -> Result<Vec<RowComparison>, Error> {
    let s = ds.step(step).ok_or_else(|| Error::UnknownGoal(format!("step:{step}")))?;
    let base = base_chart(ds, s)?;
    let entry = s.centers.get(center).ok_or_else(|| Error::UnknownGoal(format!("step:{step}")))?;
    rows_of(&base, entry)
}

fn rows_of(base: &ChartPresentation, entry: &CenterEntry) -> Result<Vec<RowComparison>, Error> {
    let gens = entry.spec(base)?.generators;
    let (_, jac) = jacobian(base, &gens);
    let mut out = Vec::new();
    for row in &entry.printed_rows {
        let r = base.equations.len() + row.generator;
        if row.generator >= gens.len() {
            return Err(Error::BadDefinition(format!("printed row {}", row.generator)));
        }
        for (var, text) in &row.entries {
            let col = base.reg.index_of(var).ok_or_else(|| Error::BadDefinition(format!("printed row variable `{var}`")))?;
            let printed = parse(text, &base.reg)?;
            let computed = jac.get(r, col).clone();
            let outcome = compare_entry(base, &computed, &printed);
            out.push(RowComparison { generator: row.generator, var: var.clone(), computed, printed, outcome });
        }
    }
    Ok(out)
}

fn table(c: &ChartPresentation, rows: &[Polynomial], jac: &PolyMatrix, labels: &[String]) -> String {
    // every coordinate gets a column, zero or not, as in the printed matrices
    let cols: Vec<usize> = (0..c.reg.len()).collect();
    let mut cells: Vec<Vec<String>> = vec![std::iter::once(String::new()).chain(cols.iter().map(|&j| format!("∂/∂{}", pretty_name(c.reg.name(j))))).collect()];
    for (r, label) in labels.iter().enumerate().take(rows.len()) {
        let mut line = vec![label.clone()];
        line.extend(cols.iter().map(|&j| pretty(&jac.get(r, j).to_string())));
        cells.push(line);
    }
    let width = |s: &str| s.chars().count();
    let widths: Vec<usize> = (0..cells[0].len()).map(|k| cells.iter().map(|l| width(&l[k])).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for line in &cells {
        let padded: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s}{}", " ".repeat(w - width(s)))).collect();
        let _ = writeln!(out, "  {}", padded.join("  ").trim_end());
    }
    out
}

fn explain_step(ds: &Dataset, k: u32, b: &Budget) -> Result<String, Error> {
    let s = ds.step(k).ok_or_else(|| Error::UnknownGoal(format!("step:{k}")))?;
    let base = base_chart(ds, s)?;
    let mut out = String::new();
    let _ = writeln!(out, "step {k}: {} → {}", s.chart, s.result);
    if let Some(o) = &s.open {
        let _ = writeln!(out, "restricted to {} ≠ 0", pretty(o));
    }
    for (i, entry) in s.centers.iter().enumerate() {
        let gens = entry.spec(&base)?.generators;
        let (rows, jac) = jacobian(&base, &gens);
        let _ = writeln!(out, "\ncenter {}: ⟨{}⟩", i + 1, pretty(&gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")));
        let mut labels = Vec::new();
        let _ = writeln!(out, "rows:");
        for (r, f) in rows.iter().enumerate() {
            let kind = if r < base.equations.len() { "equation" } else { "generator" };
            labels.push(format!("r{}", r + 1));
            let _ = writeln!(out, "  r{} ({kind}): {}", r + 1, pretty(&f.to_string()));
        }
        let _ = writeln!(out, "Jacobian:");
        out.push_str(&table(&base, &rows, &jac, &labels));
        let cmp = rows_of(&base, entry)?;
        if !cmp.is_empty() {
            let _ = writeln!(out, "printed row comparison:");
            for x in &cmp {
                let r = base.equations.len() + x.generator + 1;
                let what = match &x.outcome {
                    EntryMatch::Equal => "equal".to_string(),
                    EntryMatch::UpToUnit(u) => format!("equal up to the unit {}", pretty(&u.to_string())),
                    EntryMatch::Differs { unit, remainder } if unit.is_one() => format!("differs by {}", pretty(&remainder.to_string())),
                    EntryMatch::Differs { unit, remainder } => {
                        format!("differs: computed = {}·printed + {}", pretty(&unit.to_string()), pretty(&remainder.to_string()))
                    }
                };
                let _ = writeln!(
                    out,
                    "  r{r} ∂/∂{}: computed {}, printed {}: {what}",
                    pretty_name(&x.var),
                    pretty(&x.computed.to_string()),
                    pretty(&x.printed.to_string())
                );
            }
        }
        let r = smooth_center(&base, &gens, b)?;
        let _ = writeln!(out, "unit minors per piece ({} pieces):", r.pieces.len());
        for p in &r.pieces {
            let what = match &p.verdict {
                PieceVerdict::Empty(_) => "empty".to_string(),
                PieceVerdict::Certified(c) => c
                    .minors
                    .iter()
                    .map(|m| {
                        let names: Vec<String> = m.cols.iter().map(|&j| pretty_name(base.reg.name(j))).collect();
                        format!("columns ({}) with minor {}", names.join(", "), pretty(&m.value.to_string()))
                    })
                    .collect::<Vec<_>>()
                    .join("; or "),
                PieceVerdict::Failed { .. } => "NO UNIT MINOR".to_string(),
            };
            let _ = writeln!(out, "  {}: {what}", pretty(&p.piece.label()));
        }
        let nc = nc_intersection(&base, &gens, b)?;
        let _ = writeln!(out, "branch intersections (branch columns removed):");
        for x in &nc.intersections {
            let names: Vec<String> = x.branches.iter().map(|&v| pretty_name(base.reg.name(v))).collect();
            let what = if x.empty {
                "empty".to_string()
            } else if x.report.passed() {
                format!("full rank without ∂/∂{}", names.join(", ∂/∂"))
            } else {
                "rank drops".to_string()
            };
            let _ = writeln!(out, "  {{{}}} = 0: {what}", names.join(", "));
        }
    }
    Ok(out)
}

fn explain_nonvanishing(ds: &Dataset, k: usize, b: &Budget) -> Result<String, Error> {
    let e = step_entry(ds, k).ok_or_else(|| Error::UnknownGoal(format!("nonvanishing:{k}")))?;
    let mut out = String::new();
    let targets: Vec<String> = e.targets.iter().map(|t| format!("M{t}")).collect();
    let _ = writeln!(out, "k={k} on {}: the minors {} have no common zero", e.chart, targets.join(", "));
    match nonvanishing(ds, e, b)? {
        Nonvanishing::Direct(r) => {
            for p in &r.pieces {
                let what = match &p.certificate {
                    Some(c) => format!("unit certificate ({} terms)", c.size()),
                    None => "COMMON ZERO".into(),
                };
                let _ = writeln!(out, "  {}: {what}", pretty(&p.piece.label()));
            }
        }
        Nonvanishing::Replay(r) => {
            let _ = writeln!(out, "Suppose all of them vanish at a point. Then, in order:");
            for (i, d) in r.script.iter().enumerate() {
                let _ = writeln!(out, "  {}. {}", i + 1, pretty(&d.describe()));
            }
            let _ = writeln!(out, "and the remaining equations have no solution: a contradiction.");
            let _ = writeln!(out, "per piece (steps needed before the contradiction):");
            for p in &r.pieces {
                let used: Vec<String> = p.steps.iter().map(|(i, _)| (i + 1).to_string()).collect();
                let what = match (&p.contradiction, p.stuck) {
                    (Some(_), _) if used.is_empty() => "empty at once".to_string(),
                    (Some(_), _) => format!("steps {}", used.join(", ")),
                    (None, Some(s)) => format!("STUCK at step {}", s + 1),
                    (None, None) => "NO CONTRADICTION".into(),
                };
                let _ = writeln!(out, "  {}: {what}", pretty(&p.piece.label()));
            }
        }
    }
    Ok(out)
}

fn render(r: &GoalReport) -> String {
    let mut out = format!("{}: {}\n", r.goal, r.status);
    for c in &r.checks {
        let _ = writeln!(out, "  {}: {}", c.name, c.status);
        for d in &c.detail {
            let _ = writeln!(out, "    {}", pretty(d));
        }
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {}", pretty(n));
    }
    out
}

/// The derivation behind `goal`: Jacobian matrices for construction steps,
/// the deduction chain for non-vanishing, the check details otherwise.
pub fn explain(ds: &Dataset, goal: &Goal, b: &Budget) -> Result<String, Error> {
    match goal {
        Goal::Step(k) => explain_step(ds, *k, b),
        Goal::Nonvanishing(k) => explain_nonvanishing(ds, *k, b),
        g => Ok(render(&run_goal(ds, g, b)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_in_superscript_notation() {
        assert_eq!(pretty_name("a23_4"), "a²₃[4]");
        assert_eq!(pretty_name("d13_4"), "δ¹₃[4]");
        assert_eq!(pretty_name("a11"), "a¹₁");
        assert_eq!(pretty_name("l0"), "λ₀");
        assert_eq!(pretty_name("m3"), "μ₃");
        assert_eq!(pretty_name("P4"), "P₄");
        assert_eq!(pretty_name("p"), "p");
        assert_eq!(pretty_name("detA4"), "detA4");
        assert_eq!(pretty("-2*l1*a23_1^2 + p"), "-2*λ₁*a²₃[1]^2 + p");
    }
}
