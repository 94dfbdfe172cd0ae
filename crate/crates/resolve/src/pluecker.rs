//! Turning the shipped identity and local-model tables into core goals.

use std::collections::BTreeMap;

use resolve_core::chart::{total_substitution, ChartPresentation, Tower};
use resolve_core::ideal::Budget;
use resolve_core::pluecker::{
    lattice_matrix, minor_table, replay_deductions, residual, root_cofactors, verify_factorization, verify_nonvanishing,
    Deduction, FactorizationReport, LocalModelStep, MinorTable, NonvanishingReport, ReplayReport, Scope,
};
use resolve_core::poly::Polynomial;

use crate::data::{Dataset, DeductionEntry, DefinitionEntry, IdentityEntry, InverseEntry, LocalModelEntry};
use crate::Error;

/// Genus of the shipped tower.
pub const GENUS: usize = 3;

fn chart<'a>(ds: &'a Dataset, name: &str) -> Result<&'a ChartPresentation, Error> {
    Ok(ds.tower.get(name)?)
}

/// Root coordinates with the cofactors `dij` and `detA` defined.
pub fn root_scope(tower: &Tower) -> Result<Scope, Error> {
    let root = &tower.charts()[0];
    let mut s = Scope::free(&root.name, &root.reg);
    for (n, v) in root_cofactors(&root.reg, GENUS)? {
        s.define(&n, v)?;
    }
    Ok(s)
}

/// The chart ring of `chart` with inverse variables and definitions.
pub fn scope_for(ds: &Dataset, name: &str, inverses: &[InverseEntry], defs: &[DefinitionEntry]) -> Result<Scope, Error> {
    let c = chart(ds, name)?;
    let inv = inverses
        .iter()
        .map(|e| Ok((e.name.clone(), resolve_core::poly::parse(&e.of, &c.reg)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut s = Scope::new(c, &inv)?;
    let mut pull: Option<(Scope, BTreeMap<String, Polynomial>)> = None;
    for d in defs {
        match (&d.expr, &d.det, &d.pullback) {
            (Some(e), None, None) => s.define_text(&d.name, e)?,
            (None, Some(m), None) => s.define_det(&d.name, m)?,
            (None, None, Some(e)) => {
                if pull.is_none() {
                    pull = Some((root_scope(&ds.tower)?, total_substitution(&ds.tower, name)?));
                }
                let (root, sub) = pull.as_ref().unwrap();
                let v = root.parse(e)?.substitute(sub, &c.reg)?;
                s.define(&d.name, v)?;
            }
            _ => return Err(Error::BadDefinition(d.name.clone())),
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityResult {
    pub name: String,
    pub chart: String,
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    /// Normal form of `lhs − rhs` modulo the chart; `None` when zero.
    pub residual: Option<Polynomial>,
}

/// Checks `lhs = rhs` modulo the chart equations (and inverse relations).
pub fn check_identity(ds: &Dataset, e: &IdentityEntry, budget: &Budget) -> Result<IdentityResult, Error> {
    let scope = scope_for(ds, &e.chart, &e.inverses, &e.definitions)?;
    let lhs = scope.parse(&e.lhs)?;
    let rhs = scope.parse(&e.rhs)?;
    let gb = scope.basis(budget)?;
    let r = residual(&gb, &(&lhs - &rhs));
    Ok(IdentityResult { name: e.name.clone(), chart: e.chart.clone(), lhs, rhs, residual: r })
}

/// `"125"` → `[1, 2, 5]`.
pub fn index_of_key(key: &str) -> Option<Vec<usize>> {
    key.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
}

/// A local-model step with its scope; table entries are also defined as
/// `M<key>` so later entries and targets may refer to them.
pub fn build_step(ds: &Dataset, e: &LocalModelEntry) -> Result<(LocalModelStep, Scope), Error> {
    let mut scope = scope_for(ds, &e.chart, &e.inverses, &e.definitions)?;
    let c = chart(ds, &e.chart)?;
    let unit_factor = resolve_core::poly::parse(&e.unit_factor, &c.reg)?;
    let mut table = Vec::new();
    for (key, text) in sorted_entries(&e.table)? {
        let v = scope.parse(text)?;
        scope.define(&format!("M{key}"), v.clone())?;
        table.push((index_of_key(key).unwrap(), v));
    }
    let step = LocalModelStep { k: e.k, chart: e.chart.clone(), rows: e.rows.clone(), cols: e.cols.clone(), unit_factor, table };
    Ok((step, scope))
}

fn sorted_entries(t: &BTreeMap<String, String>) -> Result<Vec<(&str, &str)>, Error> {
    let mut v: Vec<(&str, &str)> = t.iter().map(|(k, x)| (k.as_str(), x.as_str())).collect();
    for (k, _) in &v {
        if index_of_key(k).is_none() {
            return Err(Error::BadDefinition(format!("table key `{k}`")));
        }
    }
    v.sort_by_key(|(k, _)| index_of_key(k));
    Ok(v)
}

pub fn factorization(ds: &Dataset, e: &LocalModelEntry, budget: &Budget) -> Result<FactorizationReport, Error> {
    let (step, scope) = build_step(ds, e)?;
    let gb = scope.basis(budget)?;
    Ok(verify_factorization(&ds.tower, GENUS, &step, &scope, &gb)?)
}

/// Same as [`factorization`] for an already built (possibly altered) step.
pub fn factorization_of(ds: &Dataset, step: &LocalModelStep, scope: &Scope, budget: &Budget) -> Result<FactorizationReport, Error> {
    let gb = scope.basis(budget)?;
    Ok(verify_factorization(&ds.tower, GENUS, step, scope, &gb)?)
}

/// Recomputed minors in root coordinates beside the printed `m` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MRow {
    pub index: Vec<usize>,
    pub computed: Polynomial,
    pub printed: Option<Polynomial>,
}

impl MRow {
    pub fn agrees(&self) -> bool {
        self.printed.as_ref() == Some(&self.computed)
    }
}

pub fn root_minors(ds: &Dataset, e: &LocalModelEntry) -> Result<MinorTable, Error> {
    let root = &ds.tower.charts()[0];
    let m = lattice_matrix(&root.reg, GENUS, e.k)?;
    Ok(minor_table(&m, &e.rows, &e.cols)?)
}

pub fn m_table(ds: &Dataset, e: &LocalModelEntry) -> Result<Vec<MRow>, Error> {
    let mut scope = root_scope(&ds.tower)?;
    let mut printed = BTreeMap::new();
    for (key, text) in sorted_entries(&e.printed_m)? {
        let v = scope.parse(text)?;
        scope.define(&format!("m{key}"), v.clone())?;
        printed.insert(index_of_key(key).unwrap(), v);
    }
    Ok(root_minors(ds, e)?
        .into_iter()
        .map(|(index, computed)| MRow { printed: printed.get(&index).cloned(), index, computed })
        .collect())
}

fn targets(step: &LocalModelStep, scope: &Scope, e: &LocalModelEntry) -> Result<Vec<Polynomial>, Error> {
    e.targets
        .iter()
        .map(|k| {
            let idx = index_of_key(k).ok_or_else(|| Error::BadDefinition(format!("target `{k}`")))?;
            let v = step.table.iter().find(|(i, _)| *i == idx).ok_or_else(|| Error::BadDefinition(format!("target `{k}`")))?;
            Ok(scope.embed(&v.1)?)
        })
        .collect()
}

/// Outcome of a non-vanishing goal: direct per-piece certificates, or a
/// replayed deduction when the step ships a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nonvanishing {
    Direct(NonvanishingReport),
    Replay(ReplayReport),
}

impl Nonvanishing {
    pub fn passed(&self) -> bool {
        match self {
            Nonvanishing::Direct(r) => r.passed(),
            Nonvanishing::Replay(r) => r.passed(),
        }
    }

    pub fn verify(&self) -> bool {
        match self {
            Nonvanishing::Direct(r) => r.verify(),
            Nonvanishing::Replay(r) => r.verify(),
        }
    }
}

pub fn nonvanishing(ds: &Dataset, e: &LocalModelEntry, budget: &Budget) -> Result<Nonvanishing, Error> {
    let (step, scope) = build_step(ds, e)?;
    let c = chart(ds, &e.chart)?;
    let t = targets(&step, &scope, e)?;
    if e.script.is_empty() {
        return Ok(Nonvanishing::Direct(verify_nonvanishing(c, &scope, &t, budget)?));
    }
    let script = e
        .script
        .iter()
        .map(|d| {
            Ok(match d {
                DeductionEntry::Invertible(f) => Deduction::Invertible(scope.parse(f)?),
                DeductionEntry::Vanishes(f) => Deduction::Vanishes(scope.parse(f)?),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Nonvanishing::Replay(replay_deductions(c, &scope, &t, &script, budget)?))
}

pub fn step_entry(ds: &Dataset, k: usize) -> Option<&LocalModelEntry> {
    ds.pluecker.steps.iter().find(|s| s.k == k)
}
