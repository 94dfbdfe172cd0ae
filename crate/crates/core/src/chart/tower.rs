//! Charts linked by parent substitutions.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ChartError, ChartPresentation};
use crate::cover::{CoverOutcome, CoverProof, Obstruction};
use crate::ideal::{contains, saturate, Budget, Ideal, Membership};
use crate::poly::{Monomial, Polynomial};

#[derive(Debug, Clone, Default)]
pub struct Tower {
    charts: Vec<ChartPresentation>,
}

impl Tower {
    pub fn new(charts: Vec<ChartPresentation>) -> Self {
        Tower { charts }
    }

    pub fn charts(&self) -> &[ChartPresentation] {
        &self.charts
    }

    pub fn push(&mut self, c: ChartPresentation) {
        self.charts.retain(|x| x.name != c.name);
        self.charts.push(c);
    }

    pub fn get(&self, name: &str) -> Result<&ChartPresentation, ChartError> {
        self.charts.iter().find(|c| c.name == name).ok_or_else(|| ChartError::UnknownChart(name.into()))
    }

    /// Charts from the root down to `name`.
    pub fn chain(&self, name: &str) -> Result<Vec<&ChartPresentation>, ChartError> {
        let mut out = alloc::vec![self.get(name)?];
        while let Some(p) = &out.last().unwrap().parent {
            if out.len() > self.charts.len() {
                return Err(ChartError::UnknownChart(p.name.clone()));
            }
            out.push(self.get(&p.name)?);
        }
        out.reverse();
        Ok(out)
    }

    /// Composite map from the coordinates of `ancestor` into `name`.
    pub fn substitution_from(&self, ancestor: &str, name: &str) -> Result<BTreeMap<String, Polynomial>, ChartError> {
        let chain = self.chain(name)?;
        let start = chain
            .iter()
            .position(|c| c.name == ancestor)
            .ok_or_else(|| ChartError::NotAncestor { ancestor: ancestor.into(), chart: name.into() })?;
        let root = chain[start];
        let mut images: BTreeMap<String, Polynomial> =
            root.reg.names().iter().enumerate().map(|(i, n)| (n.clone(), Polynomial::var_at(&root.reg, i))).collect();
        for c in &chain[start + 1..] {
            let sub = &c.parent.as_ref().unwrap().substitution;
            for img in images.values_mut() {
                *img = img.substitute(sub, &c.reg)?;
            }
        }
        Ok(images)
    }
}

/// Images of the root coordinates (for the tower over the big cell: `a_ij`
/// and `p`) in the coordinates of `name`.
pub fn total_substitution(tower: &Tower, name: &str) -> Result<BTreeMap<String, Polynomial>, ChartError> {
    let root = tower.chain(name)?[0].name.clone();
    tower.substitution_from(&root, name)
}

/// Pulls `downstairs` (an ideal on `ancestor`) back to `name`, adds the chart
/// equations and saturates by the scaling variables introduced since
/// `ancestor` and by the chart's unit variables.
pub fn strict_transform(
    tower: &Tower,
    name: &str,
    ancestor: &str,
    downstairs: &Ideal,
    budget: &Budget,
) -> Result<Ideal, ChartError> {
    let c = tower.get(name)?;
    let a = tower.get(ancestor)?;
    if !downstairs.registry().same_as(&a.reg) {
        return Err(crate::poly::PolyError::RegistryMismatch.into());
    }
    let sub = tower.substitution_from(ancestor, name)?;
    let mut gens: Vec<Polynomial> =
        downstairs.generators().iter().map(|g| g.substitute(&sub, &c.reg)).collect::<Result<_, _>>()?;
    gens.extend(c.equations.iter().cloned());
    let total = Ideal::new(&c.reg, gens)?;
    let old: Vec<&str> = a.scaling_indices().iter().map(|&i| a.reg.name(i)).collect();
    let mut e = alloc::vec![0u16; c.reg.len()];
    for &i in c.scaling_indices() {
        if !old.contains(&c.reg.name(i)) {
            e[i] = 1;
        }
    }
    for u in c.unit_variables() {
        e[u] = 1;
    }
    let m = Polynomial::monomial(&c.reg, Monomial::from_exps(e), crate::poly::q(1));
    Ok(saturate(&total, &m, budget)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionCheck {
    pub index: usize,
    pub proof: Option<CoverProof>,
    pub obstruction: Option<Obstruction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackReport {
    pub chart: String,
    pub parent: String,
    /// Per parent equation: `None` when contained, else the normal form.
    pub residuals: Vec<Option<Polynomial>>,
    pub exclusions: Vec<ExclusionCheck>,
}

impl PullbackReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Option::is_none) && self.exclusions.iter().all(|e| e.proof.is_some())
    }
}

/// Parent equations pull back into the chart ideal, and every parent
/// exclusion pulls back into the union of the chart's exclusions.
pub fn pullback_check(tower: &Tower, name: &str, budget: &Budget) -> Result<PullbackReport, ChartError> {
    let c = tower.get(name)?;
    let pm = c.parent.as_ref().ok_or_else(|| ChartError::NoParent(name.into()))?;
    let parent = tower.get(&pm.name)?;
    let pull = |f: &Polynomial| f.substitute(&pm.substitution, &c.reg);
    let ideal = c.ideal();
    let mut residuals = Vec::new();
    for f in &parent.equations {
        residuals.push(match contains(&ideal, &pull(f)?, budget)? {
            Membership::Member(_) => None,
            Membership::NotMember { remainder } => Some(remainder),
        });
    }
    let mut exclusions = Vec::new();
    for (index, e) in parent.excluded.iter().enumerate() {
        let targets: Vec<Polynomial> = e.generators().iter().map(pull).collect::<Result<_, _>>()?;
        let check = match c.cover_problem(targets).solve(None, budget)? {
            CoverOutcome::Proved(p) => ExclusionCheck { index, proof: Some(p), obstruction: None },
            CoverOutcome::Obstructed(o) => ExclusionCheck { index, proof: None, obstruction: Some(o) },
        };
        exclusions.push(check);
    }
    Ok(PullbackReport { chart: name.into(), parent: pm.name.clone(), residuals, exclusions })
}
