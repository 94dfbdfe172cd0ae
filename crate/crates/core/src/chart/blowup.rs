//! One blow-up step in the coordinates of the semi-stable model: the new scaling
//! variable `Λ` multiplies every center coordinate, each non-coordinate
//! generator `g` gets a fresh coordinate `h` with `s·Λ·h = g`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{rename, strip_units, ChartError, ChartPresentation, ParentMap};
use crate::cover::CoverOutcome;
use crate::ideal::{contains, Budget, Ideal};
use crate::poly::{Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSpec {
    pub chart: String,
    /// First generator is the chart's `P`; variables are scaled, other
    /// generators get fresh coordinates.
    pub generators: Vec<Polynomial>,
    /// Unit `s` normalizing the fresh coordinates (`s·Λ·h = g`); `None` is 1.
    pub denominator: Option<Polynomial>,
    /// `Λ`, the new `P`, then one name per non-variable generator.
    pub fresh_names: Vec<String>,
}

fn same_up_to_sign(a: &Polynomial, b: &Polynomial) -> bool {
    a == b || *a == -b
}

/// Blows up `c` along `center`. The result's parent is `c`; its name is
/// `Bl(<c>)` until the caller renames it.
pub fn blowup_step(c: &ChartPresentation, center: &CenterSpec, budget: &Budget) -> Result<ChartPresentation, ChartError> {
    if center.chart != c.name {
        return Err(ChartError::WrongChart { center: center.chart.clone(), chart: c.name.clone() });
    }
    let p_old = c.p_index();
    let p_name = c.reg.name(p_old);
    if center.generators.first() != Some(&c.p_var()) {
        return Err(ChartError::NotPVariable { expected: p_name.into() });
    }
    let mut scaled: Vec<usize> = Vec::new();
    let mut fresh_gens: Vec<Polynomial> = Vec::new();
    for g in &center.generators[1..] {
        match g.as_variable() {
            Some(v) if !scaled.contains(&v) && v != p_old => scaled.push(v),
            _ => fresh_gens.push(g.clone()),
        }
    }
    if center.fresh_names.len() != 2 + fresh_gens.len() {
        return Err(ChartError::FreshNameCount { expected: 2 + fresh_gens.len(), got: center.fresh_names.len() });
    }
    let mut seen = BTreeSet::new();
    for n in &center.fresh_names {
        if c.reg.contains(n) || !seen.insert(n.clone()) {
            return Err(ChartError::NameCollision(n.clone()));
        }
    }
    let units = c.unit_variables();
    let one = Polynomial::one(&c.reg);
    let s = center.denominator.clone().unwrap_or_else(|| one.clone());
    let s_ok = s.num_terms() == 1 && {
        let (m, _) = s.leading_term().unwrap();
        m.exps().iter().enumerate().all(|(i, &e)| e == 0 || units.contains(&i))
    };
    if !s_ok {
        return Err(ChartError::BadDenominator(s.to_string()));
    }

    // registry: old scaling vars, Λ, new P, fresh coordinates, remaining old vars
    let lam = &center.fresh_names[0];
    let p_new = &center.fresh_names[1];
    let hs = &center.fresh_names[2..];
    let mut names: Vec<String> = c.scaling_indices().iter().map(|&i| c.reg.name(i).into()).collect();
    names.push(lam.clone());
    names.push(p_new.clone());
    names.extend(hs.iter().cloned());
    for (i, n) in c.reg.names().iter().enumerate() {
        if i != p_old && !c.scaling_indices().contains(&i) {
            names.push(n.clone());
        }
    }
    let reg = VarRegistry::new(names)?;
    let lam_v = Polynomial::var(&reg, lam)?;
    let lam_i = reg.index_of(lam).unwrap();

    let mut substitution = BTreeMap::new();
    substitution.insert(String::from(p_name), &lam_v * &Polynomial::var(&reg, p_new)?);
    for &v in &scaled {
        let n = c.reg.name(v);
        substitution.insert(String::from(n), &lam_v * &Polynomial::var(&reg, n)?);
    }
    let pull = |f: &Polynomial| f.substitute(&substitution, &reg);

    // weights
    let r = c.torus_rank;
    let ext = |w: &[i64], last: i64| {
        let mut v = w.to_vec();
        v.push(last);
        v
    };
    let mut weights = Vec::with_capacity(reg.len());
    for n in reg.names() {
        let w = if n == lam {
            let mut v = alloc::vec![0; r];
            v.push(-1);
            v
        } else if n == p_new {
            ext(&c.weights[p_old], 1)
        } else if let Some(k) = hs.iter().position(|h| h == n) {
            let g = &fresh_gens[k];
            let wg = c.homogeneous_weight(g).map_err(|_| ChartError::InhomogeneousCenter(g.to_string()))?;
            let ws = c.homogeneous_weight(&s).map_err(|_| ChartError::BadDenominator(s.to_string()))?;
            let wg = wg.unwrap_or_else(|| alloc::vec![0; r]);
            let ws = ws.unwrap_or_else(|| alloc::vec![0; r]);
            let diff: Vec<i64> = wg.iter().zip(&ws).map(|(a, b)| a - b).collect();
            ext(&diff, 1)
        } else {
            let i = c.reg.index_of(n).unwrap();
            ext(&c.weights[i], if scaled.contains(&i) { 1 } else { 0 })
        };
        weights.push(w);
    }

    // equations: strict transforms of the old ones, then the fresh coordinates
    let mut equations = Vec::new();
    for f in &c.equations {
        let (_, g) = pull(f)?.strip_var(lam_i);
        equations.push(g);
    }
    let s_new = pull(&s)?;
    for (g, h) in fresh_gens.iter().zip(hs) {
        let hv = Polynomial::var(&reg, h)?;
        equations.push(&(&(&s_new * &lam_v) * &hv) - &pull(g)?);
    }

    // exclusions
    let mut replacements = alloc::vec![Polynomial::var(&reg, p_new)?];
    for &v in &scaled {
        replacements.push(Polynomial::var(&reg, c.reg.name(v))?);
    }
    for h in hs {
        replacements.push(Polynomial::var(&reg, h)?);
    }
    let mut excluded = alloc::vec![Ideal::new(&reg, replacements)?];
    let center_vars: Vec<Polynomial> =
        core::iter::once(p_old).chain(scaled.iter().copied()).map(|i| Polynomial::var_at(&c.reg, i)).collect();
    let new_units: Vec<usize> = units.iter().map(|&u| reg.index_of(c.reg.name(u)).unwrap()).collect();
    for e in &c.excluded {
        let gens = e.generators();
        let has_vars = center_vars.iter().all(|v| gens.iter().any(|g| same_up_to_sign(g, v)));
        // preimage of V(E) is V(Λ, rest) ∪ (a subset of the new exclusion)
        // when E holds every center coordinate and the other generators lie in ⟨E⟩
        let absorbs = has_vars && {
            let with_eq = e.with(&c.equations)?;
            let mut ok = true;
            for g in &fresh_gens {
                if !contains(&with_eq, g, budget)?.is_member() {
                    ok = false;
                    break;
                }
            }
            ok
        };
        let mut new_gens = Vec::new();
        if absorbs {
            new_gens.push(lam_v.clone());
            for g in gens {
                if !center_vars.iter().any(|v| same_up_to_sign(g, v)) {
                    new_gens.push(strip_units(&pull(g)?, &new_units));
                }
            }
        } else {
            for g in gens {
                new_gens.push(strip_units(&pull(g)?, &new_units));
            }
        }
        excluded.push(Ideal::new(&reg, new_gens)?);
    }

    let mut monomial: Vec<usize> = c.scaling_indices().iter().map(|&i| reg.index_of(c.reg.name(i)).unwrap()).collect();
    monomial.push(lam_i);
    monomial.push(reg.index_of(p_new).unwrap());

    Ok(ChartPresentation {
        name: alloc::format!("Bl({})", c.name),
        reg,
        torus_rank: r + 1,
        weights,
        monomial,
        equations,
        excluded,
        parent: Some(ParentMap { name: c.name.clone(), substitution }),
    })
}

/// Restricts to the open set `f ≠ 0`: adds the exclusion `{f}` and drops the
/// exclusions having `f` among their generators (now redundant).
pub fn restrict_to_open(c: &ChartPresentation, f: &Polynomial) -> Result<ChartPresentation, ChartError> {
    let mut out = c.clone();
    out.excluded.retain(|e| !e.generators().iter().any(|g| same_up_to_sign(g, f)));
    out.excluded.push(Ideal::new(&c.reg, alloc::vec![f.clone()])?);
    Ok(out)
}

/// `second` (a child of `first`, itself a child of `grandparent`) re-parented
/// onto `grandparent` by composing the substitutions. Coordinates mapped to
/// themselves are left implicit.
pub fn compose_parent(
    grandparent: &ChartPresentation,
    first: &ChartPresentation,
    second: &ChartPresentation,
) -> Result<ChartPresentation, ChartError> {
    let p1 = first.parent.as_ref().ok_or_else(|| ChartError::NoParent(first.name.clone()))?;
    let p2 = second.parent.as_ref().ok_or_else(|| ChartError::NoParent(second.name.clone()))?;
    if p2.name != first.name {
        return Err(ChartError::NotAncestor { ancestor: first.name.clone(), chart: second.name.clone() });
    }
    if p1.name != grandparent.name {
        return Err(ChartError::NotAncestor { ancestor: grandparent.name.clone(), chart: first.name.clone() });
    }
    let mut substitution = BTreeMap::new();
    for n in grandparent.reg.names() {
        let img = match p1.substitution.get(n) {
            Some(i) => i.clone(),
            None => Polynomial::var(&first.reg, n)?,
        };
        let img = img.substitute(&p2.substitution, &second.reg)?;
        if img.as_variable().map(|v| second.reg.name(v)) != Some(n.as_str()) {
            substitution.insert(n.clone(), img);
        }
    }
    let mut out = second.clone();
    out.parent = Some(ParentMap { name: p1.name.clone(), substitution });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquationMatch {
    /// Same equations up to nonzero scalars.
    Syntactic,
    /// Different generators of the same ideal.
    SameIdeal,
    Different,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartComparison {
    /// Engine variable name → shipped variable name.
    pub renaming: BTreeMap<String, String>,
    pub substitution_matches: bool,
    pub monomial_matches: bool,
    pub weights_match: bool,
    pub equations: EquationMatch,
    /// Same exclusion lists up to order and generator signs.
    pub exclusions_syntactic: bool,
    /// Both families remove the same closed set (case-split proofs in both
    /// directions).
    pub exclusions_semantic: bool,
}

impl ChartComparison {
    pub fn isomorphic(&self) -> bool {
        self.substitution_matches
            && self.monomial_matches
            && self.weights_match
            && self.equations != EquationMatch::Different
            && self.exclusions_semantic
    }
}

fn strip_scaling(img: &Polynomial, c: &ChartPresentation) -> Option<usize> {
    if let Some(v) = img.as_variable() {
        return Some(v);
    }
    let m = img.as_monomial()?;
    let mut found = None;
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 || c.scaling_indices().contains(&i) {
            continue;
        }
        if e != 1 || found.is_some() {
            return None;
        }
        found = Some(i);
    }
    found
}

fn renaming(engine: &ChartPresentation, shipped: &ChartPresentation) -> Result<BTreeMap<String, String>, ChartError> {
    let pe = engine.parent.as_ref().ok_or_else(|| ChartError::NoParent(engine.name.clone()))?;
    let ps = shipped.parent.as_ref().ok_or_else(|| ChartError::NoParent(shipped.name.clone()))?;
    let mut map = BTreeMap::new();
    for (v, img_s) in &ps.substitution {
        let img_e = match pe.substitution.get(v) {
            Some(i) => i.clone(),
            None => Polynomial::var(&engine.reg, v).map_err(|_| ChartError::Renaming(v.clone()))?,
        };
        let (Some(xe), Some(xs)) = (strip_scaling(&img_e, engine), strip_scaling(img_s, shipped)) else {
            return Err(ChartError::Renaming(v.clone()));
        };
        map.insert(String::from(engine.reg.name(xe)), String::from(shipped.reg.name(xs)));
    }
    for n in engine.reg.names() {
        if !map.contains_key(n) {
            if !shipped.reg.contains(n) {
                return Err(ChartError::Renaming(n.clone()));
            }
            map.insert(n.clone(), n.clone());
        }
    }
    let targets: BTreeSet<&String> = map.values().collect();
    if targets.len() != map.len() || targets.len() != shipped.reg.len() {
        return Err(ChartError::Renaming(String::from("variable sets differ")));
    }
    Ok(map)
}

fn normalized_set(gens: &[Polynomial]) -> BTreeSet<String> {
    gens.iter().map(|g| g.sign_normalized().to_string()).collect()
}

/// Structural comparison of an engine-produced chart with a shipped one having
/// the same parent. Variables are matched through the two parent substitutions
/// (scaling variables removed), torus factors through their scaling variables.
pub fn compare_charts(
    engine: &ChartPresentation,
    shipped: &ChartPresentation,
    budget: &Budget,
) -> Result<ChartComparison, ChartError> {
    let map = renaming(engine, shipped)?;
    let reg = &shipped.reg;
    let mv = |f: &Polynomial| rename(f, &map, reg);
    let idx = |n: &str| reg.index_of(&map[n]).unwrap();

    let pe = engine.parent.as_ref().unwrap();
    let ps = shipped.parent.as_ref().unwrap();
    let mut substitution_matches = true;
    for (v, img_s) in &ps.substitution {
        let img_e = match pe.substitution.get(v) {
            Some(i) => mv(i)?,
            None => Polynomial::var(reg, &map[v.as_str()])?,
        };
        substitution_matches &= img_e == *img_s;
    }
    for v in pe.substitution.keys() {
        substitution_matches &= ps.substitution.contains_key(v);
    }

    let mono_e: BTreeSet<usize> = engine.monomial.iter().map(|&i| idx(engine.reg.name(i))).collect();
    let mono_s: BTreeSet<usize> = shipped.monomial.iter().copied().collect();
    let monomial_matches = mono_e == mono_s
        && idx(engine.reg.name(engine.p_index())) == shipped.p_index()
        && engine.monomial.len() == shipped.monomial.len();

    // torus factor k of a chart is the one where its scaling variable has weight −1
    let factor_of = |c: &ChartPresentation, var: usize| c.weights[var].iter().position(|&w| w == -1);
    let mut weights_match = engine.torus_rank == shipped.torus_rank;
    if weights_match {
        let mut perm = alloc::vec![usize::MAX; engine.torus_rank];
        for &i in engine.scaling_indices() {
            if let (Some(ke), Some(ks)) = (factor_of(engine, i), factor_of(shipped, idx(engine.reg.name(i)))) {
                perm[ke] = ks;
            }
        }
        weights_match = perm.iter().all(|&k| k != usize::MAX);
        if weights_match {
            for (i, n) in engine.reg.names().iter().enumerate() {
                let ws = &shipped.weights[idx(n)];
                weights_match &= (0..engine.torus_rank).all(|k| engine.weights[i][k] == ws[perm[k]]);
            }
        }
    }

    let eq_e: Vec<Polynomial> = engine.equations.iter().map(mv).collect::<Result<_, _>>()?;
    let syntactic = eq_e.len() == shipped.equations.len()
        && eq_e.iter().all(|f| shipped.equations.iter().any(|g| f.monic() == g.monic()))
        && shipped.equations.iter().all(|g| eq_e.iter().any(|f| f.monic() == g.monic()));
    let equations = if syntactic {
        EquationMatch::Syntactic
    } else if Ideal::new(reg, eq_e.clone())?.same_ideal(&shipped.ideal(), budget)? {
        EquationMatch::SameIdeal
    } else {
        EquationMatch::Different
    };

    let ex_e: Vec<Vec<Polynomial>> = engine
        .excluded
        .iter()
        .map(|e| e.generators().iter().map(mv).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let ex_s = shipped.exclusion_lists();
    let set_e: BTreeSet<BTreeSet<String>> = ex_e.iter().map(|e| normalized_set(e)).collect();
    let set_s: BTreeSet<BTreeSet<String>> = ex_s.iter().map(|e| normalized_set(e)).collect();
    let exclusions_syntactic = set_e == set_s && ex_e.len() == ex_s.len();

    let exclusions_semantic = exclusions_syntactic || {
        let mut ok = true;
        let engine_side = crate::cover::CoverProblem {
            reg: reg.clone(),
            relations: shipped.equations.clone(),
            exclusions: ex_e.clone(),
            inverted: Vec::new(),
            targets: Vec::new(),
        };
        for e in &ex_s {
            let prob = crate::cover::CoverProblem { targets: e.clone(), ..engine_side.clone() };
            ok &= matches!(prob.solve(None, budget)?, CoverOutcome::Proved(_));
        }
        for e in &ex_e {
            ok &= matches!(shipped.cover_problem(e.clone()).solve(None, budget)?, CoverOutcome::Proved(_));
        }
        ok
    };

    Ok(ChartComparison {
        renaming: map,
        substitution_matches,
        monomial_matches,
        weights_match,
        equations,
        exclusions_syntactic,
        exclusions_semantic,
    })
}
