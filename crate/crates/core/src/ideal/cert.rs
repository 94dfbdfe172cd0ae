//! Unit-ideal certificates on localized presentations.
//!
//! A localization `R[f⁻¹ : f ∈ inverted]/I` is encoded with one Rabinowitsch
//! variable per inverted element; a certificate is an explicit combination of
//! the relations, the targets and the `u_f·f − 1` that expands to exactly 1.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{run_groebner, Budget, Ideal, IdealError, MonomialOrder};
use crate::poly::{Coeff, PolyError, Polynomial, VarRegistry};

/// An ideal together with elements declared invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizedPresentation {
    ideal: Ideal,
    inverted: Vec<Polynomial>,
}

impl LocalizedPresentation {
    pub fn new(ideal: Ideal, inverted: Vec<Polynomial>) -> Result<Self, IdealError> {
        for f in &inverted {
            if f.is_zero() {
                return Err(IdealError::ZeroInverted);
            }
            if !f.registry().same_as(ideal.registry()) {
                return Err(PolyError::RegistryMismatch.into());
            }
        }
        Ok(LocalizedPresentation { ideal, inverted })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn inverted(&self) -> &[Polynomial] {
        &self.inverted
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.ideal.registry()
    }

    /// True iff the point satisfies every relation and no inverted element vanishes.
    pub fn admits_point(&self, point: &[Coeff]) -> bool {
        self.ideal.generators().iter().all(|g| g.evaluate(point).is_zero())
            && self.inverted.iter().all(|f| !f.evaluate(point).is_zero())
    }
}

/// `Σ combiners[i]·generators[i] = 1` over the ring extended by one inverse
/// variable per inverted element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCertificate {
    registry: Arc<VarRegistry>,
    relations: Vec<Polynomial>,
    targets: Vec<Polynomial>,
    inverted: Vec<(String, Polynomial)>,
    combiners: Vec<Polynomial>,
}

impl UnitCertificate {
    /// Ring of the combiners: the base variables followed by the inverse variables.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn targets(&self) -> &[Polynomial] {
        &self.targets
    }

    /// `(inverse variable name, inverted element)` pairs.
    pub fn inverted(&self) -> &[(String, Polynomial)] {
        &self.inverted
    }

    pub fn combiners(&self) -> &[Polynomial] {
        &self.combiners
    }

    /// All generators, in the order matched by [`combiners`](Self::combiners):
    /// relations, then targets, then `u·f − 1` per inverted element.
    pub fn generators(&self) -> Vec<Polynomial> {
        let mut gens: Vec<Polynomial> = self.relations.iter().chain(&self.targets).cloned().collect();
        for (u, f) in &self.inverted {
            let uv = Polynomial::var(&self.registry, u).expect("inverse variable registered");
            gens.push(&(&uv * f) - &Polynomial::one(&self.registry));
        }
        gens
    }

    /// Pure-arithmetic re-check: the combination expands to exactly 1.
    pub fn verify(&self) -> bool {
        let gens = self.generators();
        if gens.len() != self.combiners.len() {
            return false;
        }
        let mut acc = Polynomial::zero(&self.registry);
        for (g, c) in gens.iter().zip(&self.combiners) {
            if !c.registry().same_as(&self.registry) {
                return false;
            }
            if !c.is_zero() {
                acc = &acc + &(c * g);
            }
        }
        acc.is_one()
    }

    /// Indices (into the targets) whose combiner is nonzero.
    pub fn used_targets(&self) -> Vec<usize> {
        let off = self.relations.len();
        (0..self.targets.len()).filter(|&i| !self.combiners[off + i].is_zero()).collect()
    }

    /// Total number of terms over all combiners.
    pub fn size(&self) -> usize {
        self.combiners.iter().map(|c| c.num_terms()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitVerdict {
    Unit(UnitCertificate),
    /// The extended ideal is proper: the system has a common zero over the
    /// algebraic closure (a rational one is not claimed).
    Proper { basis: Vec<Polynomial> },
}

impl UnitVerdict {
    pub fn certificate(&self) -> Option<&UnitCertificate> {
        match self {
            UnitVerdict::Unit(c) => Some(c),
            UnitVerdict::Proper { .. } => None,
        }
    }
}

/// The certificate shell for `lp` and `targets`, with empty combiners.
fn shell(lp: &LocalizedPresentation, targets: &[Polynomial]) -> Result<UnitCertificate, IdealError> {
    let base = lp.registry();
    for t in targets {
        if !t.registry().same_as(base) {
            return Err(PolyError::RegistryMismatch.into());
        }
    }
    let names: Vec<String> = {
        let mut out: Vec<String> = Vec::new();
        for i in 0..lp.inverted.len() {
            let mut stem = alloc::format!("u_inv{i}");
            while base.contains(&stem) || out.contains(&stem) {
                stem.push('_');
            }
            out.push(stem);
        }
        out
    };
    let ext = base.extended(&names)?;
    let lift = |p: &Polynomial| p.embed(&ext);
    let relations: Vec<Polynomial> =
        lp.ideal.generators().iter().map(lift).collect::<Result<_, _>>()?;
    let targets: Vec<Polynomial> = targets.iter().map(lift).collect::<Result<_, _>>()?;
    let inverted: Vec<(String, Polynomial)> = names
        .iter()
        .zip(&lp.inverted)
        .map(|(u, f)| Ok((u.clone(), lift(f)?)))
        .collect::<Result<_, PolyError>>()?;
    Ok(UnitCertificate { registry: ext, relations, targets, inverted, combiners: Vec::new() })
}

/// Decides whether `targets` have no common zero on the localized presentation,
/// producing a verified certificate when they do not.
pub fn is_unit(
    lp: &LocalizedPresentation,
    targets: &[Polynomial],
    budget: &Budget,
) -> Result<UnitVerdict, IdealError> {
    let mut cert = shell(lp, targets)?;
    let ext = cert.registry.clone();
    let gens = cert.generators();
    let n = gens.len();
    let full = Ideal { reg: ext.clone(), gens: gens.clone() };
    // decide cheaply first; cofactor tracking only pays off for units
    let plain = run_groebner(&full, &MonomialOrder::GrevLex, budget, false)?;
    if !plain.is_unit() {
        let base_len = lp.registry().len();
        let basis = plain.basis.iter().filter(|b| (base_len..ext.len()).all(|u| !b.uses_var(u))).cloned();
        return Ok(UnitVerdict::Proper { basis: basis.collect() });
    }
    let gb = run_groebner(&full, &MonomialOrder::GrevLex, budget, true)?;
    // Ideal::new dropped nothing (all generators nonzero), so indices align
    debug_assert_eq!(gb.inputs.len(), n);
    cert.combiners = gb.witness(&Polynomial::one(&ext)).expect("unit ideal");
    if !cert.verify() {
        return Err(IdealError::BadCertificate);
    }
    Ok(UnitVerdict::Unit(cert))
}

/// Certificate without Gröbner bases when some relation or target is a
/// nonzero constant times a monomial in inverted variables:
/// with `yₖ = uₖ·xₖ`, `1 = (∏uₖ/c)·t − Σₖ (∏_{j<k} yⱼ)·(yₖ − 1)`.
pub fn monomial_unit(lp: &LocalizedPresentation, targets: &[Polynomial]) -> Result<Option<UnitCertificate>, IdealError> {
    let inv_var: Vec<Option<usize>> = lp.inverted.iter().map(|f| f.as_variable()).collect();
    let is_unit_monomial = |g: &Polynomial| -> bool {
        g.num_terms() == 1
            && g.terms().all(|(m, _)| m.exps().iter().enumerate().all(|(v, &e)| e == 0 || inv_var.contains(&Some(v))))
    };
    let rel = lp.ideal.generators();
    let Some(pos) = rel.iter().chain(targets).position(is_unit_monomial) else { return Ok(None) };
    let mut cert = shell(lp, targets)?;
    let ext = cert.registry.clone();
    let base_len = lp.registry().len();
    let g = &rel.iter().chain(targets).nth(pos).unwrap();
    let (m, c) = g.terms().next().unwrap();
    let mut combiners = alloc::vec![Polynomial::zero(&ext); rel.len() + targets.len() + lp.inverted.len()];
    let one = Polynomial::one(&ext);
    let mut prefix = one.clone();
    let mut u_all = one.clone();
    for (v, &e) in m.exps().iter().enumerate().filter(|(_, &e)| e > 0) {
        let k = inv_var.iter().position(|&x| x == Some(v)).unwrap_or(0);
        let x = Polynomial::var_at(&ext, v);
        let u = Polynomial::var_at(&ext, base_len + k);
        let y = &u * &x;
        for _ in 0..e {
            combiners[rel.len() + targets.len() + k] = &combiners[rel.len() + targets.len() + k] - &prefix;
            prefix = &prefix * &y;
            u_all = &u_all * &u;
        }
    }
    combiners[pos] = u_all.scale(&(Coeff::from_integer(1.into()) / c));
    cert.combiners = combiners;
    if !cert.verify() {
        return Err(IdealError::BadCertificate);
    }
    Ok(Some(cert))
}

impl UnitCertificate {
    /// Builds a certificate from explicit combiners (e.g. assembled by a case
    /// split); fails unless it verifies.
    pub fn from_parts(
        registry: Arc<VarRegistry>,
        relations: Vec<Polynomial>,
        targets: Vec<Polynomial>,
        inverted: Vec<(String, Polynomial)>,
        combiners: Vec<Polynomial>,
    ) -> Result<Self, IdealError> {
        let c = UnitCertificate { registry, relations, targets, inverted, combiners };
        if c.verify() {
            Ok(c)
        } else {
            Err(IdealError::BadCertificate)
        }
    }
}

/// Searches small rational points (coordinates from `values`, at most
/// `max_support` nonzero) for a common zero of the relations and targets at
/// which no inverted element vanishes. Points are tried by increasing support.
pub fn search_rational_zero(
    lp: &LocalizedPresentation,
    targets: &[Polynomial],
    values: &[i64],
    max_support: usize,
) -> Option<Vec<Coeff>> {
    let n = lp.registry().len();
    let nonzero: Vec<Coeff> = values.iter().filter(|&&v| v != 0).map(|&v| crate::poly::q(v)).collect();
    let check = |pt: &[Coeff]| lp.admits_point(pt) && targets.iter().all(|t| t.evaluate(pt).is_zero());
    for support in 0..=max_support.min(n) {
        for vars in crate::poly::matrix::subsets(n, support) {
            let mut idx = alloc::vec![0usize; support];
            loop {
                let mut pt = alloc::vec![Coeff::zero(); n];
                for (k, &v) in vars.iter().enumerate() {
                    pt[v] = nonzero[idx[k]].clone();
                }
                if check(&pt) {
                    return Some(pt);
                }
                // odometer over value choices
                let mut k = 0;
                while k < support {
                    idx[k] += 1;
                    if idx[k] < nonzero.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == support {
                    break;
                }
            }
        }
    }
    None
}
