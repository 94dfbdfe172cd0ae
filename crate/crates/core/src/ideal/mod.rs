//! Ideals: Gröbner bases, membership with witnesses, elimination, saturation and
//! unit-ideal certificates under localization.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::poly::{PolyError, Polynomial, VarRegistry};

pub mod cert;
mod groebner;

pub use cert::{is_unit, monomial_unit, search_rational_zero, LocalizedPresentation, UnitCertificate, UnitVerdict};

use groebner::{Engine, GPoly, Order};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("budget exhausted after {spairs} S-pairs (degree {degree}); result inconclusive")]
    Inconclusive { spairs: u64, degree: u32 },
    #[error("the zero polynomial cannot be inverted")]
    ZeroInverted,
    #[error("cannot saturate by the zero polynomial")]
    ZeroSaturation,
    #[error("certificate does not expand to the claimed polynomial")]
    BadCertificate,
}

/// Resource limits for one Gröbner computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_spairs: u64,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_spairs: 1_000_000, max_degree: 40 }
    }
}

/// Term orders available to [`groebner`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic order by registry position.
    GrevLex,
    /// Block order eliminating the listed variables (grevlex inside each block).
    Eliminate(Vec<usize>),
    /// Grevlex with the given variable moved to the last (cheapest) position.
    GrevLexLast(usize),
}

impl MonomialOrder {
    fn order(&self, n: usize) -> Order {
        match self {
            MonomialOrder::GrevLex => Order::new(alloc::vec![(0..n).collect()]),
            MonomialOrder::Eliminate(drop) => {
                let rest = (0..n).filter(|v| !drop.contains(v)).collect();
                Order::new(alloc::vec![drop.clone(), rest])
            }
            MonomialOrder::GrevLexLast(v) => {
                let mut all: Vec<usize> = (0..n).filter(|x| x != v).collect();
                all.push(*v);
                Order::new(alloc::vec![all])
            }
        }
    }
}

/// Finitely generated ideal; zero generators are dropped (no generators means
/// the zero ideal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    reg: Arc<VarRegistry>,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(reg: &Arc<VarRegistry>, gens: Vec<Polynomial>) -> Result<Self, IdealError> {
        for g in &gens {
            if !g.registry().same_as(reg) {
                return Err(PolyError::RegistryMismatch.into());
            }
        }
        Ok(Ideal { reg: reg.clone(), gens: gens.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Ideal { reg: reg.clone(), gens: Vec::new() }
    }

    pub fn parse(reg: &Arc<VarRegistry>, gens: &[&str]) -> Result<Self, IdealError> {
        let polys = gens
            .iter()
            .map(|s| crate::poly::parse(s, reg).map_err(PolyError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(reg, polys)
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn with(&self, extra: &[Polynomial]) -> Result<Ideal, IdealError> {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ideal::new(&self.reg, gens)
    }

    /// Re-expresses the generators in another registry by variable name.
    pub fn embed(&self, target: &Arc<VarRegistry>) -> Result<Ideal, IdealError> {
        let gens = self.gens.iter().map(|g| g.embed(target)).collect::<Result<Vec<_>, _>>()?;
        Ideal::new(target, gens)
    }

    /// Same ideal, tested by mutual containment.
    pub fn same_ideal(&self, other: &Ideal, budget: &Budget) -> Result<bool, IdealError> {
        let a = groebner(self, &MonomialOrder::GrevLex, budget)?;
        let b = groebner(other, &MonomialOrder::GrevLex, budget)?;
        Ok(a.basis == b.basis)
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &Ideal, budget: &Budget) -> Result<bool, IdealError> {
        let gb = groebner(self, &MonomialOrder::GrevLex, budget)?;
        for g in other.generators() {
            if !gb.normal_form(&g.embed(&self.reg)?).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A reduced Gröbner basis together with the order it was computed for.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    reg: Arc<VarRegistry>,
    order: MonomialOrder,
    basis: Vec<Polynomial>,
    /// `cofactors[k][i]`: coefficient of input generator `i` in basis element `k`.
    cofactors: Option<Vec<Vec<Polynomial>>>,
    inputs: Vec<Polynomial>,
    spairs: u64,
}

impl GroebnerBasis {
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn spairs(&self) -> u64 {
        self.spairs
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    fn engine_view(&self) -> (Order, Vec<GPoly>) {
        let ord = self.order.order(self.reg.len());
        let gp = self.basis.iter().map(|b| GPoly::from_poly(b, &ord)).collect();
        (ord, gp)
    }

    /// Remainder of `f` on division by the basis (a deterministic function of
    /// the coset of `f`).
    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let (ord, basis) = self.engine_view();
        let e = Engine::with_basis(self.reg.len(), ord.clone(), basis);
        e.reduce(GPoly::from_poly(f, &ord), false).0.to_poly(&self.reg)
    }

    /// Combiners over the input generators when `f` lies in the ideal.
    fn witness(&self, f: &Polynomial) -> Option<Vec<Polynomial>> {
        let cofs = self.cofactors.as_ref()?;
        let (ord, basis) = self.engine_view();
        let n = self.reg.len();
        let e = Engine::with_basis(n, ord.clone(), basis);
        let (rem, quo) = e.reduce(GPoly::from_poly(f, &ord), true);
        if !rem.is_zero() {
            return None;
        }
        let q = e.quotient_list(&quo);
        // q is over basis elements; expand through the recorded cofactors
        let mut out = alloc::vec![Polynomial::zero(&self.reg); self.inputs.len()];
        for (k, qk) in q.iter().enumerate() {
            if qk.is_zero() {
                continue;
            }
            let qk = qk.to_poly(&self.reg);
            for (i, c) in cofs[k].iter().enumerate() {
                if !c.is_zero() {
                    out[i] = &out[i] + &(&qk * c);
                }
            }
        }
        Some(out)
    }
}

/// Reduced Gröbner basis of `ideal` for `order`.
pub fn groebner(ideal: &Ideal, order: &MonomialOrder, budget: &Budget) -> Result<GroebnerBasis, IdealError> {
    run_groebner(ideal, order, budget, false)
}

fn run_groebner(
    ideal: &Ideal,
    order: &MonomialOrder,
    budget: &Budget,
    track: bool,
) -> Result<GroebnerBasis, IdealError> {
    let n = ideal.reg.len();
    let ord = order.order(n);
    let inputs: Vec<GPoly> = ideal.gens.iter().map(|g| GPoly::from_poly(g, &ord)).collect();
    let mut engine = Engine::new(n, ord, track);
    engine.run(inputs, budget)?;
    let elems = engine.basis();
    let basis = elems.iter().map(|e| e.poly.to_poly(&ideal.reg)).collect();
    let cofactors = track.then(|| {
        elems
            .iter()
            .map(|e| e.cof.as_ref().expect("tracked").iter().map(|c| c.to_poly(&ideal.reg)).collect())
            .collect()
    });
    Ok(GroebnerBasis {
        reg: ideal.reg.clone(),
        order: order.clone(),
        basis,
        cofactors,
        inputs: ideal.gens.clone(),
        spairs: engine.spairs,
    })
}

/// `f = Σ combiners[i]·generators[i]`, re-checkable by expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub generators: Vec<Polynomial>,
    pub combiners: Vec<Polynomial>,
    pub target: Polynomial,
}

impl MembershipWitness {
    pub fn verify(&self) -> bool {
        if self.generators.len() != self.combiners.len() {
            return false;
        }
        let mut acc = Polynomial::zero(self.target.registry());
        for (g, c) in self.generators.iter().zip(&self.combiners) {
            match c.try_mul(g).and_then(|t| acc.try_add(&t)) {
                Ok(s) => acc = s,
                Err(_) => return false,
            }
        }
        acc == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(MembershipWitness),
    NotMember { remainder: Polynomial },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Ideal membership; a positive answer carries a verified witness.
pub fn contains(ideal: &Ideal, f: &Polynomial, budget: &Budget) -> Result<Membership, IdealError> {
    if !f.registry().same_as(&ideal.reg) {
        return Err(PolyError::RegistryMismatch.into());
    }
    let plain = groebner(ideal, &MonomialOrder::GrevLex, budget)?;
    let remainder = plain.normal_form(f);
    if !remainder.is_zero() {
        return Ok(Membership::NotMember { remainder });
    }
    let tracked = run_groebner(ideal, &MonomialOrder::GrevLex, budget, true)?;
    let combiners = tracked.witness(f).expect("normal form was zero");
    let w = MembershipWitness { generators: ideal.gens.clone(), combiners, target: f.clone() };
    if !w.verify() {
        return Err(IdealError::BadCertificate);
    }
    Ok(Membership::Member(w))
}

/// Generators of `ideal ∩ k[variables not in drop]`, in the original registry.
pub fn eliminate(ideal: &Ideal, drop: &[usize], budget: &Budget) -> Result<Ideal, IdealError> {
    let gb = groebner(ideal, &MonomialOrder::Eliminate(drop.to_vec()), budget)?;
    let kept = gb.basis.into_iter().filter(|g| drop.iter().all(|&v| !g.uses_var(v))).collect();
    Ideal::new(&ideal.reg, kept)
}

/// Like [`eliminate`] with variables given by name.
pub fn eliminate_names(ideal: &Ideal, drop: &[&str], budget: &Budget) -> Result<Ideal, IdealError> {
    let idx = drop
        .iter()
        .map(|n| ideal.reg.index_of(n).ok_or_else(|| PolyError::UnknownVariable(String::from(*n))))
        .collect::<Result<Vec<_>, _>>()?;
    eliminate(ideal, &idx, budget)
}

/// `(ideal : f^∞)`.
///
/// Saturation by a monomial is done one variable at a time; for homogeneous
/// ideals with Bayer's method (grevlex with that variable last, then strip its
/// powers from the basis), which is wrong without homogeneity. Everything else
/// goes through elimination of `u` from `⟨ideal, 1 − u·f⟩`.
pub fn saturate(ideal: &Ideal, f: &Polynomial, budget: &Budget) -> Result<Ideal, IdealError> {
    if f.is_zero() {
        return Err(IdealError::ZeroSaturation);
    }
    if !f.registry().same_as(&ideal.reg) {
        return Err(PolyError::RegistryMismatch.into());
    }
    if f.is_constant() {
        return Ok(ideal.clone());
    }
    if f.num_terms() == 1 {
        let (m, _) = f.leading_term().unwrap();
        let mut cur = ideal.clone();
        for (v, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                cur = saturate_by_variable(&cur, v, budget)?;
            }
        }
        return Ok(cur);
    }
    saturate_by_elimination(ideal, f, budget)
}

fn saturate_by_variable(ideal: &Ideal, v: usize, budget: &Budget) -> Result<Ideal, IdealError> {
    let homogeneous = ideal.gens.iter().all(|g| {
        let d = g.total_degree();
        g.terms().all(|(m, _)| m.degree() == d)
    });
    if !homogeneous {
        return saturate_by_elimination(ideal, &Polynomial::var_at(&ideal.reg, v), budget);
    }
    let gb = groebner(ideal, &MonomialOrder::GrevLexLast(v), budget)?;
    let gens = gb.basis.iter().map(|g| g.strip_var(v).1).collect();
    let stripped = Ideal::new(&ideal.reg, gens)?;
    // reduced form for stable output
    let out = groebner(&stripped, &MonomialOrder::GrevLex, budget)?;
    Ideal::new(&ideal.reg, out.basis)
}

/// Saturation through the auxiliary-variable elimination `⟨I, 1 − u·f⟩ ∩ R`.
pub fn saturate_by_elimination(ideal: &Ideal, f: &Polynomial, budget: &Budget) -> Result<Ideal, IdealError> {
    let u = ideal.reg.fresh_name("u_sat");
    let ext = ideal.reg.extended(&[u.as_str()])?;
    let uvar = Polynomial::var(&ext, &u)?;
    let mut gens: Vec<Polynomial> = ideal.gens.iter().map(|g| g.embed(&ext)).collect::<Result<_, _>>()?;
    gens.push(&Polynomial::one(&ext) - &(&uvar * &f.embed(&ext)?));
    let big = Ideal::new(&ext, gens)?;
    let elim = eliminate(&big, &[ext.len() - 1], budget)?;
    let back = elim.embed(&ideal.reg)?;
    let out = groebner(&back, &MonomialOrder::GrevLex, budget)?;
    Ideal::new(&ideal.reg, out.basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn reg3() -> Arc<VarRegistry> {
        VarRegistry::new(["x", "y", "z"]).unwrap()
    }

    fn p(r: &Arc<VarRegistry>, s: &str) -> Polynomial {
        parse(s, r).unwrap()
    }

    #[test]
    fn principal_and_inconsistent() {
        let r = reg3();
        let b = Budget::default();
        let gb = groebner(&Ideal::parse(&r, &["x"]).unwrap(), &MonomialOrder::GrevLex, &b).unwrap();
        assert_eq!(gb.basis(), &[p(&r, "x")]);
        let gb = groebner(&Ideal::parse(&r, &["x*y - 1", "x"]).unwrap(), &MonomialOrder::GrevLex, &b).unwrap();
        assert!(gb.is_unit());
        assert_eq!(gb.basis(), &[Polynomial::one(&r)]);
    }

    #[test]
    fn normal_forms_in_x2_minus_y() {
        // hand computation: {x^2 - y, x*y, y^2} is the reduced basis
        let r = reg3();
        let b = Budget::default();
        let gb = groebner(&Ideal::parse(&r, &["x^2 - y", "x^3"]).unwrap(), &MonomialOrder::GrevLex, &b).unwrap();
        for f in ["x^3", "x*y", "y^2"] {
            assert!(gb.normal_form(&p(&r, f)).is_zero(), "{f}");
        }
        assert_eq!(gb.normal_form(&p(&r, "x")), p(&r, "x"));
        assert_eq!(gb.basis().len(), 3);
    }

    #[test]
    fn groebner_is_idempotent() {
        let r = reg3();
        let b = Budget::default();
        let i = Ideal::parse(&r, &["x^2 + y*z - 1", "x*y - z^2", "y^3 - x"]).unwrap();
        let g1 = groebner(&i, &MonomialOrder::GrevLex, &b).unwrap();
        let again = Ideal::new(&r, g1.basis().to_vec()).unwrap();
        let g2 = groebner(&again, &MonomialOrder::GrevLex, &b).unwrap();
        assert_eq!(g1.basis(), g2.basis());
    }

    #[test]
    fn membership_with_witness() {
        let r = reg3();
        let b = Budget::default();
        let i = Ideal::parse(&r, &["x^2 - y", "x*z - 1"]).unwrap();
        let f = p(&r, "y*z^2 - 1");
        match contains(&i, &f, &b).unwrap() {
            Membership::Member(w) => assert!(w.verify()),
            other => panic!("{other:?}"),
        }
        let sq = Ideal::parse(&r, &["x^2"]).unwrap();
        assert!(!contains(&sq, &p(&r, "x"), &b).unwrap().is_member());
        assert!(contains(&sq, &p(&r, "x^2*y"), &b).unwrap().is_member());
    }

    #[test]
    fn elimination_examples() {
        let b = Budget::default();
        let r = VarRegistry::new(["u", "x", "y"]).unwrap();
        let e = eliminate_names(&Ideal::parse(&r, &["y - x^2"]).unwrap(), &["y"], &b).unwrap();
        assert!(e.is_zero_ideal());
        let e = eliminate_names(&Ideal::parse(&r, &["1 - u*x"]).unwrap(), &["u"], &b).unwrap();
        assert!(e.is_zero_ideal());
        let e = eliminate_names(&Ideal::parse(&r, &["1 - u*x", "x"]).unwrap(), &["u"], &b).unwrap();
        assert_eq!(e.generators(), &[Polynomial::one(&r)]);
        let e = eliminate_names(&Ideal::parse(&r, &["u*x - 1", "u*y"]).unwrap(), &["u"], &b).unwrap();
        assert_eq!(e.generators(), &[p(&r, "y")]);
    }

    #[test]
    fn saturation_examples() {
        let r = reg3();
        let b = Budget::default();
        let s = saturate(&Ideal::parse(&r, &["x*y"]).unwrap(), &p(&r, "x"), &b).unwrap();
        assert_eq!(s.generators(), &[p(&r, "y")]);
        // ⟨x²y, xy²⟩ = ⟨x⟩∩⟨y⟩∩⟨x²,y²⟩-ish; saturating by xy leaves the unit ideal
        let s = saturate(&Ideal::parse(&r, &["x^2*y", "x*y^2"]).unwrap(), &p(&r, "x*y"), &b).unwrap();
        assert_eq!(s.generators(), &[Polynomial::one(&r)]);
        // both saturation routes agree on a non-monomial f
        let i = Ideal::parse(&r, &["(x + y)*z", "(x + y)^2*x"]).unwrap();
        let f = p(&r, "x + y");
        let a = saturate(&i, &f, &b).unwrap();
        assert!(a.same_ideal(&Ideal::parse(&r, &["x", "z"]).unwrap(), &b).unwrap());
        let i = Ideal::parse(&r, &["x*z - y*z", "z^2"]).unwrap();
        // inhomogeneous: stripping x from a basis of ⟨xz, z − xy⟩ would be wrong
        let inh = Ideal::parse(&r, &["x*z", "z - x*y"]).unwrap();
        let s = saturate(&inh, &p(&r, "x"), &b).unwrap();
        assert!(s.same_ideal(&Ideal::parse(&r, &["y", "z"]).unwrap(), &b).unwrap());
        let a = saturate(&i, &p(&r, "z"), &b).unwrap();
        let c = saturate_by_elimination(&i, &p(&r, "z"), &b).unwrap();
        assert!(a.same_ideal(&c, &b).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let r = reg3();
        let tight = Budget { max_spairs: 1, max_degree: 40 };
        let i = Ideal::parse(&r, &["x^2 + y*z - 1", "x*y - z^2", "y^3 - x"]).unwrap();
        assert!(matches!(
            groebner(&i, &MonomialOrder::GrevLex, &tight),
            Err(IdealError::Inconclusive { .. })
        ));
    }
}
