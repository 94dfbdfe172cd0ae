//! Torus-weighted chart presentations of the blow-up tower.
//!
//! A chart is an affine space with coordinates carrying `G_m^r` weights, cut
//! out by equations, with closed loci removed, and with `p` represented by the
//! product of the monomial-relation variables (the last of which is `P`).

mod action;
mod blowup;
mod tower;

pub use action::{covering_check, standard_elements, CoveringOutcome, SymplecticElement};
pub use blowup::{blowup_step, compare_charts, compose_parent, restrict_to_open, CenterSpec, ChartComparison, EquationMatch};
pub use tower::{pullback_check, strict_transform, total_substitution, PullbackReport, Tower};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::ideal::{Ideal, IdealError};
use crate::poly::{Monomial, PolyError, Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("first center generator must be the chart's P variable `{expected}`")]
    NotPVariable { expected: String },
    #[error("center is for chart `{center}`, not `{chart}`")]
    WrongChart { center: String, chart: String },
    #[error("name `{0}` is already in use")]
    NameCollision(String),
    #[error("expected {expected} fresh names, got {got}")]
    FreshNameCount { expected: usize, got: usize },
    #[error("center generator {0} is not torus-homogeneous")]
    InhomogeneousCenter(String),
    #[error("denominator `{0}` is not a constant times a monomial in unit variables")]
    BadDenominator(String),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("chart `{0}` has no parent")]
    NoParent(String),
    #[error("`{ancestor}` is not an ancestor of `{chart}`")]
    NotAncestor { ancestor: String, chart: String },
    #[error("variable `{0}` has {1} weights, torus rank is {2}")]
    WeightLength(String, usize, usize),
    #[error("cannot match `{0}` between the charts")]
    Renaming(String),
    #[error("action is not polynomial on this chart: {0}")]
    NotPolynomial(String),
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
}

/// Parent chart name and the map of parent coordinates into this chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentMap {
    pub name: String,
    pub substitution: BTreeMap<String, Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartPresentation {
    pub name: String,
    pub reg: Arc<VarRegistry>,
    pub torus_rank: usize,
    /// One weight vector (length `torus_rank`) per registry variable.
    pub weights: Vec<Vec<i64>>,
    /// Registry indices whose product is `p`; the last one is `P`.
    pub monomial: Vec<usize>,
    pub equations: Vec<Polynomial>,
    pub excluded: Vec<Ideal>,
    pub parent: Option<ParentMap>,
}

/// Ambient dimensions of the tower charts.
pub fn expected_ambient(name: &str) -> Option<usize> {
    Some(match name {
        "T0" => 8,
        "T1" => 9,
        "T2" => 11,
        "T3" => 15,
        "T4" => 16,
        "T5" => 18,
        _ => return None,
    })
}

impl ChartPresentation {
    pub fn var(&self, name: &str) -> Result<Polynomial, PolyError> {
        Polynomial::var(&self.reg, name)
    }

    pub fn p_index(&self) -> usize {
        *self.monomial.last().expect("nonempty monomial relation")
    }

    pub fn p_var(&self) -> Polynomial {
        Polynomial::var_at(&self.reg, self.p_index())
    }

    /// Monomial-relation variables other than `P`.
    pub fn scaling_indices(&self) -> &[usize] {
        &self.monomial[..self.monomial.len() - 1]
    }

    /// The product of the monomial-relation variables (the image of `p`).
    pub fn p_monomial(&self) -> Polynomial {
        let mut e = alloc::vec![0u16; self.reg.len()];
        for &i in &self.monomial {
            e[i] += 1;
        }
        Polynomial::monomial(&self.reg, Monomial::from_exps(e), crate::poly::q(1))
    }

    /// Variables `v` with `{v = 0}` excluded, hence units on the chart.
    pub fn unit_variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.excluded {
            if let [g] = e.generators() {
                if let Some(v) = g.as_variable() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    pub fn weight_of_monomial(&self, m: &Monomial) -> Vec<i64> {
        let mut w = alloc::vec![0i64; self.torus_rank];
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                for (k, wk) in w.iter_mut().enumerate() {
                    *wk += self.weights[i][k] * e as i64;
                }
            }
        }
        w
    }

    /// The common weight of all terms, or the first term deviating from the
    /// leading term's weight.
    pub fn homogeneous_weight(&self, f: &Polynomial) -> Result<Option<Vec<i64>>, (Monomial, Vec<i64>)> {
        let mut it = f.terms();
        let Some((m0, _)) = it.next() else { return Ok(None) };
        let w0 = self.weight_of_monomial(m0);
        for (m, _) in it {
            let w = self.weight_of_monomial(m);
            if w != w0 {
                return Err((m.clone(), w));
            }
        }
        Ok(Some(w0))
    }

    /// Equations as an ideal.
    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.reg, self.equations.clone()).expect("chart polynomials share the registry")
    }

    /// Excluded loci as generator lists.
    pub fn exclusion_lists(&self) -> Vec<Vec<Polynomial>> {
        self.excluded.iter().map(|e| e.generators().to_vec()).collect()
    }

    /// Emptiness problem for `targets` on this chart.
    pub fn cover_problem(&self, targets: Vec<Polynomial>) -> crate::cover::CoverProblem {
        crate::cover::CoverProblem {
            reg: self.reg.clone(),
            relations: self.equations.clone(),
            exclusions: self.exclusion_lists(),
            inverted: Vec::new(),
            targets,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WeightLength { var: String, len: usize },
    /// Term of an equation whose weight differs from the equation's leading term.
    InhomogeneousEquation { index: usize, term: String, weight: Vec<i64>, expected: Vec<i64> },
    InhomogeneousExclusion { exclusion: usize, generator: String, term: String },
    MonomialWeight { monomial: String, weight: Vec<i64> },
    RepeatedMonomialVariable(String),
    EmptyMonomial,
    Ambient { expected: usize, found: usize },
    SubstitutionTarget { var: String },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::WeightLength { var, len } => write!(f, "variable {var} has {len} weights"),
            Violation::InhomogeneousEquation { index, term, weight, expected } => {
                write!(f, "equation {index}: term {term} has weight {weight:?}, expected {expected:?}")
            }
            Violation::InhomogeneousExclusion { exclusion, generator, term } => {
                write!(f, "exclusion {exclusion}: generator {generator} is inhomogeneous at {term}")
            }
            Violation::MonomialWeight { monomial, weight } => {
                write!(f, "monomial {monomial} has weight {weight:?}, expected zero")
            }
            Violation::RepeatedMonomialVariable(v) => write!(f, "monomial variable {v} repeated"),
            Violation::EmptyMonomial => write!(f, "empty monomial relation"),
            Violation::Ambient { expected, found } => write!(f, "ambient dimension {found}, expected {expected}"),
            Violation::SubstitutionTarget { var } => write!(f, "substitution image of {var} is in another registry"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub chart: String,
    pub ambient: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn term_string(reg: &Arc<VarRegistry>, m: &Monomial) -> String {
    Polynomial::monomial(reg, m.clone(), crate::poly::q(1)).to_string()
}

/// Checks the structural invariants. Equations must be torus-homogeneous (all
/// terms of one weight); the monomial relation must have weight zero.
pub fn validate(c: &ChartPresentation) -> ValidationReport {
    let mut v = Vec::new();
    let lengths_ok = c.weights.len() == c.reg.len() && c.weights.iter().all(|w| w.len() == c.torus_rank);
    if !lengths_ok {
        for (i, name) in c.reg.names().iter().enumerate() {
            let len = c.weights.get(i).map_or(0, |w| w.len());
            if len != c.torus_rank {
                v.push(Violation::WeightLength { var: name.clone(), len });
            }
        }
    }
    if c.monomial.is_empty() {
        v.push(Violation::EmptyMonomial);
    }
    for (k, &i) in c.monomial.iter().enumerate() {
        if c.monomial[..k].contains(&i) {
            v.push(Violation::RepeatedMonomialVariable(c.reg.name(i).into()));
        }
    }
    if lengths_ok {
        for (index, f) in c.equations.iter().enumerate() {
            if let Err((m, weight)) = c.homogeneous_weight(f) {
                let expected = c.weight_of_monomial(f.leading_term().unwrap().0);
                v.push(Violation::InhomogeneousEquation { index, term: term_string(&c.reg, &m), weight, expected });
            }
        }
        for (k, e) in c.excluded.iter().enumerate() {
            for g in e.generators() {
                if let Err((m, _)) = c.homogeneous_weight(g) {
                    v.push(Violation::InhomogeneousExclusion {
                        exclusion: k,
                        generator: g.to_string(),
                        term: term_string(&c.reg, &m),
                    });
                }
            }
        }
        if !c.monomial.is_empty() {
            let pm = c.p_monomial();
            let weight = c.weight_of_monomial(pm.leading_term().unwrap().0);
            if weight.iter().any(|&x| x != 0) {
                v.push(Violation::MonomialWeight { monomial: pm.to_string(), weight });
            }
        }
    }
    if let Some(expected) = expected_ambient(&c.name) {
        if expected != c.reg.len() {
            v.push(Violation::Ambient { expected, found: c.reg.len() });
        }
    }
    if let Some(parent) = &c.parent {
        for (var, img) in &parent.substitution {
            if !img.registry().same_as(&c.reg) {
                v.push(Violation::SubstitutionTarget { var: var.clone() });
            }
        }
    }
    ValidationReport { chart: c.name.clone(), ambient: c.reg.len(), violations: v }
}

/// Rewrites `f` into `target` through a variable renaming (names absent from
/// `map` keep their name).
pub fn rename(f: &Polynomial, map: &BTreeMap<String, String>, target: &Arc<VarRegistry>) -> Result<Polynomial, PolyError> {
    let mut bindings = BTreeMap::new();
    for name in f.registry().names() {
        if let Some(new) = map.get(name) {
            bindings.insert(name.clone(), Polynomial::var(target, new)?);
        }
    }
    f.substitute(&bindings, target)
}

/// Removes factors that are unit variables, unless nothing else is left.
pub fn strip_units(f: &Polynomial, units: &[usize]) -> Polynomial {
    let mut g = f.clone();
    for &u in units {
        g = g.strip_var(u).1;
    }
    if g.is_constant() {
        f.clone()
    } else {
        g
    }
}
