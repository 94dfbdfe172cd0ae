//! Emptiness proofs on a chart minus closed sets, by case splits over the
//! excluded loci.
//!
//! A point of `chart ∖ ⋃ V(E_k)` has, for every exclusion `E_k = (g_0, …, g_m)`,
//! a first nonvanishing generator. Splitting on `E_k` therefore yields branches
//! `i = 0..=m` where `g_i` is inverted and `g_0, …, g_{i−1}` vanish. Each leaf is
//! a [`UnitCertificate`] for its branch.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::ideal::{is_unit, Budget, Ideal, IdealError, LocalizedPresentation, UnitCertificate, UnitVerdict};
use crate::poly::{matrix::subsets, Coeff, Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverProof {
    Leaf(UnitCertificate),
    /// Branch `i` inverts generator `i` of exclusion `exclusion` and assumes the
    /// earlier generators vanish.
    Split { exclusion: usize, branches: Vec<CoverProof> },
}

impl CoverProof {
    pub fn leaves(&self) -> Vec<&UnitCertificate> {
        match self {
            CoverProof::Leaf(c) => alloc::vec![c],
            CoverProof::Split { branches, .. } => branches.iter().flat_map(|b| b.leaves()).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CoverProof::Leaf(_) => 0,
            CoverProof::Split { branches, .. } => 1 + branches.iter().map(|b| b.depth()).max().unwrap_or(0),
        }
    }
}

/// A branch on which no certificate exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub inverted: Vec<Polynomial>,
    pub assumed_zero: Vec<Polynomial>,
    /// Gröbner basis of the branch system (base variables only).
    pub basis: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverOutcome {
    Proved(CoverProof),
    Obstructed(Obstruction),
}

/// Show that `targets` have no common zero on `V(relations) ∖ ⋃ V(exclusions)`
/// where `inverted` are additionally units.
#[derive(Debug, Clone)]
pub struct CoverProblem {
    pub reg: Arc<VarRegistry>,
    pub relations: Vec<Polynomial>,
    pub exclusions: Vec<Vec<Polynomial>>,
    pub inverted: Vec<Polynomial>,
    pub targets: Vec<Polynomial>,
}

struct Branch {
    assumed: Vec<Polynomial>,
    inverted: Vec<Polynomial>,
}

impl CoverProblem {
    /// Units available everywhere: declared inverses plus singleton exclusions.
    fn base_units(&self) -> Vec<Polynomial> {
        let mut u = self.inverted.clone();
        for e in &self.exclusions {
            if e.len() == 1 && !u.contains(&e[0]) {
                u.push(e[0].clone());
            }
        }
        u
    }

    fn split_candidates(&self, order: Option<&[usize]>) -> Vec<usize> {
        match order {
            Some(o) => o.to_vec(),
            None => (0..self.exclusions.len()).filter(|&k| self.exclusions[k].len() > 1).collect(),
        }
    }

    fn leaf_presentation(&self, br: &Branch) -> Result<LocalizedPresentation, IdealError> {
        let mut rel = self.relations.clone();
        rel.extend(br.assumed.iter().cloned());
        LocalizedPresentation::new(Ideal::new(&self.reg, rel)?, br.inverted.clone())
    }

    /// Searches a case-split proof, splitting exclusions in `order` (default:
    /// every non-singleton exclusion in list order) until each branch is a unit.
    pub fn solve(&self, order: Option<&[usize]>, budget: &Budget) -> Result<CoverOutcome, IdealError> {
        let queue = self.split_candidates(order);
        let root = Branch { assumed: Vec::new(), inverted: self.base_units() };
        self.solve_branch(&root, &queue, budget)
    }

    fn solve_branch(&self, br: &Branch, queue: &[usize], budget: &Budget) -> Result<CoverOutcome, IdealError> {
        let lp = self.leaf_presentation(br)?;
        let verdict = is_unit(&lp, &self.targets, budget)?;
        let basis = match verdict {
            UnitVerdict::Unit(c) => return Ok(CoverOutcome::Proved(CoverProof::Leaf(c))),
            UnitVerdict::Proper { basis } => basis,
        };
        let Some((&k, rest)) = queue.split_first() else {
            return Ok(CoverOutcome::Obstructed(Obstruction {
                inverted: br.inverted.clone(),
                assumed_zero: br.assumed.clone(),
                basis,
            }));
        };
        let gens = &self.exclusions[k];
        let mut branches = Vec::with_capacity(gens.len());
        for i in 0..gens.len() {
            let mut assumed = br.assumed.clone();
            assumed.extend(gens[..i].iter().cloned());
            let mut inverted = br.inverted.clone();
            inverted.push(gens[i].clone());
            match self.solve_branch(&Branch { assumed, inverted }, rest, budget)? {
                CoverOutcome::Proved(p) => branches.push(p),
                obstructed => return Ok(obstructed),
            }
        }
        Ok(CoverOutcome::Proved(CoverProof::Split { exclusion: k, branches }))
    }

    /// Re-checks a proof by pure arithmetic: the split structure matches the
    /// exclusions and every leaf certificate expands to 1 for its branch.
    pub fn verify(&self, proof: &CoverProof) -> bool {
        let root = Branch { assumed: Vec::new(), inverted: self.base_units() };
        self.verify_branch(&root, proof)
    }

    fn verify_branch(&self, br: &Branch, proof: &CoverProof) -> bool {
        match proof {
            CoverProof::Leaf(cert) => {
                let ext = cert.registry();
                let lift = |ps: &[Polynomial]| -> Option<Vec<Polynomial>> {
                    ps.iter().map(|p| p.embed(ext).ok()).collect()
                };
                let mut rel = self.relations.clone();
                rel.extend(br.assumed.iter().cloned());
                let (Some(rel), Some(tg), Some(inv)) = (lift(&rel), lift(&self.targets), lift(&br.inverted)) else {
                    return false;
                };
                let cert_inv: Vec<Polynomial> = cert.inverted().iter().map(|(_, f)| f.clone()).collect();
                cert.relations() == rel.as_slice()
                    && cert.targets() == tg.as_slice()
                    && cert_inv == inv
                    && cert.verify()
            }
            CoverProof::Split { exclusion, branches } => {
                let Some(gens) = self.exclusions.get(*exclusion) else { return false };
                if gens.len() != branches.len() {
                    return false;
                }
                branches.iter().enumerate().all(|(i, b)| {
                    let mut assumed = br.assumed.clone();
                    assumed.extend(gens[..i].iter().cloned());
                    let mut inverted = br.inverted.clone();
                    inverted.push(gens[i].clone());
                    self.verify_branch(&Branch { assumed, inverted }, b)
                })
            }
        }
    }

    /// True iff `pt` lies in the open chart, satisfies the relations and the
    /// targets, and no declared inverse vanishes there.
    pub fn is_witness_point(&self, pt: &[Coeff]) -> bool {
        self.relations.iter().all(|g| g.evaluate(pt).is_zero())
            && self.targets.iter().all(|g| g.evaluate(pt).is_zero())
            && self.inverted.iter().all(|g| !g.evaluate(pt).is_zero())
            && self.exclusions.iter().all(|e| e.iter().any(|g| !g.evaluate(pt).is_zero()))
    }

    /// Exact search for a rational point refuting emptiness: coordinates from
    /// `values`, by increasing number of nonzero coordinates.
    pub fn find_point(&self, values: &[i64], max_support: usize) -> Option<Vec<Coeff>> {
        let all: Vec<usize> = (0..self.reg.len()).collect();
        self.find_point_among(values, max_support, &all)
    }

    /// Like [`find_point`](Self::find_point), with only the variables in
    /// `vars` allowed to be nonzero.
    pub fn find_point_among(&self, values: &[i64], max_support: usize, vars: &[usize]) -> Option<Vec<Coeff>> {
        let n = self.reg.len();
        let nonzero: Vec<Coeff> = values.iter().filter(|&&v| v != 0).map(|&v| crate::poly::q(v)).collect();
        let zero = alloc::vec![Coeff::zero(); n];
        if self.is_witness_point(&zero) {
            return Some(zero);
        }
        if nonzero.is_empty() {
            return None;
        }
        for support in 1..=max_support.min(vars.len()) {
            for pick in subsets(vars.len(), support) {
                let mut idx = alloc::vec![0usize; support];
                loop {
                    let mut pt = zero.clone();
                    for (k, &v) in pick.iter().enumerate() {
                        pt[vars[v]] = nonzero[idx[k]].clone();
                    }
                    if self.is_witness_point(&pt) {
                        return Some(pt);
                    }
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn split_proves_emptiness() {
        let r = reg();
        let p = |s: &str| parse(s, &r).unwrap();
        let prob = CoverProblem {
            reg: r.clone(),
            relations: alloc::vec![p("x*z - 1")],
            exclusions: alloc::vec![alloc::vec![p("x"), p("y")]],
            inverted: Vec::new(),
            targets: alloc::vec![p("x*y")],
        };
        // x is a unit from the relation, so x*y = 0 forces y = 0; not empty
        match prob.solve(None, &Budget::default()).unwrap() {
            CoverOutcome::Obstructed(o) => assert!(!o.inverted.is_empty()),
            other => panic!("{other:?}"),
        }
        let pt = prob.find_point(&[0, 1, -1], 3).unwrap();
        assert!(prob.is_witness_point(&pt));
    }

    #[test]
    fn needs_both_branches() {
        // x*y = x - y = 0 only at the origin, which is excluded
        let r = reg();
        let p = |s: &str| parse(s, &r).unwrap();
        let prob = CoverProblem {
            reg: r.clone(),
            relations: Vec::new(),
            exclusions: alloc::vec![alloc::vec![p("x"), p("y")]],
            inverted: Vec::new(),
            targets: alloc::vec![p("x*y"), p("x - y")],
        };
        match prob.solve(None, &Budget::default()).unwrap() {
            CoverOutcome::Proved(proof) => {
                assert_eq!(proof.depth(), 1);
                assert_eq!(proof.leaves().len(), 2);
                assert!(prob.verify(&proof));
                assert!(prob.find_point(&[0, 1, -1], 3).is_none());
                // a proof for a different target list does not check
                let other = CoverProblem { targets: alloc::vec![p("x*y")], ..prob.clone() };
                assert!(!other.verify(&proof));
            }
            other => panic!("{other:?}"),
        }
    }
}
