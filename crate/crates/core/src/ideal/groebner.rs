//! Buchberger's algorithm with the Gebauer–Möller criteria, sugar pair selection
//! and optional cofactor tracking.
//!
//! Polynomials are kept here as term vectors sorted decreasingly for an arbitrary
//! block-graded-reverse-lexicographic order, independent of the storage order of
//! [`Polynomial`].

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use super::{Budget, IdealError};
use crate::poly::{Coeff, Monomial, Polynomial, VarRegistry};

pub(crate) type Mono = Vec<u16>;

/// Term order: blocks of variables compared one after another, each block by
/// degree then reverse lexicographically.
#[derive(Clone, Debug)]
pub(crate) struct Order {
    blocks: Vec<Vec<usize>>,
}

impl Order {
    pub(crate) fn new(blocks: Vec<Vec<usize>>) -> Self {
        Order { blocks }
    }

    pub(crate) fn cmp(&self, a: &[u16], b: &[u16]) -> Ordering {
        for block in &self.blocks {
            let da: u32 = block.iter().map(|&v| a[v] as u32).sum();
            let db: u32 = block.iter().map(|&v| b[v] as u32).sum();
            if da != db {
                return da.cmp(&db);
            }
            for &v in block.iter().rev() {
                if a[v] != b[v] {
                    return b[v].cmp(&a[v]);
                }
            }
        }
        Ordering::Equal
    }
}

/// Terms in strictly decreasing order.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct GPoly(pub(crate) Vec<(Mono, Coeff)>);

fn mono_mul(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_div(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mono_lcm(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn mono_coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn mono_deg(a: &[u16]) -> u32 {
    a.iter().map(|&e| e as u32).sum()
}

impl GPoly {
    pub(crate) fn from_poly(p: &Polynomial, ord: &Order) -> Self {
        let mut t: Vec<(Mono, Coeff)> =
            p.raw_terms().iter().map(|(m, c)| (m.exps().to_vec(), c.clone())).collect();
        t.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        GPoly(t)
    }

    pub(crate) fn to_poly(&self, reg: &Arc<VarRegistry>) -> Polynomial {
        Polynomial::from_terms(reg, self.0.iter().map(|(m, c)| (Monomial::from_exps(m.clone()), c.clone())))
    }

    fn from_unsorted(mut t: Vec<(Mono, Coeff)>, ord: &Order) -> Self {
        t.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        let mut out: Vec<(Mono, Coeff)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        GPoly(out)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lm(&self) -> &Mono {
        &self.0[0].0
    }

    fn lc(&self) -> &Coeff {
        &self.0[0].1
    }

    fn scale(&mut self, c: &Coeff) {
        for (_, x) in self.0.iter_mut() {
            *x *= c;
        }
    }

    /// `self − c·m·other`.
    fn sub_mul(&self, c: &Coeff, m: &[u16], other: &GPoly, ord: &Order) -> GPoly {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut i = 0;
        let mut it = other.0.iter().map(|(om, oc)| (mono_mul(om, m), -(oc * c))).peekable();
        while i < self.0.len() || it.peek().is_some() {
            let take_self = match (self.0.get(i), it.peek()) {
                (Some(a), Some(b)) => match ord.cmp(&a.0, &b.0) {
                    Ordering::Greater => Some(true),
                    Ordering::Less => Some(false),
                    Ordering::Equal => None,
                },
                (Some(_), None) => Some(true),
                (None, Some(_)) => Some(false),
                (None, None) => unreachable!(),
            };
            match take_self {
                Some(true) => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Some(false) => out.push(it.next().unwrap()),
                None => {
                    let (m2, c2) = it.next().unwrap();
                    let s = &self.0[i].1 + c2;
                    if !s.is_zero() {
                        out.push((m2, s));
                    }
                    i += 1;
                }
            }
        }
        GPoly(out)
    }

    fn mul(&self, other: &GPoly, ord: &Order) -> GPoly {
        let mut t = Vec::with_capacity(self.0.len() * other.0.len());
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                t.push((mono_mul(m1, m2), c1 * c2));
            }
        }
        GPoly::from_unsorted(t, ord)
    }

    fn add(&self, other: &GPoly, ord: &Order) -> GPoly {
        let mut t = self.0.clone();
        t.extend(other.0.iter().cloned());
        GPoly::from_unsorted(t, ord)
    }
}

/// A basis element with its expression in the input generators.
#[derive(Clone, Debug)]
pub(crate) struct Elem {
    pub(crate) poly: GPoly,
    pub(crate) cof: Option<Vec<GPoly>>,
    sugar: u32,
}

/// Quotients accumulated during a reduction, keyed by basis index.
pub(crate) type Quotients = BTreeMap<usize, Vec<(Mono, Coeff)>>;

pub(crate) struct Engine {
    pub(crate) n: usize,
    pub(crate) ord: Order,
    pub(crate) ninputs: usize,
    track: bool,
    pub(crate) elems: Vec<Elem>,
    active: Vec<usize>,
    pub(crate) spairs: u64,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
    sugar: u32,
}

impl Engine {
    pub(crate) fn new(n: usize, ord: Order, track: bool) -> Self {
        Engine { n, ord, ninputs: 0, track, elems: Vec::new(), active: Vec::new(), spairs: 0 }
    }

    fn unit_cof(&self, k: usize) -> Vec<GPoly> {
        let mut v = alloc::vec![GPoly::default(); self.ninputs];
        v[k] = GPoly(alloc::vec![(alloc::vec![0; self.n], Coeff::one())]);
        v
    }

    /// Full reduction of `f` by the active basis. Returns the remainder and the
    /// quotients per basis element.
    pub(crate) fn reduce(&self, f: GPoly, track: bool) -> (GPoly, Quotients) {
        let mut p = f;
        let mut rem: Vec<(Mono, Coeff)> = Vec::new();
        let mut quo: Quotients = BTreeMap::new();
        let mut start = 0usize;
        loop {
            if start > 0 && start * 2 > p.0.len() {
                p.0.drain(..start);
                start = 0;
            }
            let Some((lm, lc)) = p.0.get(start).cloned() else { break };
            let divisor = self.active.iter().copied().find(|&k| mono_divides(self.elems[k].poly.lm(), &lm));
            match divisor {
                Some(k) => {
                    let g = &self.elems[k].poly;
                    let m = mono_div(&lm, g.lm());
                    let c = lc / g.lc();
                    if track {
                        quo.entry(k).or_default().push((m.clone(), c.clone()));
                    }
                    let tail = GPoly(p.0.split_off(start));
                    let reduced = tail.sub_mul(&c, &m, g, &self.ord);
                    debug_assert!(reduced.0.first().map(|t| t.0 != lm).unwrap_or(true));
                    p.0.truncate(start);
                    p.0.extend(reduced.0);
                }
                None => {
                    rem.push((lm, lc));
                    start += 1;
                }
            }
        }
        (GPoly(rem), quo)
    }

    /// Cofactors of `Σ q_k·elem_k + base`.
    fn combine(&self, base: Option<Vec<GPoly>>, quo: &Quotients, sign: &Coeff) -> Vec<GPoly> {
        let mut out = base.unwrap_or_else(|| alloc::vec![GPoly::default(); self.ninputs]);
        for (&k, terms) in quo {
            let q = GPoly::from_unsorted(terms.clone(), &self.ord);
            let cof = self.elems[k].cof.as_ref().expect("tracking enabled");
            for (slot, c) in out.iter_mut().zip(cof) {
                if c.is_zero() {
                    continue;
                }
                let mut prod = q.mul(c, &self.ord);
                prod.scale(sign);
                *slot = slot.add(&prod, &self.ord);
            }
        }
        out
    }

    /// Engine whose active basis is `basis` (assumed to be a Gröbner basis).
    pub(crate) fn with_basis(n: usize, ord: Order, basis: Vec<GPoly>) -> Self {
        let elems: Vec<Elem> = basis.into_iter().map(|poly| Elem { poly, cof: None, sugar: 0 }).collect();
        let active = (0..elems.len()).collect();
        Engine { n, ord, ninputs: 0, track: false, elems, active, spairs: 0 }
    }

    /// Quotient polynomials of a reduction, as a dense list over basis indices.
    pub(crate) fn quotient_list(&self, quo: &Quotients) -> Vec<GPoly> {
        let mut out = alloc::vec![GPoly::default(); self.elems.len()];
        for (&k, terms) in quo {
            out[k] = GPoly::from_unsorted(terms.clone(), &self.ord);
        }
        out
    }

    pub(crate) fn run(&mut self, inputs: Vec<GPoly>, budget: &Budget) -> Result<(), IdealError> {
        self.ninputs = inputs.len();
        let mut pairs: Vec<Pair> = Vec::new();
        // seed with the inputs, reduced against what is already present
        let mut order: Vec<usize> = (0..inputs.len()).filter(|&k| !inputs[k].is_zero()).collect();
        order.sort_by(|&a, &b| self.ord.cmp(inputs[a].lm(), inputs[b].lm()));
        for k in order {
            let f = inputs[k].clone();
            let sugar = f.0.iter().map(|(m, _)| mono_deg(m)).max().unwrap_or(0);
            let base = self.track.then(|| self.unit_cof(k));
            if self.insert_reduced(f, base, &Quotients::new(), sugar, &mut pairs) {
                return Ok(());
            }
        }
        while !pairs.is_empty() {
            let best = (0..pairs.len())
                .min_by(|&a, &b| {
                    pairs[a].sugar.cmp(&pairs[b].sugar).then_with(|| self.ord.cmp(&pairs[a].lcm, &pairs[b].lcm))
                })
                .unwrap();
            let pair = pairs.swap_remove(best);
            self.spairs += 1;
            if self.spairs > budget.max_spairs {
                return Err(IdealError::Inconclusive { spairs: self.spairs, degree: mono_deg(&pair.lcm) });
            }
            if mono_deg(&pair.lcm) > budget.max_degree {
                return Err(IdealError::Inconclusive { spairs: self.spairs, degree: mono_deg(&pair.lcm) });
            }
            let (gi, gj) = (&self.elems[pair.i].poly, &self.elems[pair.j].poly);
            let mi = mono_div(&pair.lcm, gi.lm());
            let mj = mono_div(&pair.lcm, gj.lm());
            let zero = GPoly::default();
            let s = zero.sub_mul(&-Coeff::one(), &mi, gi, &self.ord).sub_mul(&Coeff::one(), &mj, gj, &self.ord);
            let mut q0 = Quotients::new();
            if self.track {
                q0.entry(pair.i).or_default().push((mi, Coeff::one()));
                q0.entry(pair.j).or_default().push((mj, -Coeff::one()));
            }
            if self.insert_reduced(s, None, &q0, pair.sugar, &mut pairs) {
                return Ok(());
            }
        }
        self.finish();
        Ok(())
    }

    /// Reduces `f` (whose cofactors are `base + Σ q0_k·elem_k`) and adds it to the
    /// basis if nonzero. Returns true once the unit ideal is detected.
    fn insert_reduced(
        &mut self,
        f: GPoly,
        base: Option<Vec<GPoly>>,
        q0: &Quotients,
        sugar: u32,
        pairs: &mut Vec<Pair>,
    ) -> bool {
        let (mut h, quo) = self.reduce(f, self.track);
        if h.is_zero() {
            return false;
        }
        let lc_inv = h.lc().recip();
        h.scale(&lc_inv);
        let cof = if self.track {
            let with_q0 = self.combine(base, q0, &Coeff::one());
            let mut c = self.combine(Some(with_q0), &quo, &-Coeff::one());
            for g in c.iter_mut() {
                g.scale(&lc_inv);
            }
            Some(c)
        } else {
            None
        };
        let is_unit = mono_deg(h.lm()) == 0;
        let idx = self.elems.len();
        self.elems.push(Elem { poly: h, cof, sugar });
        if is_unit {
            self.active = alloc::vec![idx];
            pairs.clear();
            return true;
        }
        self.update(idx, pairs);
        false
    }

    /// Gebauer–Möller installation of a new element.
    fn update(&mut self, h: usize, pairs: &mut Vec<Pair>) {
        let lh = self.elems[h].poly.lm().clone();
        let sh = self.elems[h].sugar;
        let cands: Vec<(usize, Mono, bool)> = self
            .active
            .iter()
            .map(|&g| {
                let lg = self.elems[g].poly.lm();
                (g, mono_lcm(&lh, lg), mono_coprime(&lh, lg))
            })
            .collect();
        // chain criterion among the new pairs
        let mut keep: Vec<bool> = alloc::vec![true; cands.len()];
        for a in 0..cands.len() {
            if cands[a].2 {
                continue;
            }
            for b in 0..cands.len() {
                if a == b || !keep[b] {
                    continue;
                }
                let strictly = mono_divides(&cands[b].1, &cands[a].1) && cands[b].1 != cands[a].1;
                let equal_earlier = cands[b].1 == cands[a].1 && b < a;
                if strictly || equal_earlier {
                    keep[a] = false;
                    break;
                }
            }
        }
        // product criterion: drop coprime pairs, and any pair sharing their lcm
        let coprime_lcms: Vec<Mono> = cands.iter().filter(|c| c.2).map(|c| c.1.clone()).collect();
        let mut fresh: Vec<Pair> = Vec::new();
        for (k, (g, lcm, coprime)) in cands.into_iter().enumerate() {
            if !keep[k] || coprime || coprime_lcms.contains(&lcm) {
                continue;
            }
            let lg = self.elems[g].poly.lm();
            let sugar = (sh + mono_deg(&mono_div(&lcm, &lh))).max(self.elems[g].sugar + mono_deg(&mono_div(&lcm, lg)));
            fresh.push(Pair { i: g, j: h, lcm, sugar });
        }
        // old pairs made redundant by the new leading monomial
        pairs.retain(|p| {
            let li = self.elems[p.i].poly.lm();
            let lj = self.elems[p.j].poly.lm();
            !(mono_divides(&lh, &p.lcm) && mono_lcm(li, &lh) != p.lcm && mono_lcm(lj, &lh) != p.lcm)
        });
        pairs.extend(fresh);
        let elems = &self.elems;
        self.active.retain(|&g| !mono_divides(&lh, elems[g].poly.lm()));
        self.active.push(h);
    }

    /// Interreduces the active elements into the reduced basis.
    fn finish(&mut self) {
        let mut act = self.active.clone();
        act.sort_by(|&a, &b| self.ord.cmp(self.elems[a].poly.lm(), self.elems[b].poly.lm()));
        for i in 0..act.len() {
            let k = act[i];
            self.active = act.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
            let poly = self.elems[k].poly.clone();
            let head = GPoly(alloc::vec![poly.0[0].clone()]);
            let tail = GPoly(poly.0[1..].to_vec());
            let (rem, quo) = self.reduce(tail, self.track);
            let cof = if self.track && !quo.is_empty() {
                Some(self.combine(self.elems[k].cof.clone(), &quo, &-Coeff::one()))
            } else {
                self.elems[k].cof.clone()
            };
            let newpoly = head.add(&rem, &self.ord);
            act[i] = self.elems.len();
            self.elems.push(Elem { poly: newpoly, cof, sugar: 0 });
        }
        self.active = act;
    }

    /// Reduced basis, sorted by increasing leading monomial.
    pub(crate) fn basis(&self) -> Vec<&Elem> {
        let mut out: Vec<&Elem> = self.active.iter().map(|&k| &self.elems[k]).collect();
        out.sort_by(|a, b| self.ord.cmp(a.poly.lm(), b.poly.lm()));
        out
    }
}
