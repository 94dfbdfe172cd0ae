use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;
use resolve_core::ideal::{contains, groebner, saturate, Budget, Ideal, Membership, MonomialOrder};
use resolve_core::poly::{q, Coeff, Monomial, Polynomial, VarRegistry};

fn reg() -> Arc<VarRegistry> {
    VarRegistry::new(["x", "y", "z"]).unwrap()
}

type Terms = Vec<([u16; 3], i64)>;

fn terms(max_exp: u16, len: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(([0..max_exp + 1, 0..max_exp + 1, 0..max_exp + 1], -3i64..4), 1..len)
}

/// Terms of total degree ≤ `deg`.
fn build(reg: &Arc<VarRegistry>, t: &Terms, deg: u32) -> Polynomial {
    Polynomial::from_terms(
        reg,
        t.iter()
            .filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() <= deg)
            .map(|(e, c)| (Monomial::from_exps(e.to_vec()), q(*c))),
    )
}

fn monomials_up_to(n: usize, deg: u32) -> Vec<Monomial> {
    let mut out = vec![vec![0u16; n]];
    for _ in 0..deg {
        let mut next = out.clone();
        for m in &out {
            for v in 0..n {
                let mut e = m.clone();
                e[v] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(Monomial::from_exps).collect()
}

/// Brute force: is `f` a ℚ-linear combination of `m·g` with
/// `deg(m·g) ≤ bound`? Gaussian elimination on the coefficient vectors.
fn oracle_member(gens: &[Polynomial], f: &Polynomial, bound: u32) -> bool {
    let reg = f.registry();
    let mut rows: Vec<BTreeMap<Monomial, Coeff>> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let dg = g.total_degree();
        if dg > bound {
            continue;
        }
        for m in monomials_up_to(reg.len(), bound - dg) {
            let p = g.mul_term(&m, &q(1));
            rows.push(p.terms().map(|(m, c)| (m.clone(), c.clone())).collect());
        }
    }
    // echelon form keyed by pivot monomial
    let mut pivots: BTreeMap<Monomial, BTreeMap<Monomial, Coeff>> = BTreeMap::new();
    let reduce = |mut v: BTreeMap<Monomial, Coeff>, pivots: &BTreeMap<Monomial, BTreeMap<Monomial, Coeff>>| {
        loop {
            let Some(k) = v.keys().rev().find(|k| pivots.contains_key(*k)).cloned() else { return v };
            let c = v[&k].clone();
            for (m, x) in &pivots[&k] {
                let e = v.entry(m.clone()).or_insert_with(Coeff::zero);
                *e = e.clone() - c.clone() * x.clone();
                if e.is_zero() {
                    v.remove(m);
                }
            }
        }
    };
    for r in rows {
        let r = reduce(r, &pivots);
        if let Some((k, c)) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            let normed = r.into_iter().map(|(m, x)| (m, x / c.clone())).collect();
            pivots.insert(k, normed);
        }
    }
    let fv: BTreeMap<Monomial, Coeff> = f.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    reduce(fv, &pivots).is_empty()
}

fn ideal_strategy() -> impl Strategy<Value = (Vec<Terms>, Vec<Terms>, Terms, bool)> {
    (
        prop::collection::vec(terms(2, 4), 1..4),
        prop::collection::vec(terms(1, 3), 3),
        terms(2, 4),
        any::<bool>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn membership_agrees_with_brute_force((gens, cofactors, noise, noisy) in ideal_strategy()) {
        let r = reg();
        let gens: Vec<Polynomial> = gens.iter().map(|t| build(&r, t, 2)).collect();
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let mut f = Polynomial::zero(&r);
        for (g, h) in gens.iter().zip(&cofactors) {
            f = &f + &(g * &build(&r, h, 1));
        }
        if noisy {
            f = &f + &build(&r, &noise, 2);
        }
        let ideal = Ideal::new(&r, gens.clone()).unwrap();
        let b = Budget::default();
        match contains(&ideal, &f, &b).unwrap() {
            Membership::Member(w) => {
                prop_assert!(w.verify());
                prop_assert!(oracle_member(&gens, &f, f.total_degree().max(2) + 4), "oracle misses member {}", f);
            }
            Membership::NotMember { remainder } => {
                prop_assert!(!remainder.is_zero());
                prop_assert!(noisy, "constructed member rejected: {}", f);
                prop_assert!(!oracle_member(&gens, &f, 7), "oracle finds a representation of {}", f);
            }
        }
    }

    #[test]
    fn groebner_idempotent_and_saturation_monotone((gens, _, _, _) in ideal_strategy()) {
        let r = reg();
        let gens: Vec<Polynomial> = gens.iter().map(|t| build(&r, t, 2)).collect();
        let ideal = Ideal::new(&r, gens).unwrap();
        let b = Budget::default();
        let gb = groebner(&ideal, &MonomialOrder::GrevLex, &b).unwrap();
        let again = groebner(&Ideal::new(&r, gb.basis().to_vec()).unwrap(), &MonomialOrder::GrevLex, &b).unwrap();
        prop_assert_eq!(gb.basis(), again.basis());
        let x = Polynomial::var(&r, "x").unwrap();
        let s = saturate(&ideal, &x, &b).unwrap();
        prop_assert!(s.contains_ideal(&ideal, &b).unwrap());
        let s2 = saturate(&s, &x, &b).unwrap();
        prop_assert!(s2.same_ideal(&s, &b).unwrap());
    }
}
