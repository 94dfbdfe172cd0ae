use std::sync::Arc;

use proptest::prelude::*;
use resolve_core::poly::{parse, q, Monomial, PolyMatrix, Polynomial, VarRegistry};

fn reg() -> Arc<VarRegistry> {
    VarRegistry::new(["x", "y", "z"]).unwrap()
}

/// Up to 5 terms, exponents ≤ 3, coefficients in [-9, 9] over a small
/// denominator.
fn poly_terms() -> impl Strategy<Value = Vec<([u16; 3], i64, i64)>> {
    prop::collection::vec(([0u16..4, 0u16..4, 0u16..4], -9i64..10, 1i64..4), 0..6)
}

fn build(reg: &Arc<VarRegistry>, terms: &[([u16; 3], i64, i64)]) -> Polynomial {
    Polynomial::from_terms(
        reg,
        terms.iter().map(|(e, n, d)| (Monomial::from_exps(e.to_vec()), q(*n) / q(*d))),
    )
}

fn matrix(reg: &Arc<VarRegistry>, n: usize, entries: &[Vec<([u16; 3], i64, i64)>]) -> PolyMatrix {
    let rows = (0..n).map(|r| (0..n).map(|c| build(reg, &entries[r * n + c])).collect()).collect();
    PolyMatrix::from_rows(reg, rows).unwrap()
}

fn small_entry() -> impl Strategy<Value = Vec<([u16; 3], i64, i64)>> {
    prop::collection::vec(([0u16..2, 0u16..2, 0u16..2], -3i64..4, 1i64..2), 0..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_axioms(a in poly_terms(), b in poly_terms(), c in poly_terms()) {
        let r = reg();
        let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Polynomial::one(&r), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a * &Polynomial::zero(&r)).is_zero());
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in poly_terms(), b in poly_terms(), k in -5i64..6, v in 0usize..3) {
        let r = reg();
        let (a, b) = (build(&r, &a), build(&r, &b));
        let d = |f: &Polynomial| f.derivative_at(v);
        prop_assert_eq!(d(&(&a + &b.scale(&q(k)))), &d(&a) + &d(&b).scale(&q(k)));
        prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
    }

    #[test]
    fn det_alternating_and_multilinear_3x3(
        e in prop::collection::vec(small_entry(), 9),
        extra in prop::collection::vec(small_entry(), 3),
        i in 0usize..3, j in 0usize..3,
    ) {
        let r = reg();
        let m = matrix(&r, 3, &e);
        let det = m.det().unwrap();
        if i != j {
            let mut s = m.clone();
            for c in 0..3 {
                s.set(i, c, m.get(j, c).clone());
                s.set(j, c, m.get(i, c).clone());
            }
            prop_assert_eq!(s.det().unwrap(), -&det);
            // a repeated row kills the determinant
            let mut t = m.clone();
            for c in 0..3 {
                t.set(i, c, m.get(j, c).clone());
            }
            prop_assert!(t.det().unwrap().is_zero());
        }
        // row i ↦ row i + w: det adds the det with row i replaced by w
        let w: Vec<Polynomial> = extra.iter().map(|t| build(&r, t)).collect();
        let (mut plus, mut only) = (m.clone(), m.clone());
        for (c, wc) in w.iter().enumerate() {
            plus.set(i, c, m.get(i, c) + wc);
            only.set(i, c, wc.clone());
        }
        prop_assert_eq!(plus.det().unwrap(), &det + &only.det().unwrap());
        prop_assert_eq!(m.transpose().det().unwrap(), det);
    }

    #[test]
    fn det_alternating_4x4(e in prop::collection::vec(small_entry(), 16), i in 0usize..4, j in 0usize..4) {
        prop_assume!(i != j);
        let r = reg();
        let m = matrix(&r, 4, &e);
        let mut s = m.clone();
        for c in 0..4 {
            s.set(i, c, m.get(j, c).clone());
            s.set(j, c, m.get(i, c).clone());
        }
        prop_assert_eq!(s.det().unwrap(), -&m.det().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parse_print_round_trip(a in poly_terms()) {
        let r = reg();
        let a = build(&r, &a);
        let text = a.to_string();
        let back = parse(&text, &r).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn det_matches_cofactor_expansion() {
    // independent oracle: Laplace expansion along the first row
    fn laplace(m: &PolyMatrix) -> Polynomial {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Polynomial::zero(m.registry());
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&k| k != c).collect();
            let term = m.get(0, c) * &laplace(&m.submatrix(&rows, &cols));
            acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
    let r = reg();
    let text = [
        ["x", "y + 1", "z", "2"],
        ["y^2", "x - z", "1/2", "x*y"],
        ["0", "z^2", "x + y + z", "-3"],
        ["x*z", "1", "y", "z - 1"],
    ];
    let rows = text.iter().map(|row| row.iter().map(|s| parse(s, &r).unwrap()).collect()).collect();
    let m = PolyMatrix::from_rows(&r, rows).unwrap();
    assert_eq!(m.det().unwrap(), laplace(&m));
}
