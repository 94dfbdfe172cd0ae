//! Symplectic group elements acting on the big cell and on tower charts.
//!
//! On the big cell the point `A` is the column span of `[A; K]`; an element
//! `M` sends it to the span of `M·[A; K] = [A''; B]`, renormalized to
//! `[A''·B⁻¹·K; K]`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{ChartError, Tower};
use crate::cover::{CoverOutcome, CoverProof, Obstruction};
use crate::ideal::Budget;
use crate::poly::{Coeff, PolyMatrix, Polynomial};
use crate::schubert::{big_cell_matrix, big_cell_registry, cofactor, SymplecticFrame};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticElement {
    pub g: usize,
    pub matrix: PolyMatrix,
}

fn adjugate(m: &PolyMatrix) -> Result<PolyMatrix, ChartError> {
    let n = m.rows();
    let mut out = PolyMatrix::zeros(m.registry(), n, n);
    if n == 1 {
        out.set(0, 0, Polynomial::one(m.registry()));
        return Ok(out);
    }
    for i in 1..=n {
        for j in 1..=n {
            out.set(j - 1, i - 1, cofactor(m, i, j)?);
        }
    }
    Ok(out)
}

fn block(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> PolyMatrix {
    let g = a.rows();
    let mut m = PolyMatrix::zeros(a.registry(), 2 * g, 2 * g);
    for i in 0..g {
        for j in 0..g {
            m.set(i, j, a.get(i, j).clone());
            m.set(i, g + j, b.get(i, j).clone());
            m.set(g + i, j, c.get(i, j).clone());
            m.set(g + i, g + j, d.get(i, j).clone());
        }
    }
    m
}

impl SymplecticElement {
    /// Checks `ᵗM·J·M = J` over the big-cell registry of genus `g`.
    pub fn new(g: usize, matrix: PolyMatrix) -> Result<Self, ChartError> {
        let frame = SymplecticFrame::new(g, matrix.registry()).map_err(|_| ChartError::NotSymplectic)?;
        if matrix.rows() != 2 * g || matrix.cols() != 2 * g {
            return Err(ChartError::NotSymplectic);
        }
        let lhs = matrix.transpose().mul(&frame.j)?.mul(&matrix)?;
        if lhs != frame.j {
            return Err(ChartError::NotSymplectic);
        }
        Ok(SymplecticElement { g, matrix })
    }

    /// `diag(γ, K·ᵗγ⁻¹·K)` for a unimodular integer `γ`.
    pub fn levi(gamma: &[&[i64]]) -> Result<Self, ChartError> {
        let g = gamma.len();
        let reg = big_cell_registry(g).map_err(|_| ChartError::NotSymplectic)?;
        let rows = gamma.iter().map(|r| r.iter().map(|&x| Polynomial::from_int(&reg, x)).collect()).collect();
        let gm = PolyMatrix::from_rows(&reg, rows)?;
        let det = gm.det()?;
        let unit = det.constant_value().filter(|d| d.is_one() || *d == -Coeff::one());
        let Some(d) = unit else { return Err(ChartError::NotSymplectic) };
        let inv_t = adjugate(&gm)?.transpose().map(|e| e.scale(&d));
        let frame = SymplecticFrame::new(g, &reg).map_err(|_| ChartError::NotSymplectic)?;
        let lower = frame.k.mul(&inv_t)?.mul(&frame.k)?;
        let zero = PolyMatrix::zeros(&reg, g, g);
        Self::new(g, block(&gm, &zero, &zero, &lower))
    }

    /// `[[Id, N], [0, Id]]`.
    pub fn unipotent(n: PolyMatrix) -> Result<Self, ChartError> {
        let g = n.rows();
        let reg = n.registry().clone();
        let mut id = PolyMatrix::zeros(&reg, g, g);
        for i in 0..g {
            id.set(i, i, Polynomial::one(&reg));
        }
        Self::new(g, block(&id, &n, &PolyMatrix::zeros(&reg, g, g), &id))
    }

    pub fn product(&self, other: &SymplecticElement) -> Result<Self, ChartError> {
        Self::new(self.g, self.matrix.mul(&other.matrix)?)
    }

    /// The induced map on the big cell, `a_ij ↦ (A''·B⁻¹·K)_ij`, `p ↦ p`.
    pub fn act_big_cell(&self) -> Result<BTreeMap<String, Polynomial>, ChartError> {
        let g = self.g;
        let reg = self.matrix.registry().clone();
        let a = big_cell_matrix(&reg, g).map_err(|_| ChartError::NotSymplectic)?;
        let frame = SymplecticFrame::new(g, &reg).map_err(|_| ChartError::NotSymplectic)?;
        let mut stacked = PolyMatrix::zeros(&reg, 2 * g, g);
        for i in 0..g {
            for j in 0..g {
                stacked.set(i, j, a.get(i, j).clone());
                stacked.set(g + i, j, frame.k.get(i, j).clone());
            }
        }
        let img = self.matrix.mul(&stacked)?;
        let top: Vec<usize> = (0..g).collect();
        let bottom: Vec<usize> = (g..2 * g).collect();
        let cols: Vec<usize> = (0..g).collect();
        let b = img.submatrix(&bottom, &cols);
        let det = b.det()?;
        let d = det
            .constant_value()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| ChartError::NotPolynomial(alloc::format!("det B = {det}")))?;
        let inv = adjugate(&b)?.map(|e| e.scale(&(Coeff::one() / &d)));
        let new_a = img.submatrix(&top, &cols).mul(&inv)?.mul(&frame.k)?;
        let mut out = BTreeMap::new();
        for i in 0..g {
            for j in i..g {
                if new_a.get(i, j) != new_a.get(j, i) {
                    return Err(ChartError::NotPolynomial(String::from("image is not symmetric")));
                }
                out.insert(alloc::format!("a{}{}", i + 1, j + 1), new_a.get(i, j).clone());
            }
        }
        out.insert(String::from("p"), Polynomial::var(&reg, "p")?);
        Ok(out)
    }

    /// The induced map on the coordinates of a tower chart. Scaling variables
    /// and `P` are fixed; every other coordinate `x` must occur as
    /// `σ(a) = s·x` for a root coordinate `a` and a monomial `s` in scaling
    /// variables, and is sent to `φ(a)(σ)/s`.
    pub fn act(&self, tower: &Tower, chart: &str) -> Result<BTreeMap<String, Polynomial>, ChartError> {
        let base = self.act_big_cell()?;
        let chain = tower.chain(chart)?;
        if chain.len() == 1 {
            return Ok(base);
        }
        let c = chain[chain.len() - 1];
        let sigma = super::total_substitution(tower, chart)?;
        let mut out = BTreeMap::new();
        let scaling = c.scaling_indices();
        for (x, name) in c.reg.names().iter().enumerate() {
            if scaling.contains(&x) {
                continue;
            }
            let mut found = None;
            for (root, img) in &sigma {
                let Some(m) = img.as_monomial() else { continue };
                if m.exps()[x] == 1 && m.exps().iter().enumerate().all(|(i, &e)| e == 0 || i == x || scaling.contains(&i)) {
                    found = Some((root, m.clone()));
                    break;
                }
            }
            let Some((root, mut s)) = found else {
                return Err(ChartError::NotPolynomial(alloc::format!("{name} is not a rescaled root coordinate")));
            };
            let mut e = s.exps().to_vec();
            e[x] = 0;
            s = crate::poly::Monomial::from_exps(e);
            let image = base[root.as_str()].substitute(&sigma, &c.reg)?;
            let lifted = image
                .div_monomial(&s)
                .map_err(|_| ChartError::NotPolynomial(alloc::format!("image of {name} is not divisible")))?;
            out.insert(name.clone(), lifted);
        }
        Ok(out)
    }
}

/// `g₁ … g₅` of the genus-3 saturation argument, over the big-cell registry.
pub fn standard_elements() -> Result<Vec<(String, SymplecticElement)>, ChartError> {
    let gammas: [&[&[i64]]; 4] = [
        &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
        &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]],
        &[&[1, 0, 0], &[0, 1, 0], &[0, 1, 1]],
        &[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]],
    ];
    let mut out = Vec::new();
    for (i, gm) in gammas.iter().enumerate() {
        out.push((alloc::format!("g{}", i + 1), SymplecticElement::levi(gm)?));
    }
    let reg = big_cell_registry(3).map_err(|_| ChartError::NotSymplectic)?;
    let p = Polynomial::var(&reg, "p")?;
    let mut n = PolyMatrix::zeros(&reg, 3, 3);
    n.set(1, 0, p.clone());
    n.set(2, 1, p);
    out.push((String::from("g5"), SymplecticElement::unipotent(n)?));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoveringOutcome {
    Covered { targets: Vec<Polynomial>, proof: CoverProof },
    /// A rational point of the chart outside every translate.
    Refuted { targets: Vec<Polynomial>, point: Vec<(String, Coeff)> },
    /// No certificate and no small rational point.
    Inconclusive { targets: Vec<Polynomial>, obstruction: Obstruction },
}

/// Shows that the translates of `base_open ≠ 0` under `elements` (and the
/// open itself) cover the chart.
pub fn covering_check(
    tower: &Tower,
    chart: &str,
    base_open: &Polynomial,
    elements: &[SymplecticElement],
    budget: &Budget,
) -> Result<CoveringOutcome, ChartError> {
    let c = tower.get(chart)?;
    let mut targets = alloc::vec![base_open.clone()];
    for e in elements {
        let map = e.act(tower, chart)?;
        targets.push(base_open.substitute(&map, &c.reg)?);
    }
    let prob = c.cover_problem(targets.clone());
    match prob.solve(None, budget)? {
        CoverOutcome::Proved(proof) => Ok(CoveringOutcome::Covered { targets, proof }),
        CoverOutcome::Obstructed(obstruction) => {
            // look in the deepest stratum (scaling variables zero) first
            let free: Vec<usize> = (0..c.reg.len()).filter(|i| !c.scaling_indices().contains(i)).collect();
            let all: Vec<usize> = (0..c.reg.len()).collect();
            let pt = prob.find_point_among(&[0, 1, -1], 3, &free).or_else(|| prob.find_point_among(&[0, 1, -1], 3, &all));
            Ok(match pt {
                Some(pt) => CoveringOutcome::Refuted {
                    targets,
                    point: c.reg.names().iter().cloned().zip(pt).collect(),
                },
                None => CoveringOutcome::Inconclusive { targets, obstruction },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::chart;
    use super::*;
    use crate::poly::parse;

    fn tower01() -> Tower {
        let reg = big_cell_registry(3).unwrap();
        let mut l0 = chart(
            "L0",
            &[("a11", &[]), ("a12", &[]), ("a13", &[]), ("a22", &[]), ("a23", &[]), ("a33", &[]), ("p", &[])],
            &["p"],
            &[],
            &[],
            None,
        );
        l0.reg = reg;
        let t0 = chart(
            "T0",
            &[
                ("l0", &[-1]),
                ("P0", &[1]),
                ("a11_0", &[1]),
                ("a12_0", &[1]),
                ("a13_0", &[1]),
                ("a22_0", &[1]),
                ("a23_0", &[1]),
                ("a33_0", &[1]),
            ],
            &["l0", "P0"],
            &[],
            &[&["P0", "a11_0", "a12_0", "a13_0", "a22_0", "a23_0", "a33_0"]],
            Some((
                "L0",
                &[
                    ("p", "l0*P0"),
                    ("a11", "l0*a11_0"),
                    ("a12", "l0*a12_0"),
                    ("a13", "l0*a13_0"),
                    ("a22", "l0*a22_0"),
                    ("a23", "l0*a23_0"),
                    ("a33", "l0*a33_0"),
                ],
            )),
        );
        let t1 = chart(
            "T1",
            &[
                ("l0", &[-1, 0]),
                ("l1", &[0, -1]),
                ("P1", &[1, 1]),
                ("a11_1", &[1, 1]),
                ("a12_1", &[1, 1]),
                ("a13_1", &[1, 1]),
                ("a22_1", &[1, 1]),
                ("a23_1", &[1, 1]),
                ("a33_1", &[1, 0]),
            ],
            &["l0", "l1", "P1"],
            &[],
            &[&["P1", "a11_1", "a12_1", "a13_1", "a22_1", "a23_1"], &["l1", "a33_1"]],
            Some((
                "T0",
                &[
                    ("P0", "l1*P1"),
                    ("a11_0", "l1*a11_1"),
                    ("a12_0", "l1*a12_1"),
                    ("a13_0", "l1*a13_1"),
                    ("a22_0", "l1*a22_1"),
                    ("a23_0", "l1*a23_1"),
                    ("a33_0", "a33_1"),
                ],
            )),
        );
        Tower::new(alloc::vec![l0, t0, t1])
    }

    #[test]
    fn elements_are_symplectic() {
        let els = standard_elements().unwrap();
        assert_eq!(els.len(), 5);
        let reg = big_cell_registry(3).unwrap();
        let mut bad = PolyMatrix::zeros(&reg, 6, 6);
        for i in 0..6 {
            bad.set(i, i, Polynomial::one(&reg));
        }
        bad.set(0, 1, Polynomial::one(&reg));
        assert_eq!(SymplecticElement::new(3, bad), Err(ChartError::NotSymplectic));
    }

    #[test]
    fn big_cell_translates() {
        let els = standard_elements().unwrap();
        let reg = big_cell_registry(3).unwrap();
        let a23 = parse("a23", &reg).unwrap();
        let expect = ["a13 + a23", "a12 + a23", "a22 + a23", "a11 + a12 + a13 + a23", "a23 + p"];
        for ((_, e), want) in els.iter().zip(expect) {
            let map = e.act_big_cell().unwrap();
            assert_eq!(a23.substitute(&map, &reg).unwrap(), parse(want, &reg).unwrap());
        }
        let g5 = els[4].1.act_big_cell().unwrap();
        assert_eq!(g5["a22"], parse("a22", &reg).unwrap());
    }

    #[test]
    fn action_composes() {
        let els = standard_elements().unwrap();
        let reg = big_cell_registry(3).unwrap();
        for (_, e1) in &els {
            for (_, e2) in &els {
                let prod = e1.product(e2).unwrap().act_big_cell().unwrap();
                let m1 = e1.act_big_cell().unwrap();
                let m2 = e2.act_big_cell().unwrap();
                for (k, v) in &m1 {
                    assert_eq!(prod[k], v.substitute(&m2, &reg).unwrap());
                }
            }
        }
    }

    #[test]
    fn lift_to_first_chart() {
        let t = tower01();
        let els = standard_elements().unwrap();
        let g5 = els[4].1.act(&t, "T1").unwrap();
        let c = t.get("T1").unwrap();
        assert_eq!(g5["a23_1"], parse("a23_1 + P1", &c.reg).unwrap());
        let g2 = els[1].1.act(&t, "T1").unwrap();
        assert_eq!(g2["a33_1"], parse("2*l1*a13_1 + l1*a11_1 + a33_1", &c.reg).unwrap());
    }

    #[test]
    fn translates_cover_the_first_chart() {
        let t = tower01();
        let els: Vec<SymplecticElement> = standard_elements().unwrap().into_iter().map(|(_, e)| e).collect();
        let c = t.get("T1").unwrap();
        let a23 = c.var("a23_1").unwrap();
        let b = Budget::default();
        match covering_check(&t, "T1", &a23, &els, &b).unwrap() {
            CoveringOutcome::Covered { proof, targets } => {
                assert!(c.cover_problem(targets).verify(&proof));
            }
            other => panic!("{other:?}"),
        }
        match covering_check(&t, "T1", &a23, &els[..4], &b).unwrap() {
            CoveringOutcome::Refuted { point, .. } => {
                let nonzero: Vec<&str> =
                    point.iter().filter(|(_, v)| !v.is_zero()).map(|(n, _)| n.as_str()).collect();
                assert_eq!(nonzero, ["P1", "a33_1"]);
            }
            other => panic!("{other:?}"),
        }
        let one = Polynomial::one(&c.reg);
        assert!(matches!(covering_check(&t, "T1", &one, &[], &b).unwrap(), CoveringOutcome::Covered { .. }));
    }
}
