//! Symplectic frame and Schubert combinatorics of the Lagrangian Grassmannian
//! `LG(g, 2g)`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::ideal::Ideal;
use crate::poly::matrix::subsets;
use crate::poly::{parse, PolyError, PolyMatrix, Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchubertError {
    #[error("g must be at least 1")]
    ZeroGenus,
    #[error("{elems:?} is not a totally isotropic {g}-subset of 1..={n}", n = 2 * g)]
    NotIsotropic { g: usize, elems: Vec<usize> },
    #[error("Schubert equations are only tabulated for g = 2 and g = 3 (got g = {0})")]
    Unsupported(usize),
    #[error("subsets belong to different genera")]
    GenusMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `J`, `K` and `Π` for the standard symplectic lattice chain.
#[derive(Debug, Clone)]
pub struct SymplecticFrame {
    pub g: usize,
    pub j: PolyMatrix,
    pub k: PolyMatrix,
    pub pi: PolyMatrix,
}

impl SymplecticFrame {
    /// Matrices over `reg`, which must contain the variable `p`.
    pub fn new(g: usize, reg: &Arc<VarRegistry>) -> Result<Self, SchubertError> {
        if g == 0 {
            return Err(SchubertError::ZeroGenus);
        }
        let p = Polynomial::var(reg, "p")?;
        let one = Polynomial::one(reg);
        let mut k = PolyMatrix::zeros(reg, g, g);
        for i in 0..g {
            k.set(i, g - 1 - i, one.clone());
        }
        let n = 2 * g;
        let mut j = PolyMatrix::zeros(reg, n, n);
        for i in 0..g {
            j.set(i, n - 1 - i, one.clone());
            j.set(g + i, g - 1 - i, -&one);
        }
        let mut pi = PolyMatrix::zeros(reg, n, n);
        pi.set(0, n - 1, p);
        for i in 1..n {
            pi.set(i, i - 1, one.clone());
        }
        Ok(SymplecticFrame { g, j, k, pi })
    }

    /// `Π^e`.
    pub fn pi_power(&self, e: u32) -> PolyMatrix {
        let n = 2 * self.g;
        let reg = self.pi.registry();
        let mut acc = PolyMatrix::zeros(reg, n, n);
        for i in 0..n {
            acc.set(i, i, Polynomial::one(reg));
        }
        for _ in 0..e {
            acc = self.pi.mul(&acc).expect("square");
        }
        acc
    }

    /// `ᵗx·J·y` for integer vectors.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> Polynomial {
        let reg = self.j.registry();
        let mut acc = Polynomial::zero(reg);
        for (a, &xa) in x.iter().enumerate() {
            for (b, &yb) in y.iter().enumerate() {
                if xa != 0 && yb != 0 {
                    acc = &acc + &self.j.get(a, b).scale(&crate::poly::q(xa * yb));
                }
            }
        }
        acc
    }

    /// True iff the span of `e_i, i ∈ elems` is isotropic for `J`.
    pub fn spans_isotropic(&self, elems: &[usize]) -> bool {
        let n = 2 * self.g;
        let e = |i: usize| {
            let mut v = alloc::vec![0i64; n];
            v[i - 1] = 1;
            v
        };
        elems.iter().all(|&a| elems.iter().all(|&b| self.pairing(&e(a), &e(b)).is_zero()))
    }
}

/// A Schubert index `S ⊂ {1, …, 2g}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsotropicSubset {
    g: usize,
    elems: Vec<usize>,
}

impl IsotropicSubset {
    pub fn new(g: usize, mut elems: Vec<usize>) -> Result<Self, SchubertError> {
        if g == 0 {
            return Err(SchubertError::ZeroGenus);
        }
        elems.sort_unstable();
        let n = 2 * g;
        let ok = elems.len() == g
            && elems.windows(2).all(|w| w[0] < w[1])
            && elems.iter().all(|&e| (1..=n).contains(&e))
            && elems.iter().all(|&e| !elems.contains(&(n + 1 - e)));
        if !ok {
            return Err(SchubertError::NotIsotropic { g, elems });
        }
        Ok(IsotropicSubset { g, elems })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    /// `{2,4,6}`.
    pub fn label(&self) -> String {
        let mut s = String::from("{");
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{e}");
        }
        s.push('}');
        s
    }

    /// `246`, used for compact edge names.
    pub fn short(&self) -> String {
        self.elems.iter().map(|e| e.to_string()).collect()
    }

    pub fn dimension(&self) -> usize {
        dimension(self)
    }
}

/// All totally isotropic `g`-subsets of `{1, …, 2g}`, lexicographically sorted.
pub fn enumerate_isotropic(g: usize) -> Vec<IsotropicSubset> {
    subsets(2 * g, g)
        .into_iter()
        .filter_map(|s| IsotropicSubset::new(g, s.into_iter().map(|e| e + 1).collect()).ok())
        .collect()
}

/// `ℓ(S) = r(g+1) − Σ_{i≤r} λ_i` with `r = |S ∩ {1..g}|`.
pub fn dimension(s: &IsotropicSubset) -> usize {
    let small: Vec<usize> = s.elems.iter().copied().filter(|&e| e <= s.g).collect();
    small.len() * (s.g + 1) - small.iter().sum::<usize>()
}

/// `𝓛_t ⊂ 𝓛_s`: componentwise `λ_i(s) ≤ λ_i(t)`.
pub fn bruhat_leq(s: &IsotropicSubset, t: &IsotropicSubset) -> Result<bool, SchubertError> {
    if s.g != t.g {
        return Err(SchubertError::GenusMismatch);
    }
    Ok(s.elems.iter().zip(&t.elems).all(|(a, b)| a <= b))
}

/// Bruhat poset with its covering relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchubertPoset {
    pub g: usize,
    pub nodes: Vec<IsotropicSubset>,
    /// `(smaller, larger)` index pairs: closed immersions of codimension one.
    pub covers: Vec<(usize, usize)>,
}

pub fn hasse(g: usize) -> Result<SchubertPoset, SchubertError> {
    if g == 0 {
        return Err(SchubertError::ZeroGenus);
    }
    let mut nodes = enumerate_isotropic(g);
    // diagram order: by dimension, then lexicographically descending
    nodes.sort_by(|a, b| a.dimension().cmp(&b.dimension()).then_with(|| b.elems.cmp(&a.elems)));
    let mut covers = Vec::new();
    for (i, small) in nodes.iter().enumerate() {
        for (j, big) in nodes.iter().enumerate() {
            if big.dimension() == small.dimension() + 1 && bruhat_leq(big, small)? {
                covers.push((i, j));
            }
        }
    }
    Ok(SchubertPoset { g, nodes, covers })
}

impl SchubertPoset {
    pub fn minimum(&self) -> &IsotropicSubset {
        &self.nodes[0]
    }

    pub fn maximum(&self) -> &IsotropicSubset {
        &self.nodes[self.nodes.len() - 1]
    }

    /// Edge names such as `456-356`.
    pub fn edge_names(&self) -> Vec<String> {
        self.covers
            .iter()
            .map(|&(a, b)| alloc::format!("{}-{}", self.nodes[a].short(), self.nodes[b].short()))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph schubert_g{} {{", self.g);
        let _ = writeln!(s, "  rankdir=LR;");
        for n in &self.nodes {
            let _ = writeln!(s, "  \"{}\" [dim={}];", n.label(), n.dimension());
        }
        for &(a, b) in &self.covers {
            let _ = writeln!(s, "  \"{}\" -> \"{}\";", self.nodes[a].label(), self.nodes[b].label());
        }
        s.push_str("}\n");
        s
    }
}

/// Coordinates `a_ij (i ≤ j)` of symmetric `g×g` matrices, followed by `p`.
pub fn big_cell_registry(g: usize) -> Result<Arc<VarRegistry>, SchubertError> {
    let mut names: Vec<String> = Vec::new();
    for i in 1..=g {
        for j in i..=g {
            names.push(alloc::format!("a{i}{j}"));
        }
    }
    names.push("p".into());
    Ok(VarRegistry::new(names)?)
}

/// The symmetric matrix `A` over the big-cell registry.
pub fn big_cell_matrix(reg: &Arc<VarRegistry>, g: usize) -> Result<PolyMatrix, SchubertError> {
    let mut a = PolyMatrix::zeros(reg, g, g);
    for i in 1..=g {
        for j in 1..=g {
            let (lo, hi) = (i.min(j), i.max(j));
            a.set(i - 1, j - 1, Polynomial::var(reg, &alloc::format!("a{lo}{hi}"))?);
        }
    }
    Ok(a)
}

/// Signed cofactor `δ^j_i` of the entry `(i, j)` of a square matrix (1-based).
pub fn cofactor(a: &PolyMatrix, i: usize, j: usize) -> Result<Polynomial, PolyError> {
    let n = a.rows();
    let rows: Vec<usize> = (0..n).filter(|&r| r != i - 1).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != j - 1).collect();
    let m = a.minor(&rows, &cols)?;
    Ok(if (i + j).is_multiple_of(2) { m } else { -&m })
}

const G3_TABLE: [(&[usize], &[&str]); 8] = [
    (&[4, 5, 6], &["a11", "a12", "a13", "a22", "a23", "a33"]),
    (&[3, 5, 6], &["a11", "a12", "a13", "a22", "a23"]),
    (&[2, 4, 6], &["p", "a22*a33 - a23^2", "a11", "a12", "a13"]),
    (&[2, 3, 6], &["a11", "a12", "a13"]),
    (&[1, 4, 5], &["d11", "d12", "d13", "d22", "d23", "d33"]),
    (&[1, 3, 5], &["d13", "d23", "d33"]),
    (&[1, 2, 4], &["det"]),
    (&[1, 2, 3], &[]),
];

// g = 2 via 𝓛₂ ≅ 𝓛_{2,3,6}: (a11, a12, a22) of g = 2 ↔ (a22, a23, a33) of g = 3
const G2_TABLE: [(&[usize], &[&str]); 4] = [
    (&[3, 4], &["a11", "a12", "a22"]),
    (&[2, 4], &["a11", "a12"]),
    (&[1, 3], &["p", "a11*a22 - a12^2"]),
    (&[1, 2], &[]),
];

/// Ideal of the big-cell Schubert variety `𝓛⁰_S` (shipped table, g ∈ {2, 3}).
pub fn big_cell_ideal(g: usize, s: &IsotropicSubset) -> Result<Ideal, SchubertError> {
    if s.g != g {
        return Err(SchubertError::GenusMismatch);
    }
    let table: &[(&[usize], &[&str])] = match g {
        2 => &G2_TABLE,
        3 => &G3_TABLE,
        _ => return Err(SchubertError::Unsupported(g)),
    };
    let reg = big_cell_registry(g)?;
    let (_, gens) = table.iter().find(|(e, _)| *e == s.elems()).expect("table covers every isotropic subset");
    let a = big_cell_matrix(&reg, g)?;
    let mut polys = Vec::new();
    for &gen in gens.iter() {
        let f = match gen.as_bytes() {
            b"det" => a.det()?,
            [b'd', i, j] => cofactor(&a, (i - b'0') as usize, (j - b'0') as usize)?,
            _ => parse(gen, &reg).map_err(PolyError::from)?,
        };
        polys.push(f);
    }
    Ideal::new(&reg, polys).map_err(|e| match e {
        crate::ideal::IdealError::Poly(p) => SchubertError::Poly(p),
        _ => unreachable!("constructing an ideal only fails on registry mismatch"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: usize, e: &[usize]) -> IsotropicSubset {
        IsotropicSubset::new(g, e.to_vec()).unwrap()
    }

    #[test]
    fn g2_subsets() {
        let labels: Vec<String> = enumerate_isotropic(2).iter().map(|s| s.label()).collect();
        assert_eq!(labels, ["{1,2}", "{1,3}", "{2,4}", "{3,4}"]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(set(3, &[4, 5, 6]).dimension(), 0);
        assert_eq!(set(3, &[1, 2, 3]).dimension(), 6);
        assert_eq!(set(3, &[1, 4, 5]).dimension(), 3);
        assert_eq!(set(3, &[2, 3, 6]).dimension(), 3);
    }

    #[test]
    fn non_isotropic_rejected() {
        assert!(IsotropicSubset::new(3, alloc::vec![1, 5, 6]).is_err());
        assert!(IsotropicSubset::new(3, alloc::vec![1, 2]).is_err());
        assert!(IsotropicSubset::new(2, alloc::vec![1, 5]).is_err());
    }

    #[test]
    fn bruhat_examples() {
        assert!(bruhat_leq(&set(2, &[1, 2]), &set(2, &[3, 4])).unwrap());
        let (a, b) = (set(3, &[1, 4, 5]), set(3, &[2, 3, 6]));
        assert!(!bruhat_leq(&a, &b).unwrap() && !bruhat_leq(&b, &a).unwrap());
        assert!(bruhat_leq(&a, &a).unwrap());
        assert_eq!(bruhat_leq(&a, &set(2, &[1, 2])), Err(SchubertError::GenusMismatch));
    }

    #[test]
    fn g1_is_a_line() {
        let h = hasse(1).unwrap();
        assert_eq!(h.nodes.len(), 2);
        assert_eq!(h.covers.len(), 1);
    }

    #[test]
    fn frame_identities() {
        let reg = VarRegistry::new(["p"]).unwrap();
        for g in 1..=3 {
            let f = SymplecticFrame::new(g, &reg).unwrap();
            let p = Polynomial::var(&reg, "p").unwrap();
            let pg = f.pi_power(2 * g as u32);
            for i in 0..2 * g {
                for j in 0..2 * g {
                    let want = if i == j { p.clone() } else { Polynomial::zero(&reg) };
                    assert_eq!(pg.get(i, j), &want);
                }
            }
            assert_eq!(f.j.transpose(), f.j.map(|x| -x));
            assert!(f.k.mul(&f.k).unwrap().det().unwrap().is_one());
        }
    }

    #[test]
    fn table_lookups() {
        let i = big_cell_ideal(3, &set(3, &[2, 3, 6])).unwrap();
        assert_eq!(i.generators().len(), 3);
        assert!(big_cell_ideal(3, &set(3, &[1, 2, 3])).unwrap().is_zero_ideal());
        let det = big_cell_ideal(3, &set(3, &[1, 2, 4])).unwrap();
        assert_eq!(det.generators()[0].total_degree(), 3);
        assert!(matches!(big_cell_ideal(4, &set(4, &[1, 2, 3, 4])), Err(SchubertError::Unsupported(4))));
    }
}
