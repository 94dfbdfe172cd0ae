//! Dense matrices of polynomials with exact determinants and minors.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{PolyError, Polynomial, VarRegistry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    reg: Arc<VarRegistry>,
    rows: usize,
    cols: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(reg: &Arc<VarRegistry>, rows: usize, cols: usize) -> Self {
        PolyMatrix { reg: reg.clone(), rows, cols, data: alloc::vec![Polynomial::zero(reg); rows * cols] }
    }

    pub fn from_rows(reg: &Arc<VarRegistry>, rows: Vec<Vec<Polynomial>>) -> Result<Self, PolyError> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(PolyError::ShapeMismatch);
            }
            for p in row {
                if !p.registry().same_as(reg) {
                    return Err(PolyError::RegistryMismatch);
                }
                data.push(p);
            }
        }
        Ok(PolyMatrix { reg: reg.clone(), rows: nrows, cols, data })
    }

    /// Jacobian `∂ polys[i] / ∂ vars[j]`.
    pub fn jacobian(polys: &[Polynomial], vars: &[usize], reg: &Arc<VarRegistry>) -> Self {
        let mut m = Self::zeros(reg, polys.len(), vars.len());
        for (i, f) in polys.iter().enumerate() {
            for (j, &v) in vars.iter().enumerate() {
                m.data[i * vars.len() + j] = f.derivative_at(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        self.data[r * self.cols + c] = p;
    }

    pub fn row(&self, r: usize) -> &[Polynomial] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.reg, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        if self.cols != other.rows {
            return Err(PolyError::ShapeMismatch);
        }
        if !self.reg.same_as(&other.reg) {
            return Err(PolyError::RegistryMismatch);
        }
        let mut out = Self::zeros(&self.reg, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(&self.reg);
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = Self::zeros(&self.reg, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix { reg: self.reg.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Exact determinant by Laplace expansion along rows, memoised on the set of
    /// remaining columns (`O(2^n n)` products, no division).
    pub fn det(&self) -> Result<Polynomial, PolyError> {
        if self.rows != self.cols {
            return Err(PolyError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Polynomial::one(&self.reg));
        }
        assert!(n < 63, "determinant too large");
        // memo[mask] = det of rows (n - popcount(mask))..n with columns in mask
        let mut memo: BTreeMap<u64, Polynomial> = BTreeMap::new();
        memo.insert(0, Polynomial::one(&self.reg));
        for size in 1..=n {
            let row = n - size;
            for mask in masks_of_size(n, size) {
                let mut acc = Polynomial::zero(&self.reg);
                let mut sign_pos = true;
                for c in 0..n {
                    if mask & (1 << c) == 0 {
                        continue;
                    }
                    let entry = self.get(row, c);
                    if !entry.is_zero() {
                        let rest = &memo[&(mask & !(1 << c))];
                        if !rest.is_zero() {
                            let t = entry * rest;
                            acc = if sign_pos { &acc + &t } else { &acc - &t };
                        }
                    }
                    sign_pos = !sign_pos;
                }
                memo.insert(mask, acc);
            }
            memo.retain(|m, _| m.count_ones() as usize >= size);
        }
        Ok(memo.remove(&((1u64 << n) - 1)).expect("full mask computed"))
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Polynomial, PolyError> {
        if rows.len() != cols.len() {
            return Err(PolyError::NonSquare { rows: rows.len(), cols: cols.len() });
        }
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(PolyError::ShapeMismatch);
        }
        self.submatrix(rows, cols).det()
    }

    /// All maximal minors (`rows` × `rows`) indexed by sorted column subsets.
    pub fn maximal_minors(&self) -> Result<Vec<(Vec<usize>, Polynomial)>, PolyError> {
        let all_rows: Vec<usize> = (0..self.rows).collect();
        subsets(self.cols, self.rows)
            .into_iter()
            .map(|cols| self.minor(&all_rows, &cols).map(|d| (cols, d)))
            .collect()
    }
}

fn masks_of_size(n: usize, k: usize) -> Vec<u64> {
    subsets(n, k)
        .into_iter()
        .map(|s| s.iter().fold(0u64, |m, &c| m | (1 << c)))
        .collect()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}
