//! Exact multivariate polynomials with rational coefficients.
//!
//! Every polynomial carries a shared [`VarRegistry`]; the registry order fixes the
//! exponent-vector layout and the graded reverse lexicographic term order used for
//! storage, printing and the default Gröbner order.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub mod matrix;
pub mod parse;

pub use matrix::PolyMatrix;
pub use parse::{parse, ParseError};

/// Coefficient field.
pub type Coeff = BigRational;

/// Integer coefficient helper.
pub fn q(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operands live in different variable registries")]
    RegistryMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix shapes do not match")]
    ShapeMismatch,
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Ordered list of distinct variable names.
#[derive(Debug, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '[' | ']' | '\''))
}

impl VarRegistry {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = VarRegistry { names: Vec::new(), index: BTreeMap::new() };
        for name in names {
            out.push(name.into())?;
        }
        Ok(Arc::new(out))
    }

    fn push(&mut self, name: String) -> Result<(), PolyError> {
        if !valid_name(&name) {
            return Err(PolyError::InvalidName(name));
        }
        if self.index.contains_key(&name) {
            return Err(PolyError::DuplicateVariable(name));
        }
        self.index.insert(name.clone(), self.names.len());
        self.names.push(name);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// A new registry with `extra` appended after the existing names.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Arc<Self>, PolyError> {
        let mut out = VarRegistry { names: self.names.clone(), index: self.index.clone() };
        for name in extra {
            out.push(name.as_ref().to_string())?;
        }
        Ok(Arc::new(out))
    }

    /// A name starting with `stem` that is not yet registered.
    pub fn fresh_name(&self, stem: &str) -> String {
        if !self.contains(stem) {
            return stem.to_string();
        }
        (0..)
            .map(|i| alloc::format!("{stem}{i}"))
            .find(|n| !self.contains(n))
            .expect("unbounded search")
    }

    /// Same names in the same order.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.names == other.names
    }
}

/// Exponent vector ordered by graded reverse lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(alloc::vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, e: u16) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn grevlex_cmp(&self, other: &Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grevlex_cmp(other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact polynomial over a [`VarRegistry`].
#[derive(Clone)]
pub struct Polynomial {
    reg: Arc<VarRegistry>,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.reg.same_as(&other.reg) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print(self))
    }
}

/// Which ring operation [`arith`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial, PolyError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

impl Polynomial {
    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Polynomial { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(reg: &Arc<VarRegistry>) -> Self {
        Self::constant(reg, Coeff::one())
    }

    pub fn constant(reg: &Arc<VarRegistry>, c: Coeff) -> Self {
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(reg.len()), c);
        }
        p
    }

    pub fn from_int(reg: &Arc<VarRegistry>, n: i64) -> Self {
        Self::constant(reg, q(n))
    }

    pub fn var(reg: &Arc<VarRegistry>, name: &str) -> Result<Self, PolyError> {
        let i = reg.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(reg, i))
    }

    pub fn var_at(reg: &Arc<VarRegistry>, i: usize) -> Self {
        Self::monomial(reg, Monomial::var(reg.len(), i, 1), Coeff::one())
    }

    pub fn monomial(reg: &Arc<VarRegistry>, m: Monomial, c: Coeff) -> Self {
        debug_assert_eq!(m.0.len(), reg.len());
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from raw terms, merging repeated monomials.
    pub fn from_terms<I>(reg: &Arc<VarRegistry>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut p = Self::zero(reg);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_zero() {
            return Some(Coeff::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in decreasing grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Single term with coefficient one, or `None`.
    pub fn as_monomial(&self) -> Option<&Monomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        c.is_one().then_some(m)
    }

    /// Index of the variable if this polynomial is exactly one variable.
    pub fn as_variable(&self) -> Option<usize> {
        let m = self.as_monomial()?;
        if m.degree() != 1 {
            return None;
        }
        m.0.iter().position(|&e| e == 1)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    /// Indices of the variables occurring in this polynomial.
    pub fn support(&self) -> Vec<usize> {
        (0..self.reg.len()).filter(|&i| self.uses_var(i)).collect()
    }

    fn check(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.reg.same_as(&other.reg) {
            Ok(())
        } else {
            Err(PolyError::RegistryMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = Polynomial::zero(&self.reg);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.reg);
        }
        Polynomial {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.reg);
        }
        Polynomial {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(t, x)| (t.mul(m), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.reg);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Scales by ±1 so the leading coefficient is positive.
    pub fn sign_normalized(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn derivative(&self, var: &str) -> Result<Polynomial, PolyError> {
        let i = self.reg.index_of(var).ok_or_else(|| PolyError::UnknownVariable(var.to_string()))?;
        Ok(self.derivative_at(i))
    }

    pub fn derivative_at(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.reg);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.0[i] -= 1;
            out.add_term(d, c * q(e as i64));
        }
        out
    }

    /// Simultaneous substitution. Variables without a binding map to the
    /// same-named variable of `target`.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<String, Polynomial>,
        target: &Arc<VarRegistry>,
    ) -> Result<Polynomial, PolyError> {
        for (name, img) in bindings {
            if !self.reg.contains(name) {
                return Err(PolyError::UnknownVariable(name.clone()));
            }
            if !img.reg.same_as(target) {
                return Err(PolyError::RegistryMismatch);
            }
        }
        let mut images: Vec<Option<Polynomial>> = Vec::with_capacity(self.reg.len());
        for (i, name) in self.reg.names.iter().enumerate() {
            if !self.uses_var(i) {
                images.push(None);
                continue;
            }
            let img = match bindings.get(name) {
                Some(p) => p.clone(),
                None => Polynomial::var(target, name)?,
            };
            images.push(Some(img));
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|img| match img {
                Some(p) => alloc::vec![Polynomial::one(target), p.clone()],
                None => Vec::new(),
            })
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &powers[i][1];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Re-expresses this polynomial in another registry by variable name.
    pub fn embed(&self, target: &Arc<VarRegistry>) -> Result<Polynomial, PolyError> {
        if self.reg.same_as(target) {
            return Ok(Polynomial { reg: target.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.reg.len());
        for (i, name) in self.reg.names.iter().enumerate() {
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if !self.uses_var(i) => map.push(None),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let n = target.len();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = alloc::vec![0u16; n];
            for (i, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    e[map[i].unwrap()] = x;
                }
            }
            (Monomial(e), c.clone())
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Evaluates at a rational point given in registry order.
    pub fn evaluate(&self, point: &[Coeff]) -> Coeff {
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Largest `k` with `var^k` dividing every term, and the quotient.
    pub fn strip_var(&self, i: usize) -> (u16, Polynomial) {
        let k = self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0);
        if k == 0 {
            return (0, self.clone());
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut d = m.clone();
            d.0[i] -= k;
            (d, c.clone())
        });
        (k, Polynomial::from_terms(&self.reg, terms))
    }

    /// Exact division by a monomial.
    pub fn div_monomial(&self, m: &Monomial) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero(&self.reg);
        for (t, c) in &self.terms {
            let d = m.quotient_of(t).ok_or(PolyError::NotDivisible)?;
            out.add_term(d, c.clone());
        }
        Ok(out)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let n = self.reg.len();
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one(n) };
        let mut g = first.clone();
        for m in it {
            for (a, b) in g.0.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        g
    }

    /// Maps each coefficient-carrying term through `f` (used for torus weights).
    pub fn raw_terms(&self) -> &BTreeMap<Monomial, Coeff> {
        &self.terms
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("registry mismatch in polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("registry mismatch in polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("registry mismatch in polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Coeff::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
