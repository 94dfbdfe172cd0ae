//! Plücker coordinates of the lattice matrices `Π^k·[A;K]` over the top
//! charts: recomputed minors, their factorisation through a scaling monomial,
//! and unit certificates for the coordinates that never vanish together.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::certify::{cover_pieces, CoverPiece};
use crate::chart::{total_substitution, ChartError, ChartPresentation, Tower};
use crate::ideal::{
    groebner, is_unit, monomial_unit, Budget, GroebnerBasis, Ideal, IdealError, LocalizedPresentation, MonomialOrder,
    UnitCertificate, UnitVerdict,
};
use crate::poly::matrix::subsets;
use crate::poly::{parse, ParseError, PolyError, PolyMatrix, Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlueckerError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("root chart has no coordinate `{0}`")]
    MissingRoot(String),
    #[error("bad row selection {0:?}")]
    BadIndex(Vec<usize>),
    #[error("definition `{0}` is not a square matrix")]
    NotSquare(String),
}

fn a_name(i: usize, j: usize) -> String {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    alloc::format!("a{}{}", i + 1, j + 1)
}

/// The symmetric matrix `A` of big-cell coordinates `a_ij` (1-based names).
pub fn big_cell_matrix(root: &Arc<VarRegistry>, g: usize) -> Result<PolyMatrix, PlueckerError> {
    let mut rows = Vec::new();
    for i in 0..g {
        let mut row = Vec::new();
        for j in 0..g {
            let n = a_name(i, j);
            row.push(Polynomial::var(root, &n).map_err(|_| PlueckerError::MissingRoot(n))?);
        }
        rows.push(row);
    }
    Ok(PolyMatrix::from_rows(root, rows)?)
}

/// `Π^k·[A;K]` over the root coordinates, where `Π e_i = e_{i+1}` and
/// `Π e_{2g} = p·e_1`, and `K` is the antidiagonal identity.
pub fn lattice_matrix(root: &Arc<VarRegistry>, g: usize, k: usize) -> Result<PolyMatrix, PlueckerError> {
    let p = Polynomial::var(root, "p").map_err(|_| PlueckerError::MissingRoot("p".into()))?;
    let a = big_cell_matrix(root, g)?;
    let n = 2 * g;
    let mut m = PolyMatrix::zeros(root, n, g);
    for i in 0..g {
        for j in 0..g {
            m.set(i, j, a.get(i, j).clone());
        }
        m.set(g + i, g - 1 - i, Polynomial::one(root));
    }
    for _ in 0..k {
        let mut next = PolyMatrix::zeros(root, n, g);
        for j in 0..g {
            next.set(0, j, &p * m.get(n - 1, j));
            for i in 1..n {
                next.set(i, j, m.get(i - 1, j).clone());
            }
        }
        m = next;
    }
    Ok(m)
}

/// `Π^k·[A;K]` in the coordinates of `chart`.
pub fn model_matrix(tower: &Tower, chart: &str, g: usize, k: usize) -> Result<PolyMatrix, PlueckerError> {
    let chain = tower.chain(chart)?;
    let root = &chain[0].reg;
    let c = chain.last().unwrap();
    let sub = total_substitution(tower, chart)?;
    let m = lattice_matrix(root, g, k)?;
    let mut out = PolyMatrix::zeros(&c.reg, m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j).substitute(&sub, &c.reg)?);
        }
    }
    Ok(out)
}

/// Cofactors `dij` (`i ≤ j`, cofactor of `a_ij`) and `detA` of the big-cell
/// matrix, as named root-coordinate expressions.
pub fn root_cofactors(root: &Arc<VarRegistry>, g: usize) -> Result<Vec<(String, Polynomial)>, PlueckerError> {
    let a = big_cell_matrix(root, g)?;
    let all: Vec<usize> = (0..g).collect();
    let mut out = Vec::new();
    for i in 0..g {
        for j in i..g {
            let rows: Vec<usize> = all.iter().copied().filter(|&r| r != i).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&c| c != j).collect();
            let m = a.minor(&rows, &cols)?;
            let m = if (i + j) % 2 == 1 { -&m } else { m };
            out.push((alloc::format!("d{}{}", i + 1, j + 1), m));
        }
    }
    out.push(("detA".into(), a.det()?));
    Ok(out)
}

/// A chart ring with named abbreviations and inverse variables for
/// coordinates the chart declares invertible.
#[derive(Debug, Clone)]
pub struct Scope {
    chart: String,
    reg: Arc<VarRegistry>,
    relations: Vec<Polynomial>,
    defs: Vec<(String, Polynomial)>,
}

impl Scope {
    /// `inverses`: (name of the inverse variable, chart polynomial it inverts).
    pub fn new(c: &ChartPresentation, inverses: &[(String, Polynomial)]) -> Result<Self, PlueckerError> {
        let names: Vec<&str> = inverses.iter().map(|(n, _)| n.as_str()).collect();
        let reg = c.reg.extended(&names)?;
        let mut relations: Vec<Polynomial> = c.equations.iter().map(|e| e.embed(&reg)).collect::<Result<_, _>>()?;
        for (n, f) in inverses {
            let u = Polynomial::var(&reg, n)?;
            relations.push(&(&u * &f.embed(&reg)?) - &Polynomial::one(&reg));
        }
        Ok(Scope { chart: c.name.clone(), reg, relations, defs: Vec::new() })
    }

    /// A scope with no relations over `reg`, for root-coordinate expressions.
    pub fn free(name: &str, reg: &Arc<VarRegistry>) -> Self {
        Scope { chart: name.into(), reg: reg.clone(), relations: Vec::new(), defs: Vec::new() }
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn definitions(&self) -> &[(String, Polynomial)] {
        &self.defs
    }

    pub fn ideal(&self) -> Result<Ideal, PlueckerError> {
        Ok(Ideal::new(&self.reg, self.relations.clone())?)
    }

    /// Parses `text`, expanding earlier definitions.
    pub fn parse(&self, text: &str) -> Result<Polynomial, PlueckerError> {
        if self.defs.is_empty() {
            return Ok(parse(text, &self.reg)?);
        }
        let names: Vec<&str> = self.defs.iter().map(|(n, _)| n.as_str()).collect();
        let wide = self.reg.extended(&names)?;
        let f = parse(text, &wide)?;
        let map: BTreeMap<String, Polynomial> = self.defs.iter().cloned().collect();
        Ok(f.substitute(&map, &self.reg)?)
    }

    pub fn define(&mut self, name: &str, value: Polynomial) -> Result<(), PlueckerError> {
        if self.reg.contains(name) || self.defs.iter().any(|(n, _)| n == name) {
            return Err(ChartError::NameCollision(name.into()).into());
        }
        self.defs.push((name.into(), value.embed(&self.reg)?));
        Ok(())
    }

    pub fn define_text(&mut self, name: &str, text: &str) -> Result<(), PlueckerError> {
        let v = self.parse(text)?;
        self.define(name, v)
    }

    /// Defines `name` as the determinant of a matrix of expressions.
    pub fn define_det(&mut self, name: &str, entries: &[Vec<String>]) -> Result<(), PlueckerError> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(PlueckerError::NotSquare(name.into()));
        }
        let rows = entries.iter().map(|r| r.iter().map(|e| self.parse(e)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?;
        let d = PolyMatrix::from_rows(&self.reg, rows)?.det()?;
        self.define(name, d)
    }

    pub fn basis(&self, budget: &Budget) -> Result<GroebnerBasis, PlueckerError> {
        Ok(groebner(&self.ideal()?, &MonomialOrder::GrevLex, budget)?)
    }

    pub fn embed(&self, f: &Polynomial) -> Result<Polynomial, PlueckerError> {
        Ok(f.embed(&self.reg)?)
    }
}

/// Normal form of `f` modulo the scope's relations; `None` when it is zero.
pub fn residual(gb: &GroebnerBasis, f: &Polynomial) -> Option<Polynomial> {
    let r = gb.normal_form(f);
    (!r.is_zero()).then_some(r)
}

/// Rows (1-based, ascending) and their Plücker coordinate.
pub type MinorTable = Vec<(Vec<usize>, Polynomial)>;

/// Minors of `m` for every `size`-subset of `rows` (1-based), in columns `cols`.
pub fn minor_table(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Result<MinorTable, PlueckerError> {
    if rows.iter().any(|&r| r == 0 || r > m.rows()) {
        return Err(PlueckerError::BadIndex(rows.to_vec()));
    }
    let cols0: Vec<usize> = cols.iter().map(|c| c - 1).collect();
    let mut out = Vec::new();
    for pick in subsets(rows.len(), cols.len()) {
        let idx: Vec<usize> = pick.iter().map(|&i| rows[i]).collect();
        let r0: Vec<usize> = idx.iter().map(|r| r - 1).collect();
        out.push((idx, m.minor(&r0, &cols0)?));
    }
    Ok(out)
}

/// One rung of the local model: the Plücker coordinates of rows `rows`,
/// columns `cols` of `Π^k·[A;K]` on `chart` equal `unit_factor·M`.
#[derive(Debug, Clone)]
pub struct LocalModelStep {
    pub k: usize,
    pub chart: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub unit_factor: Polynomial,
    pub table: MinorTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorEntry {
    pub index: Vec<usize>,
    pub minor: Polynomial,
    /// `minor − unit_factor·M` modulo the chart; `None` when zero.
    pub residual: Option<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationReport {
    pub k: usize,
    pub chart: String,
    pub entries: Vec<FactorEntry>,
    /// Row subsets with a minor but no table entry, or vice versa.
    pub unmatched: Vec<Vec<usize>>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.unmatched.is_empty() && self.entries.iter().all(|e| e.residual.is_none())
    }
}

pub fn verify_factorization(
    tower: &Tower,
    g: usize,
    step: &LocalModelStep,
    scope: &Scope,
    gb: &GroebnerBasis,
) -> Result<FactorizationReport, PlueckerError> {
    let m = model_matrix(tower, &step.chart, g, step.k)?;
    let minors = minor_table(&m, &step.rows, &step.cols)?;
    let uf = scope.embed(&step.unit_factor)?;
    let mut entries = Vec::new();
    let mut unmatched = Vec::new();
    for (index, minor) in minors {
        let minor = scope.embed(&minor)?;
        match step.table.iter().find(|(i, _)| *i == index) {
            Some((_, v)) => {
                let r = residual(gb, &(&minor - &(&uf * &scope.embed(v)?)));
                entries.push(FactorEntry { index, minor, residual: r });
            }
            None => unmatched.push(index),
        }
    }
    for (i, _) in &step.table {
        if !entries.iter().any(|e| e.index == *i) && !unmatched.contains(i) {
            unmatched.push(i.clone());
        }
    }
    Ok(FactorizationReport { k: step.k, chart: step.chart.clone(), entries, unmatched })
}

/// `table` entry for an arbitrary ordering of distinct rows, with the sign
/// of the sorting permutation; zero for a repeated row.
fn signed_entry(table: &MinorTable, rows: &[usize], reg: &Arc<VarRegistry>) -> Option<Polynomial> {
    let mut v = rows.to_vec();
    let mut sign = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = !sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Some(Polynomial::zero(reg));
    }
    let x = table.iter().find(|(k, _)| *k == v)?.1.clone();
    Some(if sign { -&x } else { x })
}

/// Three-term Plücker relations among the entries of a table of `s × s`
/// minors of an `n × s` matrix: for every `(s−2)`-set `S` and `i<j<k<l`
/// outside it, `m(S,i,j)m(S,k,l) − m(S,i,k)m(S,j,l) + m(S,i,l)m(S,j,k) = 0`.
/// Returns the number of relations checked and the failing index sets.
pub fn pluecker_relations(table: &MinorTable, reg: &Arc<VarRegistry>) -> (usize, Vec<Vec<usize>>) {
    let Some(s) = table.first().map(|(k, _)| k.len()) else { return (0, Vec::new()) };
    let mut rows: Vec<usize> = table.iter().flat_map(|(k, _)| k.iter().copied()).collect();
    rows.sort_unstable();
    rows.dedup();
    if s < 2 {
        return (0, Vec::new());
    }
    let mut checked = 0;
    let mut failed = Vec::new();
    for pick in subsets(rows.len(), s - 2) {
        let base: Vec<usize> = pick.iter().map(|&i| rows[i]).collect();
        let rest: Vec<usize> = rows.iter().copied().filter(|r| !base.contains(r)).collect();
        for q in subsets(rest.len(), 4) {
            let [i, j, k, l] = [rest[q[0]], rest[q[1]], rest[q[2]], rest[q[3]]];
            let mm = |a: usize, b: usize| {
                let mut r = base.clone();
                r.push(a);
                r.push(b);
                signed_entry(table, &r, reg).unwrap_or_else(|| Polynomial::zero(reg))
            };
            let rel = &(&(&mm(i, j) * &mm(k, l)) - &(&mm(i, k) * &mm(j, l))) + &(&mm(i, l) * &mm(j, k));
            checked += 1;
            if !rel.is_zero() {
                let mut idx = base.clone();
                idx.extend([i, j, k, l]);
                failed.push(idx);
            }
        }
    }
    (checked, failed)
}

/// Per cover piece: the targets have no common zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceUnit {
    pub piece: CoverPiece,
    pub certificate: Option<UnitCertificate>,
    /// Gröbner basis of the common zero locus when it is nonempty.
    pub obstruction: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonvanishingReport {
    pub chart: String,
    pub targets: Vec<Polynomial>,
    pub pieces: Vec<PieceUnit>,
}

impl NonvanishingReport {
    pub fn passed(&self) -> bool {
        self.pieces.iter().all(|p| p.certificate.is_some())
    }

    /// Re-expands every certificate; no Gröbner bases involved.
    pub fn verify(&self) -> bool {
        self.pieces.iter().all(|p| p.certificate.as_ref().is_some_and(UnitCertificate::verify))
    }
}

fn piece_presentation(scope: &Scope, piece: &CoverPiece, extra: &[Polynomial]) -> Result<LocalizedPresentation, PlueckerError> {
    let mut inverted: Vec<Polynomial> = piece.inverted.iter().map(|f| scope.embed(f)).collect::<Result<_, _>>()?;
    inverted.extend(extra.iter().cloned());
    Ok(LocalizedPresentation::new(scope.ideal()?, inverted)?)
}

fn piece_unit(lp: &LocalizedPresentation, targets: &[Polynomial], budget: &Budget) -> Result<Result<UnitCertificate, Vec<Polynomial>>, PlueckerError> {
    if let Some(c) = monomial_unit(lp, targets)? {
        return Ok(Ok(c));
    }
    Ok(match is_unit(lp, targets, budget)? {
        UnitVerdict::Unit(c) => Ok(c),
        UnitVerdict::Proper { basis } => Err(basis),
    })
}

/// The targets (scope polynomials) never vanish together on the chart: one
/// unit certificate per cover piece.
pub fn verify_nonvanishing(
    c: &ChartPresentation,
    scope: &Scope,
    targets: &[Polynomial],
    budget: &Budget,
) -> Result<NonvanishingReport, PlueckerError> {
    let mut pieces = Vec::new();
    for piece in cover_pieces(c, budget)?.pieces {
        let lp = piece_presentation(scope, &piece, &[])?;
        let (certificate, obstruction) = match piece_unit(&lp, targets, budget)? {
            Ok(cert) => (Some(cert), Vec::new()),
            Err(basis) => (None, basis),
        };
        pieces.push(PieceUnit { piece, certificate, obstruction });
    }
    Ok(NonvanishingReport { chart: c.name.clone(), targets: targets.to_vec(), pieces })
}

/// One line of a deduction along the common zero locus `Z` of the targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deduction {
    /// `f` has no zero on `Z`, so it may be inverted from here on.
    Invertible(Polynomial),
    /// `f` vanishes on `Z` (so `f` lies in the radical of the ideal of `Z`);
    /// it may be added to the equations of `Z`.
    Vanishes(Polynomial),
}

impl Deduction {
    pub fn describe(&self) -> String {
        match self {
            Deduction::Invertible(f) => alloc::format!("{f} is invertible"),
            Deduction::Vanishes(f) => alloc::format!("{f} = 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayPiece {
    pub piece: CoverPiece,
    /// For each deduction used on this piece, the certificate that
    /// `Z ∩ {f = 0}` (invertible) or `Z ∩ {f ≠ 0}` (vanishes) is empty.
    pub steps: Vec<(usize, UnitCertificate)>,
    /// `Z` is empty once the deductions are applied.
    pub contradiction: Option<UnitCertificate>,
    /// First deduction that could not be justified.
    pub stuck: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub chart: String,
    pub targets: Vec<Polynomial>,
    pub script: Vec<Deduction>,
    pub pieces: Vec<ReplayPiece>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.pieces.iter().all(|p| p.contradiction.is_some())
    }

    /// Re-expands every unit certificate (deductions and final contradiction).
    pub fn verify(&self) -> bool {
        self.pieces.iter().all(|p| {
            p.contradiction.as_ref().is_some_and(UnitCertificate::verify)
                && p.steps.iter().all(|(_, c)| c.verify())
        })
    }
}

/// Replays a deduction script on every cover piece: starting from
/// `Z = V(targets)`, each line either inverts a quantity shown to be nowhere
/// zero on `Z` or adds an equation shown to hold on `Z`; the piece is done as
/// soon as `Z` is certified empty.
pub fn replay_deductions(
    c: &ChartPresentation,
    scope: &Scope,
    targets: &[Polynomial],
    script: &[Deduction],
    budget: &Budget,
) -> Result<ReplayReport, PlueckerError> {
    let mut pieces = Vec::new();
    for piece in cover_pieces(c, budget)?.pieces {
        let mut zero: Vec<Polynomial> = targets.to_vec();
        let mut units: Vec<Polynomial> = Vec::new();
        let mut steps = Vec::new();
        let mut contradiction = None;
        let mut stuck = None;
        let base = piece_presentation(scope, &piece, &[])?;
        let with = |units: &[Polynomial], zero: &[Polynomial]| -> Result<LocalizedPresentation, PlueckerError> {
            let mut inv = base.inverted().to_vec();
            inv.extend(units.iter().cloned());
            Ok(LocalizedPresentation::new(base.ideal().with(zero)?, inv)?)
        };
        for (i, d) in script.iter().enumerate() {
            if let Some(cert) = monomial_unit(&with(&units, &zero)?, &[])? {
                contradiction = Some(cert);
                break;
            }
            match d {
                Deduction::Invertible(f) => match piece_unit(&with(&units, &zero)?, core::slice::from_ref(f), budget)? {
                    Ok(cert) => {
                        steps.push((i, cert));
                        units.push(f.clone());
                    }
                    Err(_) => {
                        stuck = Some(i);
                        break;
                    }
                },
                Deduction::Vanishes(f) => {
                    let mut inv = units.clone();
                    inv.push(f.clone());
                    match piece_unit(&with(&inv, &zero)?, &[], budget)? {
                        Ok(cert) => {
                            steps.push((i, cert));
                            zero.push(f.clone());
                        }
                        Err(_) => {
                            stuck = Some(i);
                            break;
                        }
                    }
                }
            }
        }
        if contradiction.is_none() && stuck.is_none() {
            match piece_unit(&with(&units, &zero)?, &[], budget)? {
                Ok(cert) => contradiction = Some(cert),
                Err(_) => stuck = Some(script.len()),
            }
        }
        pieces.push(ReplayPiece { piece, steps, contradiction, stuck });
    }
    Ok(ReplayReport { chart: c.name.clone(), targets: targets.to_vec(), script: script.to_vec(), pieces })
}

/// Rendered `index: expression` lines for a minor table.
pub fn format_table(prefix: &str, t: &MinorTable) -> Vec<String> {
    t.iter()
        .map(|(i, v)| {
            let idx: Vec<String> = i.iter().map(ToString::to_string).collect();
            alloc::format!("{prefix}_{{{}}} = {v}", idx.join(","))
        })
        .collect()
}
