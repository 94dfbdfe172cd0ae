//! Jacobian unit-minor certificates over the cover of a chart by the opens
//! "one generator of every excluded locus is invertible".
//!
//! A smooth-center certificate on a piece is a list of maximal minors of the
//! Jacobian of `equations ++ center` together with a [`UnitCertificate`]
//! showing the minors have no common zero on `center ∩ piece`; at every
//! point some listed minor is nonzero, so the Jacobian has full rank there.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::chart::ChartPresentation;
use crate::ideal::{is_unit, monomial_unit, Budget, Ideal, IdealError, LocalizedPresentation, UnitCertificate, UnitVerdict};
use crate::poly::matrix::subsets;
use crate::poly::{Coeff, PolyMatrix, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPiece {
    pub chart: String,
    /// Index of the chosen generator in each exclusion.
    pub choice: Vec<usize>,
    /// Chosen generators, deduplicated, in exclusion order.
    pub inverted: Vec<Polynomial>,
}

impl CoverPiece {
    pub fn label(&self) -> String {
        let names: Vec<String> = self.inverted.iter().map(|f| f.to_string()).collect();
        alloc::format!("{}[{}]", self.chart, names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceCover {
    pub pieces: Vec<CoverPiece>,
    /// Choices whose open is empty, with the emptiness proof.
    pub dropped: Vec<(CoverPiece, UnitCertificate)>,
}

fn localized(c: &ChartPresentation, extra: &[Polynomial], inverted: &[Polynomial]) -> Result<LocalizedPresentation, IdealError> {
    let mut rel = c.equations.clone();
    rel.extend(extra.iter().cloned());
    LocalizedPresentation::new(Ideal::new(&c.reg, rel)?, inverted.to_vec())
}

/// Emptiness of `V(relations) ∩ {inverted ≠ 0}`, if provable.
fn empty_certificate(lp: &LocalizedPresentation, budget: &Budget) -> Result<Option<UnitCertificate>, IdealError> {
    if let Some(c) = monomial_unit(lp, &[])? {
        return Ok(Some(c));
    }
    Ok(is_unit(lp, &[], budget)?.certificate().cloned())
}

/// A rational point of the chart at which every element of `inverted` is
/// nonzero, found by giving the free coordinates pseudo-random values and
/// solving each equation for a coordinate that occurs linearly with a
/// monomial coefficient (and not in earlier equations).
pub fn sample_point(c: &ChartPresentation, inverted: &[Polynomial], seed: u64) -> Option<Vec<Coeff>> {
    let n = c.reg.len();
    let mut solved: Vec<(usize, usize)> = Vec::new();
    for (i, eq) in c.equations.iter().enumerate() {
        let pick = (0..n).find(|&v| {
            if solved.iter().any(|&(_, w)| w == v) || c.equations[..i].iter().any(|e| e.uses_var(v)) {
                return false;
            }
            let (coef, rest) = split_linear(eq, v);
            coef.as_ref().is_some_and(|k| k.num_terms() == 1) && !rest.uses_var(v)
        })?;
        solved.push((i, pick));
    }
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let r = ((state >> 33) % 19) as i64 - 9;
        if r == 0 { 10 } else { r }
    };
    let mut pt: Vec<Coeff> = (0..n).map(|_| crate::poly::q(next())).collect();
    for &(i, v) in &solved {
        let (coef, rest) = split_linear(&c.equations[i], v);
        let k = coef.unwrap().evaluate(&pt);
        if k.is_zero() {
            return None;
        }
        pt[v] = -rest.evaluate(&pt) / k;
    }
    let ok = c.equations.iter().all(|e| e.evaluate(&pt).is_zero()) && inverted.iter().all(|f| !f.evaluate(&pt).is_zero());
    ok.then_some(pt)
}

/// `f = coef·x_v + rest` when `f` has degree at most 1 in `x_v`.
fn split_linear(f: &Polynomial, v: usize) -> (Option<Polynomial>, Polynomial) {
    let reg = f.registry();
    let mut coef = Polynomial::zero(reg);
    let mut rest = Polynomial::zero(reg);
    for (m, a) in f.terms() {
        match m.exps()[v] {
            0 => rest = &rest + &Polynomial::monomial(reg, m.clone(), a.clone()),
            1 => {
                let mut e = m.exps().to_vec();
                e[v] = 0;
                coef = &coef + &Polynomial::monomial(reg, crate::poly::Monomial::from_exps(e), a.clone());
            }
            _ => return (None, f.clone()),
        }
    }
    ((!coef.is_zero()).then_some(coef), rest)
}

/// All choices of one generator per exclusion. Choices inverting the same set
/// are merged; empty opens are dropped with their certificate. An open with
/// a sampled rational point is kept without a Gröbner computation.
pub fn cover_pieces(c: &ChartPresentation, budget: &Budget) -> Result<PieceCover, IdealError> {
    let lists = c.exclusion_lists();
    let mut seen: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    let mut out = PieceCover { pieces: Vec::new(), dropped: Vec::new() };
    let mut choice = alloc::vec![0usize; lists.len()];
    loop {
        let mut inverted: Vec<Polynomial> = Vec::new();
        for (k, &i) in choice.iter().enumerate() {
            if !inverted.contains(&lists[k][i]) {
                inverted.push(lists[k][i].clone());
            }
        }
        let key: BTreeSet<String> = inverted.iter().map(|f| f.to_string()).collect();
        if seen.insert(key) {
            let piece = CoverPiece { chart: c.name.clone(), choice: choice.clone(), inverted };
            if (0..4).any(|seed| sample_point(c, &piece.inverted, seed).is_some()) {
                out.pieces.push(piece);
            } else {
                match empty_certificate(&localized(c, &[], &piece.inverted)?, budget)? {
                Some(cert) => out.dropped.push((piece, cert)),
                    None => out.pieces.push(piece),
                }
            }
        }
        // odometer, last exclusion fastest
        let mut k = lists.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < lists[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Column preference: `P`, then the other non-scaling coordinates in registry
/// order (fresh coordinates of a blow-up come first there), then the scaling
/// variables.
pub fn column_order(c: &ChartPresentation) -> Vec<usize> {
    let p = c.p_index();
    let scaling = c.scaling_indices();
    let mut out = alloc::vec![p];
    out.extend((0..c.reg.len()).filter(|&i| i != p && !scaling.contains(&i)));
    out.extend(scaling.iter().copied());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minor {
    /// Registry indices of the columns.
    pub cols: Vec<usize>,
    pub value: Polynomial,
}

/// Nonzero maximal minors of `jac` (all rows) over `allowed` columns, in
/// preference order of the column sets.
fn candidate_minors(jac: &PolyMatrix, allowed: &[usize]) -> Result<Vec<Minor>, IdealError> {
    let k = jac.rows();
    let rows: Vec<usize> = (0..k).collect();
    // only columns where some row has an entry
    let cols: Vec<usize> = allowed.iter().copied().filter(|&j| (0..k).any(|r| !jac.get(r, j).is_zero())).collect();
    let mut out = Vec::new();
    if k == 0 {
        out.push(Minor { cols: Vec::new(), value: Polynomial::one(jac.registry()) });
        return Ok(out);
    }
    for pick in subsets(cols.len(), k) {
        let cs: Vec<usize> = pick.iter().map(|&i| cols[i]).collect();
        if !structurally_nonsingular(jac, &cs) {
            continue;
        }
        let value = jac.minor(&rows, &cs)?;
        if !value.is_zero() {
            out.push(Minor { cols: cs, value });
        }
    }
    Ok(out)
}

/// A perfect matching of rows to `cols` through nonzero entries exists.
fn structurally_nonsingular(jac: &PolyMatrix, cols: &[usize]) -> bool {
    fn augment(r: usize, jac: &PolyMatrix, cols: &[usize], used: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for (ci, &c) in cols.iter().enumerate() {
            if used[ci] || jac.get(r, c).is_zero() {
                continue;
            }
            used[ci] = true;
            if owner[ci].is_none() || augment(owner[ci].unwrap(), jac, cols, used, owner) {
                owner[ci] = Some(r);
                return true;
            }
        }
        false
    }
    let mut owner = alloc::vec![None; cols.len()];
    (0..jac.rows()).all(|r| augment(r, jac, cols, &mut alloc::vec![false; cols.len()], &mut owner))
}

/// A full-rank certificate, or the piece being empty, or neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceVerdict {
    Empty(UnitCertificate),
    Certified(SmoothnessCertificate),
    /// No combination of candidate minors is a unit; the basis is of the
    /// system extended by all candidate minors.
    Failed { basis: Vec<Polynomial> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessCertificate {
    pub piece: CoverPiece,
    /// Rows of the Jacobian: the chart equations, then the system generators.
    pub rows: Vec<Polynomial>,
    /// Extra relations holding on the locus but not differentiated (the
    /// branch variables of a normal-crossings check).
    pub side: Vec<Polynomial>,
    pub minors: Vec<Minor>,
    /// `1 ∈ ⟨rows, side, minors⟩` with the piece's generators inverted.
    pub witness: UnitCertificate,
}

impl SmoothnessCertificate {
    /// Recomputes every minor from the rows and re-expands the witness.
    pub fn verify(&self) -> bool {
        let Some(reg) = self.minors.first().map(|m| m.value.registry().clone()) else { return false };
        let all: Vec<usize> = (0..reg.len()).collect();
        let jac = PolyMatrix::jacobian(&self.rows, &all, &reg);
        let rows: Vec<usize> = (0..self.rows.len()).collect();
        for m in &self.minors {
            let ok = if rows.is_empty() { m.value.is_one() } else { jac.minor(&rows, &m.cols).is_ok_and(|v| v == m.value) };
            if !ok {
                return false;
            }
        }
        let Ok(lp) = LocalizedPresentation::new(
            match Ideal::new(&reg, self.rows.iter().chain(&self.side).cloned().collect()) {
                Ok(i) => i,
                Err(_) => return false,
            },
            self.piece.inverted.clone(),
        ) else {
            return false;
        };
        let embed = |ps: &[Polynomial]| -> Option<Vec<Polynomial>> { ps.iter().map(|p| p.embed(self.witness.registry()).ok()).collect() };
        let values: Vec<Polynomial> = self.minors.iter().map(|m| m.value.clone()).collect();
        let (Some(rel), Some(tg)) = (embed(lp.ideal().generators()), embed(&values)) else { return false };
        self.witness.relations() == rel.as_slice() && self.witness.targets() == tg.as_slice() && self.witness.verify()
    }
}

/// Full-rank Jacobian certificate for `rows` (chart equations included by
/// the caller) on `piece ∩ V(rows, side)`, with minors over `allowed` columns.
fn certify_piece(
    reg: &alloc::sync::Arc<crate::poly::VarRegistry>,
    piece: &CoverPiece,
    rows: &[Polynomial],
    side: &[Polynomial],
    candidates: &[Minor],
    budget: &Budget,
) -> Result<PieceVerdict, IdealError> {
    let mut rel: Vec<Polynomial> = rows.to_vec();
    rel.extend(side.iter().cloned());
    let lp = LocalizedPresentation::new(Ideal::new(reg, rel)?, piece.inverted.clone())?;
    if let Some(cert) = monomial_unit(&lp, &[])? {
        return Ok(PieceVerdict::Empty(cert));
    }
    // a single minor that is visibly a unit on the piece
    for m in candidates {
        if let Some(w) = monomial_unit(&lp, core::slice::from_ref(&m.value))? {
            let cert = SmoothnessCertificate {
                piece: piece.clone(),
                rows: rows.to_vec(),
                side: side.to_vec(),
                minors: alloc::vec![m.clone()],
                witness: w,
            };
            return Ok(PieceVerdict::Certified(cert));
        }
    }
    let values: Vec<Polynomial> = candidates.iter().map(|m| m.value.clone()).collect();
    match is_unit(&lp, &values, budget)? {
        UnitVerdict::Proper { basis } => Ok(PieceVerdict::Failed { basis }),
        UnitVerdict::Unit(full) => {
            let used = full.used_targets();
            if used.is_empty() {
                return Ok(PieceVerdict::Empty(is_unit(&lp, &[], budget)?.certificate().cloned().ok_or(IdealError::BadCertificate)?));
            }
            let minors: Vec<Minor> = used.iter().map(|&i| candidates[i].clone()).collect();
            // re-derive with only the minors actually used
            let witness = if used.len() == candidates.len() {
                full
            } else {
                let vals: Vec<Polynomial> = minors.iter().map(|m| m.value.clone()).collect();
                is_unit(&lp, &vals, budget)?.certificate().cloned().ok_or(IdealError::BadCertificate)?
            };
            Ok(PieceVerdict::Certified(SmoothnessCertificate {
                piece: piece.clone(),
                rows: rows.to_vec(),
                side: side.to_vec(),
                minors,
                witness,
            }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceResult {
    pub piece: CoverPiece,
    pub verdict: PieceVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessReport {
    pub chart: String,
    pub ambient: usize,
    /// Number of Jacobian rows: chart equations plus system generators.
    pub codimension: usize,
    pub pieces: Vec<PieceResult>,
}

impl SmoothnessReport {
    pub fn passed(&self) -> bool {
        self.pieces.iter().all(|p| !matches!(p.verdict, PieceVerdict::Failed { .. }))
    }

    pub fn certificates(&self) -> impl Iterator<Item = &SmoothnessCertificate> {
        self.pieces.iter().filter_map(|p| match &p.verdict {
            PieceVerdict::Certified(c) => Some(c),
            _ => None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &PieceResult> {
        self.pieces.iter().filter(|p| matches!(p.verdict, PieceVerdict::Failed { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
    #[error("center does not contain the chart's P variable")]
    CenterMissesP,
}

fn jacobian_rows(c: &ChartPresentation, system: &[Polynomial]) -> Vec<Polynomial> {
    let mut rows = c.equations.clone();
    rows.extend(system.iter().cloned());
    rows
}

fn run_pieces(
    c: &ChartPresentation,
    pieces: &[CoverPiece],
    rows: &[Polynomial],
    side: &[Polynomial],
    allowed: &[usize],
    budget: &Budget,
) -> Result<SmoothnessReport, CertifyError> {
    let all: Vec<usize> = (0..c.reg.len()).collect();
    let jac = PolyMatrix::jacobian(rows, &all, &c.reg);
    let candidates = candidate_minors(&jac, allowed)?;
    let mut out = Vec::new();
    for piece in pieces {
        let verdict = certify_piece(&c.reg, piece, rows, side, &candidates, budget)?;
        out.push(PieceResult { piece: piece.clone(), verdict });
    }
    Ok(SmoothnessReport { chart: c.name.clone(), ambient: c.reg.len(), codimension: rows.len(), pieces: out })
}

/// The center `V(center)` is smooth of codimension `#equations + #center` in
/// the ambient space on every piece: its generators together with the chart
/// equations have a Jacobian of full rank along it.
pub fn smooth_center(c: &ChartPresentation, center: &[Polynomial], budget: &Budget) -> Result<SmoothnessReport, CertifyError> {
    let ideal = Ideal::new(&c.reg, center.to_vec())?;
    let p = c.p_var();
    if !center.contains(&p) && !crate::ideal::contains(&ideal.with(&c.equations)?, &p, budget)?.is_member() {
        return Err(CertifyError::CenterMissesP);
    }
    let pieces = cover_pieces(c, budget)?.pieces;
    run_pieces(c, &pieces, &jacobian_rows(c, center), &[], &column_order(c), budget)
}

/// One subset of branch variables in a normal-crossings check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchIntersection {
    /// Scaling variables set to zero.
    pub branches: Vec<usize>,
    /// Every piece is empty.
    pub empty: bool,
    pub report: SmoothnessReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcReport {
    pub chart: String,
    pub intersections: Vec<BranchIntersection>,
}

impl NcReport {
    pub fn passed(&self) -> bool {
        self.intersections.iter().all(|b| b.report.passed())
    }
}

/// For every nonempty set `S` of scaling variables, `center ∩ V(λ_S)` is
/// empty or smooth of codimension `|S|` in the center: the Jacobian of the
/// center system keeps full rank with the `λ_S` columns removed.
pub fn nc_intersection(c: &ChartPresentation, center: &[Polynomial], budget: &Budget) -> Result<NcReport, CertifyError> {
    let pieces = cover_pieces(c, budget)?.pieces;
    let rows = jacobian_rows(c, center);
    let scaling = c.scaling_indices().to_vec();
    let mut intersections: Vec<BranchIntersection> = Vec::new();
    let mut empty_sets: Vec<Vec<usize>> = Vec::new();
    for size in 1..=scaling.len() {
        for pick in subsets(scaling.len(), size) {
            let s: Vec<usize> = pick.iter().map(|&i| scaling[i]).collect();
            // a superset of an empty intersection is empty
            if empty_sets.iter().any(|e| e.iter().all(|v| s.contains(v))) {
                continue;
            }
            let side: Vec<Polynomial> = s.iter().map(|&v| Polynomial::var_at(&c.reg, v)).collect();
            let allowed: Vec<usize> = column_order(c).into_iter().filter(|v| !s.contains(v)).collect();
            let report = run_pieces(c, &pieces, &rows, &side, &allowed, budget)?;
            let empty = report.pieces.iter().all(|p| matches!(p.verdict, PieceVerdict::Empty(_)));
            if empty {
                empty_sets.push(s.clone());
            }
            intersections.push(BranchIntersection { branches: s, empty, report });
        }
    }
    Ok(NcReport { chart: c.name.clone(), intersections })
}

/// Semi-stability: on every piece the chart equations have a unit maximal
/// minor in columns outside the monomial relation, so they can be solved
/// étale-locally for those coordinates.
pub fn semistable(c: &ChartPresentation, budget: &Budget) -> Result<SmoothnessReport, CertifyError> {
    let pieces = cover_pieces(c, budget)?.pieces;
    let allowed: Vec<usize> = column_order(c).into_iter().filter(|v| !c.monomial.contains(v)).collect();
    run_pieces(c, &pieces, &c.equations, &[], &allowed, budget)
}

/// Variables solved for by a certificate's minors.
pub fn solved_variables(c: &ChartPresentation, cert: &SmoothnessCertificate) -> Vec<Vec<String>> {
    cert.minors.iter().map(|m| m.cols.iter().map(|&i| String::from(c.reg.name(i))).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{blowup_step, CenterSpec};
    use crate::chart::fixtures::{chart, t2};
    use crate::chart::validate;
    use crate::poly::parse;
    use alloc::format;

    fn b() -> Budget {
        Budget::default()
    }

    fn all_verify(r: &SmoothnessReport) -> bool {
        r.certificates().all(SmoothnessCertificate::verify)
    }

    #[test]
    fn no_exclusions_is_one_piece() {
        let c = chart("A", &[("x", &[]), ("P", &[])], &["x", "P"], &[], &[], None);
        let cover = cover_pieces(&c, &b()).unwrap();
        assert_eq!(cover.pieces.len(), 1);
        assert!(cover.pieces[0].inverted.is_empty());
    }

    #[test]
    fn contradictory_piece_is_dropped() {
        // x = 0 on the chart, so inverting x is empty
        let c = chart("A", &[("x", &[]), ("y", &[]), ("P", &[])], &["P"], &["x"], &[&["x", "y"]], None);
        let cover = cover_pieces(&c, &b()).unwrap();
        assert_eq!(cover.pieces.len(), 1);
        assert_eq!(cover.pieces[0].label(), "A[y]");
        assert_eq!(cover.dropped.len(), 1);
    }

    #[test]
    fn three_concurrent_lines_are_not_semistable() {
        // x·y·(x+y) = p written as x·y·z = p with z = x + y: the only row
        // needs the z column, which is a branch variable
        let c = chart("F", &[("x", &[]), ("y", &[]), ("z", &[])], &["x", "y", "z"], &["z - x - y"], &[], None);
        assert!(validate(&c).is_valid());
        let r = semistable(&c, &b()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert!(matches!(r.pieces[0].verdict, PieceVerdict::Failed { .. }));
        // with z free the same equation is fine
        let c = chart("G", &[("x", &[]), ("y", &[]), ("z", &[])], &["x", "y"], &["z - x - y"], &[], None);
        let r = semistable(&c, &b()).unwrap();
        assert!(r.passed() && all_verify(&r));
        assert_eq!(solved_variables(&c, r.certificates().next().unwrap()), [["z"]]);
    }

    #[test]
    fn step3_chart_is_semistable() {
        let c = t2();
        let r = semistable(&c, &b()).unwrap();
        assert!(r.passed(), "{:?}", r.failures().map(|f| f.piece.label()).collect::<Vec<_>>());
        assert!(all_verify(&r));
        assert_eq!(r.codimension, 1);
    }

    #[test]
    fn center_must_lie_over_p() {
        let c = chart("A", &[("x", &[]), ("y", &[]), ("P", &[])], &["x", "P"], &[], &[], None);
        let y = c.var("y").unwrap();
        assert_eq!(smooth_center(&c, &[y], &b()), Err(CertifyError::CenterMissesP));
    }

    #[test]
    fn branch_center_meets_other_branch_in_codimension_one() {
        let c = chart("A", &[("x", &[]), ("y", &[]), ("P", &[])], &["x", "P"], &[], &[], None);
        let center = [c.p_var()];
        let s = smooth_center(&c, &center, &b()).unwrap();
        assert!(s.passed());
        let m = &s.certificates().next().unwrap().minors[0];
        assert!(m.value.is_one());
        let nc = nc_intersection(&c, &center, &b()).unwrap();
        assert!(nc.passed());
        assert_eq!(nc.intersections.len(), 1);
        let x = &nc.intersections[0];
        assert_eq!(x.branches.len(), 1);
        assert!(!x.empty);
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let c = t2();
        let r = semistable(&c, &b()).unwrap();
        let mut cert = r.certificates().next().unwrap().clone();
        assert!(cert.verify());
        cert.minors[0].value = &cert.minors[0].value + &Polynomial::one(&c.reg);
        assert!(!cert.verify());
    }

    fn model(n: usize, r: usize) -> ChartPresentation {
        let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
        let vars: Vec<(&str, &[i64])> = names.iter().map(|s| (s.as_str(), &[][..])).collect();
        let mono: Vec<&str> = names[..r].iter().map(String::as_str).collect();
        chart("M", &vars, &mono, &[], &[], None)
    }

    #[test]
    fn model_chart_sweep() {
        for n in 2..=6 {
            for r in 1..=3 {
                for m in 1..=3 {
                    if r + m > n {
                        continue;
                    }
                    let c = model(n, r);
                    let gens: Vec<Polynomial> = (r..=r + m).map(|i| c.var(&format!("t{i}")).unwrap()).collect();
                    let ctx = format!("n={n} r={r} m={m}");
                    assert!(smooth_center(&c, &gens, &b()).unwrap().passed(), "{ctx}");
                    assert!(nc_intersection(&c, &gens, &b()).unwrap().passed(), "{ctx}");
                    let spec = CenterSpec {
                        chart: "M".into(),
                        generators: gens,
                        denominator: None,
                        fresh_names: alloc::vec!["lam".into(), "PP".into()],
                    };
                    let up = blowup_step(&c, &spec, &b()).unwrap();
                    assert!(validate(&up).is_valid(), "{ctx}");
                    assert_eq!(up.monomial.len(), r + 1, "{ctx}");
                    assert_eq!(up.excluded.len(), 1);
                    assert_eq!(cover_pieces(&up, &b()).unwrap().pieces.len(), m + 1, "{ctx}");
                    let s = semistable(&up, &b()).unwrap();
                    assert!(s.passed(), "{ctx}");
                }
            }
        }
    }

    #[test]
    fn diagonal_center_on_hyperbola() {
        // the (P, x, y) minor is −(x + y) = −2x, a unit since x·y = 1
        let c = chart("Q", &[("l", &[]), ("P", &[]), ("x", &[]), ("y", &[])], &["l", "P"], &["x*y - 1"], &[], None);
        let center = [c.p_var(), parse("x - y", &c.reg).unwrap()];
        let r = smooth_center(&c, &center, &b()).unwrap();
        assert!(r.passed() && all_verify(&r));
    }
}
