//! Weak mutually unbiased bases for `d = d1 d2`.
//!
//! The `psi(d) = (d1+1)(d2+1)` bases are CRT tensor products of the prime
//! MUBs of `H_d1` and `H_d2`, indexed exactly like the maximal-line catalog so
//! that basis `B_i` is dual to line `L_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ndarray::Array2;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::geometry::{
    catalog_order, classify_line_pair, partition_factor_pairs, redundancy, symplectic_label,
    FactorIndex, LinePairCensus, MaximalLineCatalog, SymplecticMatrix,
};
use crate::hilbert::{
    assemble_tensor_basis, conjugation_deviation, factor_basis, OrthonormalBasis,
};
use crate::zring::CrtContext;

/// Default tolerance for overlap classification, applied to squared
/// magnitudes.
pub const OVERLAP_EPS: f64 = 1e-9;

/// The three overlap templates a pair of weak MUBs may follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OverlapCategory {
    /// `d1^{-1/2}` where `n = m (mod d2)`, zero elsewhere.
    SubD1,
    /// `d2^{-1/2}` where `n = m (mod d1)`, zero elsewhere.
    SubD2,
    /// `d^{-1/2}` everywhere: the pair is mutually unbiased.
    Full,
}

impl OverlapCategory {
    pub const ALL: [OverlapCategory; 3] = [
        OverlapCategory::SubD1,
        OverlapCategory::SubD2,
        OverlapCategory::Full,
    ];

    /// Squared template value at `(n, m)`.
    fn template(self, ctx: &CrtContext, n: u64, m: u64) -> f64 {
        let (d1, d2) = (ctx.d1(), ctx.d2());
        match self {
            OverlapCategory::SubD1 if n % d2 == m % d2 => 1.0 / d1 as f64,
            OverlapCategory::SubD2 if n % d1 == m % d1 => 1.0 / d2 as f64,
            OverlapCategory::Full => 1.0 / ctx.d() as f64,
            _ => 0.0,
        }
    }

    /// The nonzero overlap magnitude of the template.
    pub fn value(self, ctx: &CrtContext) -> f64 {
        let n = match self {
            OverlapCategory::SubD1 => ctx.d1(),
            OverlapCategory::SubD2 => ctx.d2(),
            OverlapCategory::Full => ctx.d(),
        };
        (n as f64).powf(-0.5)
    }

    /// Size of the support set.
    pub fn support(self, ctx: &CrtContext) -> usize {
        let d = ctx.d() as usize;
        match self {
            OverlapCategory::SubD1 => ctx.d1() as usize * d,
            OverlapCategory::SubD2 => ctx.d2() as usize * d,
            OverlapCategory::Full => d * d,
        }
    }

    /// Number of common points of the dual pair of maximal lines.
    pub fn dual_intersection(self, ctx: &CrtContext) -> u64 {
        match self {
            OverlapCategory::SubD1 => ctx.d2(),
            OverlapCategory::SubD2 => ctx.d1(),
            OverlapCategory::Full => 1,
        }
    }
}

impl fmt::Display for OverlapCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlapCategory::SubD1 => "d1^{-1/2}",
            OverlapCategory::SubD2 => "d2^{-1/2}",
            OverlapCategory::Full => "d^{-1/2}",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapClass {
    pub category: OverlapCategory,
    /// Mean nonzero overlap magnitude.
    pub value: f64,
    /// Number of `(n, m)` with nonzero overlap.
    pub support_count: usize,
    /// Largest deviation of a squared entry from the template.
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct WmubEntry {
    /// One-based.
    pub index: usize,
    pub factors: (FactorIndex, FactorIndex),
    pub basis: OrthonormalBasis,
    /// `(k,l|m,n)` with `S(k,l|m,n)|X;m> = |B;m>`.
    pub label: SymplecticMatrix,
}

#[derive(Debug, Clone)]
pub struct WmubSet {
    ctx: CrtContext,
    entries: Vec<WmubEntry>,
}

pub fn build_wmub(ctx: &CrtContext) -> Result<WmubSet> {
    let first: BTreeMap<FactorIndex, OrthonormalBasis> = FactorIndex::all(ctx.d1())
        .map(|f| Ok((f, factor_basis(ctx.d1(), f)?)))
        .collect::<Result<_>>()?;
    let second: BTreeMap<FactorIndex, OrthonormalBasis> = FactorIndex::all(ctx.d2())
        .map(|f| Ok((f, factor_basis(ctx.d2(), f)?)))
        .collect::<Result<_>>()?;
    let entries = catalog_order(ctx)
        .into_iter()
        .enumerate()
        .map(|(i, (f1, f2))| {
            Ok(WmubEntry {
                index: i + 1,
                factors: (f1, f2),
                basis: assemble_tensor_basis(&first[&f1], &second[&f2], ctx)?,
                label: symplectic_label(ctx, f1, f2),
            })
        })
        .collect::<Result<_>>()?;
    Ok(WmubSet { ctx: *ctx, entries })
}

impl WmubSet {
    pub fn ctx(&self) -> &CrtContext {
        &self.ctx
    }

    pub fn entries(&self) -> &[WmubEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One-based lookup.
    pub fn get(&self, index: usize) -> Result<&WmubEntry> {
        index
            .checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.entries.len(),
            })
    }

    /// All unordered pairs `(i, j)`, `i < j`, one-based.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.entries.len();
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }
}

/// `f_ji(n, m) = |<B_j;n|B_i;m>|`.
pub fn overlap_table(s: &WmubSet, i: usize, j: usize) -> Result<Array2<f64>> {
    let bi = &s.get(i)?.basis;
    let bj = &s.get(j)?.basis;
    bj.overlaps(bi)
}

/// Matches the whole table `f_ji` against the three templates.
pub fn classify_pair(s: &WmubSet, i: usize, j: usize, tol: f64) -> Result<OverlapClass> {
    if i == j {
        return Err(Error::IdenticalPair(i, j));
    }
    let table = overlap_table(s, i, j)?;
    let ctx = s.ctx();
    let d = ctx.d();
    let deviation = |cat: OverlapCategory| {
        table
            .indexed_iter()
            .map(|((n, m), v)| (v * v - cat.template(ctx, n as u64, m as u64)).abs())
            .fold(0.0, f64::max)
    };
    let (category, max_deviation) = OverlapCategory::ALL
        .into_iter()
        .map(|c| (c, deviation(c)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three templates");
    if !(max_deviation <= tol) {
        return Err(Error::NotWeaklyUnbiased {
            i,
            j,
            deviation: max_deviation,
        });
    }
    let cutoff = 0.5 / d as f64;
    let support: Vec<f64> = table.iter().copied().filter(|v| v * v > cutoff).collect();
    Ok(OverlapClass {
        category,
        value: support.iter().sum::<f64>() / support.len() as f64,
        support_count: support.len(),
        max_deviation,
    })
}

/// Classification of every unordered pair, keyed by `(i, j)` with `i < j`.
pub fn classify_all(s: &WmubSet, tol: f64) -> Result<BTreeMap<(usize, usize), OverlapClass>> {
    s.pairs()
        .map(|(i, j)| Ok(((i, j), classify_pair(s, i, j, tol)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WmubCensus {
    pub sub_d1: usize,
    pub sub_d2: usize,
    pub full: usize,
}

impl WmubCensus {
    /// `(d1 psi / 2, d2 psi / 2, d psi / 2)`.
    pub fn expected(ctx: &CrtContext) -> Self {
        let l = LinePairCensus::expected(ctx);
        Self {
            sub_d1: l.size_d2,
            sub_d2: l.size_d1,
            full: l.size_1,
        }
    }

    pub fn total(&self) -> usize {
        self.sub_d1 + self.sub_d2 + self.full
    }

    fn add(&mut self, c: OverlapCategory) {
        match c {
            OverlapCategory::SubD1 => self.sub_d1 += 1,
            OverlapCategory::SubD2 => self.sub_d2 += 1,
            OverlapCategory::Full => self.full += 1,
        }
    }
}

pub fn wmub_census(s: &WmubSet, tol: f64) -> Result<WmubCensus> {
    let mut census = WmubCensus::default();
    for class in classify_all(s, tol)?.values() {
        census.add(class.category);
    }
    Ok(census)
}

/// How two factor bases relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorRelation {
    Same,
    Unbiased,
    Other,
}

fn factor_relation(a: &OrthonormalBasis, b: &OrthonormalBasis, tol: f64) -> Result<FactorRelation> {
    let o = a.overlaps(b)?;
    let p = a.dim();
    let same = o
        .indexed_iter()
        .all(|((n, m), v)| (v - if n == m { 1.0 } else { 0.0 }).abs() <= tol);
    if same {
        return Ok(FactorRelation::Same);
    }
    let flat = (p as f64).powf(-0.5);
    if o.iter().all(|v| (v - flat).abs() <= tol) {
        return Ok(FactorRelation::Unbiased);
    }
    Ok(FactorRelation::Other)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFactorCheck {
    pub i: usize,
    pub j: usize,
    pub category: OverlapCategory,
    pub first: FactorRelation,
    pub second: FactorRelation,
    /// `SubD1`: second factors equal, first unbiased; `SubD2`: the mirror;
    /// `Full`: both unbiased.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorStructureReport {
    pub pairs: Vec<PairFactorCheck>,
}

impl FactorStructureReport {
    pub fn all_consistent(&self) -> bool {
        self.pairs.iter().all(|p| p.consistent)
    }
}

/// Confirms that each pair's overlap category comes from the expected
/// relation between the factor bases.
pub fn factor_structure_check(s: &WmubSet, tol: f64) -> Result<FactorStructureReport> {
    let ctx = s.ctx();
    let first: BTreeMap<FactorIndex, OrthonormalBasis> = FactorIndex::all(ctx.d1())
        .map(|f| Ok((f, factor_basis(ctx.d1(), f)?)))
        .collect::<Result<_>>()?;
    let second: BTreeMap<FactorIndex, OrthonormalBasis> = FactorIndex::all(ctx.d2())
        .map(|f| Ok((f, factor_basis(ctx.d2(), f)?)))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (i, j) in s.pairs() {
        let (a, b) = (s.get(i)?, s.get(j)?);
        let category = classify_pair(s, i, j, tol)?.category;
        let r1 = factor_relation(&first[&a.factors.0], &first[&b.factors.0], tol)?;
        let r2 = factor_relation(&second[&a.factors.1], &second[&b.factors.1], tol)?;
        use FactorRelation::*;
        let consistent = matches!(
            (category, r1, r2),
            (OverlapCategory::SubD1, Unbiased, Same)
                | (OverlapCategory::SubD2, Same, Unbiased)
                | (OverlapCategory::Full, Unbiased, Unbiased)
        );
        pairs.push(PairFactorCheck {
            i,
            j,
            category,
            first: r1,
            second: r2,
            consistent,
        });
    }
    Ok(FactorStructureReport { pairs })
}

/// The sets `T_0 .. T_{d2}` as one-based basis indices, located by factor
/// labels. Bases in the same set are mutually unbiased.
pub fn partition_t(s: &WmubSet) -> Vec<BTreeSet<usize>> {
    let by_factors: BTreeMap<(FactorIndex, FactorIndex), usize> = s
        .entries()
        .iter()
        .map(|e| (e.factors, e.index))
        .collect();
    partition_factor_pairs(s.ctx())
        .into_iter()
        .map(|set| set.iter().map(|f| by_factors[f]).collect())
        .collect()
}

/// `max_n |sum_m f_ji(n,m)^2 - 1|`.
pub fn normalization_error(s: &WmubSet, i: usize, j: usize) -> Result<f64> {
    let table = overlap_table(s, i, j)?;
    Ok(table
        .rows()
        .into_iter()
        .map(|row| (row.iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Deviation of basis `i` from its symplectic label under conjugation of
/// `X` and `Z` in `H_d`.
pub fn label_conjugation_deviation(s: &WmubSet, i: usize) -> Result<f64> {
    let e = s.get(i)?;
    conjugation_deviation(e.basis.unitary(), &e.label)
}

/// Bases `(a, b, c)` where `(a,b)` and `(a,c)` are mutually unbiased but
/// `(b,c)` is not; the first such triple in index order.
pub fn find_unbiased_chain_break(
    s: &WmubSet,
    tol: f64,
) -> Result<Option<(usize, usize, usize)>> {
    let classes = classify_all(s, tol)?;
    let full = |x: usize, y: usize| {
        let key = if x < y { (x, y) } else { (y, x) };
        classes[&key].category == OverlapCategory::Full
    };
    let n = s.len();
    for a in 1..=n {
        for b in 1..=n {
            for c in b + 1..=n {
                if a != b && a != c && full(a, b) && full(a, c) && !full(b, c) {
                    return Ok(Some((a, b, c)));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityPair {
    pub i: usize,
    pub j: usize,
    pub intersection_size: u64,
    pub category: OverlapCategory,
    pub value: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub pairs: Vec<DualityPair>,
    pub line_census: LinePairCensus,
    pub basis_census: WmubCensus,
    /// Line `L_i` and basis `B_i` carry the same symplectic matrix for all `i`.
    pub labels_agree: bool,
    pub redundancy: Ratio<i64>,
}

impl DualityReport {
    pub fn all_match(&self) -> bool {
        self.labels_agree && self.pairs.iter().all(|p| p.matches)
    }
}

/// Zips the line catalog and the basis set index by index and checks every
/// pair against the dictionary: `d2` common points <-> `d1^{-1/2}`, `d1`
/// common points <-> `d2^{-1/2}`, origin only <-> `d^{-1/2}`.
pub fn duality_report(
    catalog: &MaximalLineCatalog,
    s: &WmubSet,
    tol: f64,
) -> Result<DualityReport> {
    let ctx = s.ctx();
    if catalog.ctx() != ctx || catalog.len() != s.len() {
        return Err(Error::ContextMismatch);
    }
    for (line, basis) in catalog.entries().iter().zip(s.entries()) {
        if line.matrix != basis.label || line.factors != basis.factors {
            return Err(Error::DualityViolation {
                i: line.index,
                j: basis.index,
                reason: format!("line label {} vs basis label {}", line.matrix, basis.label),
            });
        }
    }
    let mut pairs = Vec::new();
    let mut line_census = LinePairCensus::default();
    let mut basis_census = WmubCensus::default();
    for (i, j) in s.pairs() {
        let lc = classify_line_pair(&catalog.get(i)?.line, &catalog.get(j)?.line, ctx)?;
        let bc = classify_pair(s, i, j, tol)?;
        match lc.intersection_size {
            x if x == ctx.d2() => line_census.size_d2 += 1,
            x if x == ctx.d1() => line_census.size_d1 += 1,
            _ => line_census.size_1 += 1,
        }
        basis_census.add(bc.category);
        let matches = bc.category.dual_intersection(ctx) == lc.intersection_size;
        if !matches {
            return Err(Error::DualityViolation {
                i,
                j,
                reason: format!(
                    "{} common points but overlap {}",
                    lc.intersection_size, bc.category
                ),
            });
        }
        pairs.push(DualityPair {
            i,
            j,
            intersection_size: lc.intersection_size,
            category: bc.category,
            value: bc.value,
            matches,
        });
    }
    Ok(DualityReport {
        pairs,
        line_census,
        basis_census,
        labels_agree: true,
        redundancy: redundancy(&ctx.modulus()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MaximalLineCatalog;

    fn set15() -> WmubSet {
        build_wmub(&CrtContext::new(3, 5).unwrap()).unwrap()
    }

    #[test]
    fn build_d15() {
        let s = set15();
        assert_eq!(s.len(), 24);
        assert_eq!(
            s.get(4).unwrap().factors,
            (FactorIndex::Reference, FactorIndex::Shear(2))
        );
        assert_eq!(s.get(10).unwrap().label.entries(), [0, 2, 7, 0]);
        assert!(s.get(1).unwrap().label.is_identity());
        let b1 = s.get(1).unwrap().basis.unitary();
        assert!(b1.max_deviation(&crate::hilbert::UnitaryMatrix::identity(15)) == 0.0);
        for e in s.entries() {
            assert!(e.basis.orthonormality_error() < 1e-10);
        }
    }

    #[test]
    fn overlap_examples() {
        let s = set15();
        let t = overlap_table(&s, 1, 1).unwrap();
        for ((n, m), v) in t.indexed_iter() {
            assert!((v - if n == m { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        let t = overlap_table(&s, 1, 2).unwrap();
        for ((n, m), v) in t.indexed_iter() {
            let want = if n % 3 == m % 3 { 5f64.powf(-0.5) } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
        let t = overlap_table(&s, 1, 10).unwrap();
        assert!(t.iter().all(|v| (v - 15f64.powf(-0.5)).abs() < 1e-12));
        assert!(matches!(
            overlap_table(&s, 0, 1),
            Err(Error::IndexOutOfRange { index: 0, len: 24 })
        ));
        assert!(matches!(
            overlap_table(&s, 1, 25),
            Err(Error::IndexOutOfRange { index: 25, len: 24 })
        ));
    }

    #[test]
    fn overlap_symmetry() {
        let s = set15();
        for (i, j) in [(1, 7), (3, 20), (11, 24)] {
            let a = overlap_table(&s, i, j).unwrap();
            let b = overlap_table(&s, j, i).unwrap();
            assert!(a.t().iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn classify_examples() {
        let s = set15();
        let c = classify_pair(&s, 1, 7, OVERLAP_EPS).unwrap();
        assert_eq!(c.category, OverlapCategory::SubD1);
        assert_eq!(c.support_count, 45);
        assert!((c.value - 3f64.powf(-0.5)).abs() < 1e-12);
        let c = classify_pair(&s, 1, 2, OVERLAP_EPS).unwrap();
        assert_eq!(c.category, OverlapCategory::SubD2);
        assert_eq!(c.support_count, 75);
        let c = classify_pair(&s, 1, 10, OVERLAP_EPS).unwrap();
        assert_eq!(c.category, OverlapCategory::Full);
        assert_eq!(c.support_count, 225);
        assert!((c.value - 15f64.powf(-0.5)).abs() < 1e-12);
        assert_eq!(classify_pair(&s, 3, 3, OVERLAP_EPS), Err(Error::IdenticalPair(3, 3)));
    }

    #[test]
    fn census_d15() {
        let s = set15();
        let c = wmub_census(&s, OVERLAP_EPS).unwrap();
        assert_eq!(
            c,
            WmubCensus {
                sub_d1: 36,
                sub_d2: 60,
                full: 180
            }
        );
        assert_eq!(c, WmubCensus::expected(s.ctx()));
    }

    #[test]
    fn factor_structure() {
        let s = set15();
        let r = factor_structure_check(&s, 1e-9).unwrap();
        assert!(r.all_consistent());
        let find = |i, j| *r.pairs.iter().find(|p| p.i == i && p.j == j).unwrap();
        assert_eq!(find(1, 7).second, FactorRelation::Same);
        assert_eq!(find(2, 3).first, FactorRelation::Same);
        assert_eq!(find(2, 3).second, FactorRelation::Unbiased);
        let p = find(10, 16);
        assert_eq!((p.first, p.second), (FactorRelation::Unbiased, FactorRelation::Unbiased));
    }

    #[test]
    fn partition_t_d15() {
        let s = set15();
        let t = partition_t(&s);
        assert_eq!(t[0], BTreeSet::from([1, 10, 16, 22]));
        assert_eq!(t[3], BTreeSet::from([4, 9, 13, 19]));
        assert_eq!(t[5], BTreeSet::from([6, 7, 15, 21]));
        for set in &t {
            let v: Vec<usize> = set.iter().copied().collect();
            for (x, &a) in v.iter().enumerate() {
                for &b in &v[x + 1..] {
                    let c = classify_pair(&s, a, b, OVERLAP_EPS).unwrap();
                    assert_eq!(c.category, OverlapCategory::Full);
                }
            }
        }
        assert_eq!(t, crate::geometry::partition_s(s.ctx()));
    }

    #[test]
    fn labels_conjugate_correctly() {
        let s = set15();
        for i in 1..=s.len() {
            assert!(label_conjugation_deviation(&s, i).unwrap() < 1e-9, "B_{i}");
        }
    }

    #[test]
    fn chain_break_exists() {
        let s = set15();
        let (a, b, c) = find_unbiased_chain_break(&s, OVERLAP_EPS).unwrap().unwrap();
        assert_eq!(classify_pair(&s, a, b, OVERLAP_EPS).unwrap().category, OverlapCategory::Full);
        assert_eq!(classify_pair(&s, a, c, OVERLAP_EPS).unwrap().category, OverlapCategory::Full);
        assert_ne!(classify_pair(&s, b, c, OVERLAP_EPS).unwrap().category, OverlapCategory::Full);
    }

    #[test]
    fn duality_d15() {
        let ctx = CrtContext::new(3, 5).unwrap();
        let s = build_wmub(&ctx).unwrap();
        let cat = MaximalLineCatalog::new(&ctx);
        let r = duality_report(&cat, &s, OVERLAP_EPS).unwrap();
        assert!(r.all_match());
        assert_eq!(r.pairs.len(), 276);
        assert_eq!(r.line_census, LinePairCensus::expected(&ctx));
        assert_eq!(r.basis_census, WmubCensus::expected(&ctx));
        assert_eq!(r.redundancy, Ratio::new(1, 2));
        let p = r.pairs.iter().find(|p| (p.i, p.j) == (1, 7)).unwrap();
        assert_eq!(p.intersection_size, 5);
        assert!((p.value - 3f64.powf(-0.5)).abs() < 1e-12);

        let other = MaximalLineCatalog::new(&CrtContext::new(3, 7).unwrap());
        assert_eq!(duality_report(&other, &s, OVERLAP_EPS), Err(Error::ContextMismatch));
    }

    #[test]
    fn rows_normalized() {
        let s = set15();
        for (i, j) in [(1, 1), (1, 7), (2, 13), (24, 9)] {
            assert!(normalization_error(&s, i, j).unwrap() < 1e-12);
        }
    }
}
