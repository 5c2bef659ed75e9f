use std::collections::BTreeSet;
use std::fmt;

use super::line::{intersection, Line, Point};
use super::symplectic::SymplecticMatrix;
use crate::error::{Error, Result};
use crate::zring::{gcd, mul_mod, neg_mod, sub_mod, CrtContext};

/// Label of a line through the origin in `Z(p) x Z(p)` (or of the matching
/// MUB in `H_p`) for prime `p`.
///
/// `Reference` is `L(0,1)` (the position basis); `Shear(l)` is
/// `g(0,1|-1,-l) L(0,1) = L(1,-l)` (the basis `S(0,1|-1,-l)|X;m>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorIndex {
    Reference,
    Shear(u64),
}

impl FactorIndex {
    /// `Reference, Shear(0), ..., Shear(p-1)`.
    pub fn all(p: u64) -> impl Iterator<Item = FactorIndex> {
        std::iter::once(FactorIndex::Reference).chain((0..p).map(FactorIndex::Shear))
    }

    /// Position in `Z(p+1)` used by the partitions: `Reference -> 0`,
    /// `Shear(l) -> l + 1`.
    pub fn slot(self) -> u64 {
        match self {
            FactorIndex::Reference => 0,
            FactorIndex::Shear(l) => l + 1,
        }
    }

    pub fn from_slot(slot: u64, p: u64) -> Self {
        match slot % (p + 1) {
            0 => FactorIndex::Reference,
            s => FactorIndex::Shear(s - 1),
        }
    }

    /// The matrix taking `L(0,1)` to this line.
    pub fn matrix(self, p: u64) -> SymplecticMatrix {
        match self {
            FactorIndex::Reference => SymplecticMatrix::identity(p),
            FactorIndex::Shear(l) => SymplecticMatrix::new(p, 0, 1, p - 1, neg_mod(l, p))
                .expect("g(0,1|-1,-l) has determinant 1"),
        }
    }

    /// Canonical generator of the component line in `Z(p) x Z(p)`.
    pub fn generator(self, p: u64) -> Point {
        match self {
            FactorIndex::Reference => (0, 1),
            FactorIndex::Shear(l) => (1, neg_mod(l, p)),
        }
    }

    /// Inverse of [`Self::generator`] for a canonical generator.
    pub fn from_generator((nu, mu): Point, p: u64) -> Option<Self> {
        match (nu, mu) {
            (0, 1) => Some(FactorIndex::Reference),
            (1, mu) if mu < p => Some(FactorIndex::Shear(neg_mod(mu, p))),
            _ => None,
        }
    }
}

impl fmt::Display for FactorIndex {
    /// Signed notation: `(0,1|-1,0)`, `(0,1|-1,-2)`; empty for `Reference`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorIndex::Reference => Ok(()),
            FactorIndex::Shear(0) => write!(f, "(0,1|-1,0)"),
            FactorIndex::Shear(l) => write!(f, "(0,1|-1,-{l})"),
        }
    }
}

/// One-based position of the pair `(first, second)` in the catalog ordering
/// `L_1; L_{2+l2}; L_{2+d2+l1}; L_{2+d1+d2+l2+l1 d2}`.
pub fn catalog_index(ctx: &CrtContext, first: FactorIndex, second: FactorIndex) -> usize {
    let (d1, d2) = (ctx.d1(), ctx.d2());
    let i = match (first, second) {
        (FactorIndex::Reference, FactorIndex::Reference) => 1,
        (FactorIndex::Reference, FactorIndex::Shear(l2)) => 2 + l2,
        (FactorIndex::Shear(l1), FactorIndex::Reference) => 2 + d2 + l1,
        (FactorIndex::Shear(l1), FactorIndex::Shear(l2)) => 2 + d1 + d2 + l2 + l1 * d2,
    };
    i as usize
}

/// All `(first, second)` pairs in catalog order.
pub fn catalog_order(ctx: &CrtContext) -> Vec<(FactorIndex, FactorIndex)> {
    let (d1, d2) = (ctx.d1(), ctx.d2());
    let mut out = vec![(FactorIndex::Reference, FactorIndex::Reference)];
    out.extend((0..d2).map(|l2| (FactorIndex::Reference, FactorIndex::Shear(l2))));
    out.extend((0..d1).map(|l1| (FactorIndex::Shear(l1), FactorIndex::Reference)));
    for l1 in 0..d1 {
        out.extend((0..d2).map(|l2| (FactorIndex::Shear(l1), FactorIndex::Shear(l2))));
    }
    debug_assert!(out
        .iter()
        .enumerate()
        .all(|(i, &(a, b))| catalog_index(ctx, a, b) == i + 1));
    out
}

/// The `Z(d)` symplectic matrix whose action on `L(0,1)` produces the
/// product line `first x second`. The same matrix labels the matching
/// weak MUB.
pub fn symplectic_label(
    ctx: &CrtContext,
    first: FactorIndex,
    second: FactorIndex,
) -> SymplecticMatrix {
    let d = ctx.d();
    let (d1, d2, s1, s2, t1, t2) = (ctx.d1(), ctx.d2(), ctx.s1(), ctx.s2(), ctx.t1(), ctx.t2());
    let g = match (first, second) {
        (FactorIndex::Reference, FactorIndex::Reference) => Ok(SymplecticMatrix::identity(d)),
        // g(s1, t2 s2 | -d1, s1 - l2 s2)
        (FactorIndex::Reference, FactorIndex::Shear(l2)) => SymplecticMatrix::new(
            d,
            s1,
            mul_mod(t2, s2, d),
            neg_mod(d1, d),
            sub_mod(s1, mul_mod(l2, s2, d), d),
        ),
        // g(s2, t1 s1 | -d2, s2 - l1 s1)
        (FactorIndex::Shear(l1), FactorIndex::Reference) => SymplecticMatrix::new(
            d,
            s2,
            mul_mod(t1, s1, d),
            neg_mod(d2, d),
            sub_mod(s2, mul_mod(l1, s1, d), d),
        ),
        // g(0, eta | -d1 - d2, -l1 s1 - l2 s2), eta = t1^2 d2 + t2^2 d1
        (FactorIndex::Shear(l1), FactorIndex::Shear(l2)) => {
            let eta = (mul_mod(mul_mod(t1, t1, d), d2, d) + mul_mod(mul_mod(t2, t2, d), d1, d)) % d;
            SymplecticMatrix::new(
                d,
                0,
                eta,
                neg_mod(d1 + d2, d),
                neg_mod((mul_mod(l1, s1, d) + mul_mod(l2, s2, d)) % d, d),
            )
        }
    };
    g.expect("catalog matrices have determinant 1")
}

/// Component generators of a line under the point map `(m, n) -> (m1, m2,
/// n1bar, n2bar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineFactors {
    /// `((nu1, mu1bar), (nu2, mu2bar))` taken straight from the line's generator.
    pub raw: (Point, Point),
    /// The same component lines with canonical generators in `Z(d1)`, `Z(d2)`.
    pub canonical: (Point, Point),
}

pub fn factorize_line(line: &Line, ctx: &CrtContext) -> Result<LineFactors> {
    if line.modulus() != ctx.d() {
        return Err(Error::ModulusMismatch {
            left: line.modulus(),
            right: ctx.d(),
        });
    }
    let (nu, mu) = line.generator();
    let (nu1, nu2) = ctx.map1_split(nu);
    let (mu1, mu2) = ctx.map2_split(mu);
    let c1 = Line::new(ctx.d1(), nu1, mu1).canonical_generator();
    let c2 = Line::new(ctx.d2(), nu2, mu2).canonical_generator();
    Ok(LineFactors {
        raw: ((nu1, mu1), (nu2, mu2)),
        canonical: (c1, c2),
    })
}

/// Generator of the product line `L1(g1) x L2(g2)` in `Z(d) x Z(d)`.
pub fn join_components(ctx: &CrtContext, (nu1, mu1): Point, (nu2, mu2): Point) -> Point {
    (ctx.map1_join(nu1, nu2), ctx.map2_join(mu1, mu2))
}

/// Divides a generator by the part of `gcd(nu, mu)` that is coprime to `d`.
/// The result generates the same line with the smallest integer entries
/// along that ray.
pub fn primitive_generator(d: u64, (nu, mu): Point) -> Point {
    let mut g = gcd(nu, mu);
    if g == 0 {
        return (nu, mu);
    }
    loop {
        let shared = gcd(g, d);
        if shared == 1 {
            break;
        }
        g /= shared;
    }
    (nu / g, mu / g)
}

/// Splits `g(kappa, lambda | mu, nu)` over `Z(d1 d2)` into
/// `g1(kappa1, lambda1 r1 | mu1bar, nu1)` and `g2(kappa2, lambda2 r2 | mu2bar, nu2)`.
pub fn matrix_factorize(
    g: &SymplecticMatrix,
    ctx: &CrtContext,
) -> Result<(SymplecticMatrix, SymplecticMatrix)> {
    if g.modulus() != ctx.d() {
        return Err(Error::ModulusMismatch {
            left: g.modulus(),
            right: ctx.d(),
        });
    }
    let [k, l, m, n] = g.entries();
    let (k1, k2) = ctx.map1_split(k);
    let (l1, l2) = ctx.map1_split(l);
    let (m1, m2) = ctx.map2_split(m);
    let (n1, n2) = ctx.map1_split(n);
    let g1 = SymplecticMatrix::new(ctx.d1(), k1, mul_mod(l1, ctx.r1(), ctx.d1()), m1, n1)?;
    let g2 = SymplecticMatrix::new(ctx.d2(), k2, mul_mod(l2, ctx.r2(), ctx.d2()), m2, n2)?;
    Ok((g1, g2))
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// One-based.
    pub index: usize,
    pub factors: (FactorIndex, FactorIndex),
    pub line: Line,
    /// Canonical generators of the two component lines.
    pub components: (Point, Point),
    pub matrix: SymplecticMatrix,
}

/// The `psi(d)` maximal lines through the origin of `Z(d1 d2) x Z(d1 d2)`.
#[derive(Debug, Clone)]
pub struct MaximalLineCatalog {
    ctx: CrtContext,
    entries: Vec<CatalogEntry>,
}

impl MaximalLineCatalog {
    pub fn new(ctx: &CrtContext) -> Self {
        let d = ctx.d();
        let reference = Line::new(d, 0, 1);
        let entries = catalog_order(ctx)
            .into_iter()
            .enumerate()
            .map(|(i, (f1, f2))| {
                let c1 = f1.generator(ctx.d1());
                let c2 = f2.generator(ctx.d2());
                let (nu, mu) = primitive_generator(d, join_components(ctx, c1, c2));
                let line = Line::new(d, nu, mu);
                let matrix = symplectic_label(ctx, f1, f2);
                let image = matrix.act_on_line(&reference).expect("same modulus");
                assert_eq!(image, line, "catalog matrix {matrix} does not produce L_{}", i + 1);
                assert!(line.is_maximal());
                CatalogEntry {
                    index: i + 1,
                    factors: (f1, f2),
                    line,
                    components: (c1, c2),
                    matrix,
                }
            })
            .collect();
        Self { ctx: *ctx, entries }
    }

    pub fn ctx(&self) -> &CrtContext {
        &self.ctx
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One-based lookup.
    pub fn get(&self, index: usize) -> Result<&CatalogEntry> {
        index
            .checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.entries.len(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SharedComponent {
    None,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinePairClass {
    pub intersection_size: u64,
    pub shared_component: SharedComponent,
}

/// Classifies a pair of different maximal lines. The intersection is counted
/// directly and compared with the component rule (shared second component
/// gives `d2` points, shared first gives `d1`, neither gives the origin only);
/// disagreement is reported as an error.
pub fn classify_line_pair(a: &Line, b: &Line, ctx: &CrtContext) -> Result<LinePairClass> {
    for l in [a, b] {
        if l.modulus() != ctx.d() {
            return Err(Error::ModulusMismatch {
                left: l.modulus(),
                right: ctx.d(),
            });
        }
        if !l.is_maximal() {
            let (nu, mu) = l.generator();
            return Err(Error::NotMaximal { nu, mu, d: ctx.d() });
        }
    }
    let size = intersection(a, b)?.len() as u64;
    let fa = factorize_line(a, ctx)?.canonical;
    let fb = factorize_line(b, ctx)?.canonical;
    let shared = match (fa.0 == fb.0, fa.1 == fb.1) {
        (true, true) => {
            return Err(Error::IdenticalPair(0, 0));
        }
        (true, false) => SharedComponent::First,
        (false, true) => SharedComponent::Second,
        (false, false) => SharedComponent::None,
    };
    let expected = match shared {
        SharedComponent::First => ctx.d1(),
        SharedComponent::Second => ctx.d2(),
        SharedComponent::None => 1,
    };
    if size != expected {
        return Err(Error::ComponentRuleViolation {
            a: a.to_string(),
            b: b.to_string(),
            size,
        });
    }
    Ok(LinePairClass {
        intersection_size: size,
        shared_component: shared,
    })
}

/// Counts of unordered maximal-line pairs by intersection size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LinePairCensus {
    /// `d2` common points (shared second component).
    pub size_d2: usize,
    /// `d1` common points (shared first component).
    pub size_d1: usize,
    /// Origin only.
    pub size_1: usize,
}

impl LinePairCensus {
    /// `(d1 psi / 2, d2 psi / 2, d psi / 2)`.
    pub fn expected(ctx: &CrtContext) -> Self {
        let psi = ((ctx.d1() + 1) * (ctx.d2() + 1)) as usize;
        Self {
            size_d2: ctx.d1() as usize * psi / 2,
            size_d1: ctx.d2() as usize * psi / 2,
            size_1: ctx.d() as usize * psi / 2,
        }
    }

    pub fn total(&self) -> usize {
        self.size_d2 + self.size_d1 + self.size_1
    }
}

pub fn pair_census(catalog: &MaximalLineCatalog) -> Result<LinePairCensus> {
    let ctx = catalog.ctx();
    let mut census = LinePairCensus::default();
    let entries = catalog.entries();
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            let class = classify_line_pair(&a.line, &b.line, ctx).map_err(|e| match e {
                Error::IdenticalPair(..) => Error::IdenticalPair(a.index, b.index),
                e => e,
            })?;
            match class.shared_component {
                SharedComponent::Second => census.size_d2 += 1,
                SharedComponent::First => census.size_d1 += 1,
                SharedComponent::None => census.size_1 += 1,
            }
        }
    }
    Ok(census)
}

/// Factor pairs of the sets `{ F1_i x F2_{i+n} : i in Z(d1+1) }`,
/// `n = 0..=d2`, with the slot numbering of [`FactorIndex::slot`].
pub fn partition_factor_pairs(ctx: &CrtContext) -> Vec<Vec<(FactorIndex, FactorIndex)>> {
    let (d1, d2) = (ctx.d1(), ctx.d2());
    (0..=d2)
        .map(|n| {
            (0..=d1)
                .map(|i| {
                    (
                        FactorIndex::from_slot(i, d1),
                        FactorIndex::from_slot(i + n, d2),
                    )
                })
                .collect()
        })
        .collect()
}

/// The sets `S_0 .. S_{d2}` as one-based catalog indices. Any two lines in
/// the same set meet only at the origin.
pub fn partition_s(ctx: &CrtContext) -> Vec<BTreeSet<usize>> {
    partition_factor_pairs(ctx)
        .into_iter()
        .map(|set| {
            set.into_iter()
                .map(|(a, b)| catalog_index(ctx, a, b))
                .collect()
        })
        .collect()
}
