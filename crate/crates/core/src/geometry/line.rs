use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::zring::{gcd, mul_mod, units, Modulus};

/// A point of `Z(d) x Z(d)`.
pub type Point = (u64, u64);

/// The line through the origin `L(nu, mu) = {(nu a, mu a) : a in Z(d)}`.
///
/// Two lines compare equal when their canonical generators agree, which is
/// the same as having equal point sets.
#[derive(Debug, Clone)]
pub struct Line {
    d: u64,
    generator: Point,
    canonical: Point,
    points: Vec<Point>,
}

/// Lexicographically smallest `(nu l, mu l)` over the units `l` of `Z(d)`.
fn canonical_with(d: u64, (nu, mu): Point, units: &[u64]) -> Point {
    units
        .iter()
        .map(|&l| (mul_mod(nu, l, d), mul_mod(mu, l, d)))
        .min()
        .unwrap_or((nu % d, mu % d))
}

impl Line {
    pub fn new(d: u64, nu: u64, mu: u64) -> Self {
        assert!(d >= 1, "modulus must be positive");
        let generator = (nu % d, mu % d);
        let mut points: Vec<Point> = (0..d)
            .map(|a| (mul_mod(generator.0, a, d), mul_mod(generator.1, a, d)))
            .collect();
        points.sort_unstable();
        points.dedup();
        let canonical = canonical_with(d, generator, &units(d));
        Self {
            d,
            generator,
            canonical,
            points,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    /// The generator this line was constructed from.
    pub fn generator(&self) -> Point {
        self.generator
    }

    pub fn canonical_generator(&self) -> Point {
        self.canonical
    }

    /// Sorted point set.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_maximal(&self) -> bool {
        self.points.len() as u64 == self.d
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// `d / gcd(nu, mu, d)`.
    pub fn expected_len(&self) -> u64 {
        self.d / gcd(gcd(self.generator.0, self.generator.1), self.d)
    }

    fn check_same_modulus(&self, other: &Line) -> Result<()> {
        if self.d != other.d {
            return Err(Error::ModulusMismatch {
                left: self.d,
                right: other.d,
            });
        }
        Ok(())
    }
}

impl PartialEq for Line {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.canonical == other.canonical
    }
}

impl Eq for Line {}

impl Hash for Line {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        self.canonical.hash(state);
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.generator.0, self.generator.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRelation {
    Equal,
    /// The first line is a proper subline of the second.
    ASubB,
    /// The second line is a proper subline of the first.
    BSubA,
    Neither,
}

fn is_subset(small: &[Point], big: &[Point]) -> bool {
    small.iter().all(|p| big.binary_search(p).is_ok())
}

pub fn compare_lines(a: &Line, b: &Line) -> Result<LineRelation> {
    a.check_same_modulus(b)?;
    Ok(if a == b {
        LineRelation::Equal
    } else if is_subset(&a.points, &b.points) {
        LineRelation::ASubB
    } else if is_subset(&b.points, &a.points) {
        LineRelation::BSubA
    } else {
        LineRelation::Neither
    })
}

/// The subline `a ∩ b`, sorted. Always contains the origin.
pub fn intersection(a: &Line, b: &Line) -> Result<Vec<Point>> {
    a.check_same_modulus(b)?;
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.points.len() && j < b.points.len() {
        match a.points[i].cmp(&b.points[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a.points[i]);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

/// All lines through the origin other than `L(0,0)`, grouped by cardinality.
/// Each group is ordered by canonical generator.
pub fn lines_through_origin(m: &Modulus) -> BTreeMap<u64, Vec<Line>> {
    let d = m.value();
    let us = units(d);
    let mut seen = std::collections::BTreeSet::new();
    for nu in 0..d {
        for mu in 0..d {
            if (nu, mu) != (0, 0) {
                seen.insert(canonical_with(d, (nu, mu), &us));
            }
        }
    }
    let mut out: BTreeMap<u64, Vec<Line>> = BTreeMap::new();
    for (nu, mu) in seen {
        let line = Line::new(d, nu, mu);
        out.entry(line.len() as u64).or_default().push(line);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_examples() {
        let l = Line::new(15, 3, 7);
        assert_eq!(l.len(), 15);
        assert!(l.is_maximal());

        let l = Line::new(15, 5, 10);
        assert_eq!(l.points(), &[(0, 0), (5, 10), (10, 5)]);

        let l = Line::new(15, 0, 0);
        assert_eq!(l.points(), &[(0, 0)]);
        assert_eq!(l.expected_len(), 1);
    }

    #[test]
    fn relations() {
        let r = |a: (u64, u64), b: (u64, u64)| {
            compare_lines(&Line::new(15, a.0, a.1), &Line::new(15, b.0, b.1)).unwrap()
        };
        assert_eq!(r((12, 10), (6, 5)), LineRelation::Equal);
        assert_eq!(r((5, 10), (1, 2)), LineRelation::ASubB);
        assert_eq!(r((1, 2), (5, 10)), LineRelation::BSubA);
        assert_eq!(r((0, 1), (0, 1)), LineRelation::Equal);
        assert_eq!(r((0, 1), (1, 0)), LineRelation::Neither);
        assert_eq!(
            compare_lines(&Line::new(15, 0, 1), &Line::new(21, 0, 1)),
            Err(Error::ModulusMismatch { left: 15, right: 21 })
        );
    }

    #[test]
    fn intersections() {
        let a = Line::new(15, 0, 1);
        let b = Line::new(15, 6, 5);
        assert_eq!(intersection(&a, &b).unwrap(), vec![(0, 0), (0, 5), (0, 10)]);
        assert_eq!(intersection(&a, &a).unwrap(), a.points());
        assert_eq!(
            intersection(&a, &Line::new(15, 1, 0)).unwrap(),
            vec![(0, 0)]
        );
    }

    #[test]
    fn lines_by_cardinality() {
        let counts = |d| {
            lines_through_origin(&Modulus::new(d).unwrap())
                .into_iter()
                .map(|(k, v)| (k, v.len()))
                .collect::<Vec<_>>()
        };
        assert_eq!(counts(15), vec![(3, 4), (5, 6), (15, 24)]);
        assert_eq!(counts(3), vec![(3, 4)]);
        assert_eq!(counts(5), vec![(5, 6)]);
    }
}
