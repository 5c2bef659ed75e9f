use std::collections::BTreeSet;

use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

use wmub_core::geometry::{
    factorize_line, intersection, lines_through_origin, matrix_factorize, redundancy, Line,
    MaximalLineCatalog, SymplecticMatrix,
};
use wmub_core::hilbert::{displacement, omega, prime_mub, symplectic_unitary, x_op, z_op, UnitaryMatrix};
use wmub_core::zring::{dedekind_psi, gcd, is_prime, mod_inverse, CrtContext, Modulus};

const ODD_PRIMES: [u64; 9] = [3, 5, 7, 11, 13, 17, 19, 23, 29];

fn prime_pair() -> impl Strategy<Value = (u64, u64)> {
    (0..ODD_PRIMES.len(), 0..ODD_PRIMES.len())
        .prop_filter("distinct", |(a, b)| a != b)
        .prop_map(|(a, b)| {
            let (p, q) = (ODD_PRIMES[a], ODD_PRIMES[b]);
            (p.min(q), p.max(q))
        })
}

/// A product of shears, the Fourier matrix and diagonal scalings; these
/// generate Sp(2, Z(d)).
fn random_symplectic(d: u64) -> impl Strategy<Value = SymplecticMatrix> {
    prop::collection::vec((0u8..4, 0..d), 1..12).prop_map(move |steps| {
        let units: Vec<u64> = (1..d).filter(|&u| gcd(u, d) == 1).collect();
        steps.into_iter().fold(SymplecticMatrix::identity(d), |acc, (kind, x)| {
            let g = match kind {
                0 => SymplecticMatrix::new(d, 1, x, 0, 1),
                1 => SymplecticMatrix::new(d, 1, 0, x, 1),
                2 => SymplecticMatrix::from_signed(d, 0, 1, -1, 0),
                _ => {
                    let u = units[(x as usize) % units.len()];
                    SymplecticMatrix::new(d, u, 0, 0, mod_inverse(u, d).unwrap())
                }
            };
            acc.compose(&g.unwrap()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crt_maps_are_ring_bijections((d1, d2) in prime_pair(), a in 0u64..1000, b in 0u64..1000) {
        let c = CrtContext::new(d1, d2).unwrap();
        let d = c.d();
        let (a, b) = (a % d, b % d);
        let (a1, a2) = c.map1_split(a);
        let (b1, b2) = c.map1_split(b);
        prop_assert_eq!(c.map1_join(a1, a2), a);
        prop_assert_eq!(c.map2_join(c.map2_split(a).0, c.map2_split(a).1), a);
        prop_assert_eq!(c.map1_split(a * b % d), (a1 * b1 % d1, a2 * b2 % d2));
        prop_assert_eq!(c.map1_split((a + b) % d), ((a1 + b1) % d1, (a2 + b2) % d2));
        prop_assert_eq!(c.point_unmap(c.point_map((a, b))), (a, b));
    }

    #[test]
    fn canonical_equality_matches_point_sets(d in 2u64..40, g in any::<[u64; 4]>()) {
        let a = Line::new(d, g[0] % d, g[1] % d);
        let b = Line::new(d, g[2] % d, g[3] % d);
        prop_assert_eq!(a == b, a.points() == b.points());
        let u = (1..d).filter(|&u| gcd(u, d) == 1).nth((g[2] % 4) as usize).unwrap_or(1);
        let scaled = Line::new(d, g[0] % d * u % d, g[1] % d * u % d);
        prop_assert_eq!(scaled.canonical_generator(), a.canonical_generator());
    }

    #[test]
    fn symplectic_action_permutes_lines((d, g) in (2u64..=30).prop_flat_map(|d| (Just(d), random_symplectic(d)))) {
        prop_assert_eq!(g.det(), 1);
        for (size, lines) in lines_through_origin(&Modulus::new(d).unwrap()) {
            let before: BTreeSet<_> = lines.iter().map(|l| l.canonical_generator()).collect();
            let mut after = BTreeSet::new();
            for l in &lines {
                let image = g.act_on_line(l).unwrap();
                prop_assert_eq!(image.len() as u64, size);
                after.insert(image.canonical_generator());
            }
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn redundancy_identity(d in 2u64..500) {
        let m = Modulus::new(d).unwrap();
        let r = redundancy(&m);
        let d = d as i64;
        let psi = dedekind_psi(&m) as i64;
        prop_assert_eq!(r * (d * d - 1) + (d * d - 1), Ratio::from_integer(psi * (d - 1)));
        prop_assert_eq!(r == Ratio::from_integer(0), m.is_prime());
    }

    #[test]
    fn gauss_sum_magnitude(pi in 0usize..5, l in 0i64..13, lp in 0i64..13, k in 0i64..13) {
        let p = [3u64, 5, 7, 11, 13][pi];
        let half = mod_inverse(2, p).unwrap() as i64;
        let s: Complex64 = (0..p as i64)
            .map(|n| omega(p, half * (l - lp) * n * n + k * n))
            .sum();
        let expected = if (l - lp).rem_euclid(p as i64) == 0 {
            if k.rem_euclid(p as i64) == 0 { p as f64 } else { 0.0 }
        } else {
            (p as f64).sqrt()
        };
        prop_assert!((s.norm() - expected).abs() < 1e-9);
    }

    #[test]
    fn displacement_inverse(a in -50i64..50, b in -50i64..50) {
        let p = displacement(15, a, b).unwrap().dot(&displacement(15, -a, -b).unwrap());
        prop_assert!(p.max_deviation(&UnitaryMatrix::identity(15)) < 1e-10);
    }

    #[test]
    fn symplectic_unitaries_are_unitary(d in (1u64..=52).prop_map(|k| 2 * k + 1), nu in 0i64..105) {
        let g = SymplecticMatrix::from_signed(d, 0, 1, -1, nu).unwrap();
        let u = symplectic_unitary(&g).unwrap();
        prop_assert!(u.unitarity_error() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn catalog_action_factorizes(g in random_symplectic(15), idx in 1usize..=24) {
        let c = CrtContext::new(3, 5).unwrap();
        let catalog = MaximalLineCatalog::new(&c);
        let (g1, g2) = matrix_factorize(&g, &c).unwrap();
        let line = &catalog.get(idx).unwrap().line;
        let image = g.act_on_line(line).unwrap();
        let f = factorize_line(line, &c).unwrap().canonical;
        let l1 = g1.act_on_line(&Line::new(3, f.0.0, f.0.1)).unwrap();
        let l2 = g2.act_on_line(&Line::new(5, f.1.0, f.1.1)).unwrap();
        let fi = factorize_line(&image, &c).unwrap().canonical;
        prop_assert_eq!(fi, (l1.canonical_generator(), l2.canonical_generator()));
        prop_assert!(catalog.entries().iter().any(|e| e.line == image));
    }
}

#[test]
fn prime_lines_meet_only_at_origin() {
    for p in (3..=13).filter(|&p| is_prime(p)) {
        let lines = &lines_through_origin(&Modulus::new(p).unwrap())[&p];
        assert_eq!(lines.len() as u64, p + 1);
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                assert_eq!(intersection(a, b).unwrap(), vec![(0, 0)]);
            }
        }
    }
}

#[test]
fn weyl_relation() {
    for d in [3u64, 5, 15] {
        for alpha in 0..d as i64 {
            for beta in 0..d as i64 {
                let zx = z_op(d, alpha).dot(&x_op(d, beta));
                let xz = x_op(d, beta).dot(&z_op(d, alpha)).scale(omega(d, alpha * beta));
                assert!(zx.max_deviation(&xz) < 1e-10, "d={d} alpha={alpha} beta={beta}");
            }
        }
    }
}

#[test]
fn prime_mub_flatness() {
    for p in [3u64, 5, 7, 11, 13] {
        let bases = prime_mub(p).unwrap();
        for (i, a) in bases.iter().enumerate() {
            for b in &bases[i + 1..] {
                let ov = a.overlaps(b).unwrap();
                assert!(ov.iter().all(|v| (v - (p as f64).powf(-0.5)).abs() < 1e-10));
            }
        }
    }
}
