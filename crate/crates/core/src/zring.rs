//! Exact arithmetic in `Z(d)`, the totient family, and the two CRT maps.
//!
//! Elements of `Z(d)` are `u64` values in the canonical range `[0, d)`.
//! Moduli are capped at `2^20`, so a product of two residues always fits in
//! 64 bits.

use crate::error::{Error, Result};

pub const MAX_MODULUS: u64 = 1 << 20;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Reduce a signed integer into `[0, d)`.
pub fn reduce(x: i64, d: u64) -> u64 {
    x.rem_euclid(d as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, d: u64) -> u64 {
    (a % d) * (b % d) % d
}

pub fn add_mod(a: u64, b: u64, d: u64) -> u64 {
    (a % d + b % d) % d
}

pub fn neg_mod(a: u64, d: u64) -> u64 {
    (d - a % d) % d
}

pub fn sub_mod(a: u64, b: u64, d: u64) -> u64 {
    add_mod(a, neg_mod(b, d), d)
}

/// Inverse of `a` in `Z(d)` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, d: u64) -> Result<u64> {
    let (mut r0, mut r1) = (d as i64, (a % d) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotAUnit { a, d });
    }
    Ok(reduce(s0, d))
}

/// The units of `Z(d)` in increasing order.
pub fn units(d: u64) -> Vec<u64> {
    (1..d).filter(|&a| gcd(a, d) == 1).collect()
}

/// A modulus `d >= 2` together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    d: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn new(d: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&d) {
            return Err(Error::InvalidModulus(d));
        }
        let mut factors = Vec::new();
        let mut n = d;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            factors.push((n, 1));
        }
        Ok(Self { d, factors })
    }

    pub fn value(&self) -> u64 {
        self.d
    }

    /// `(p_i, e_i)` with `p_i` strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// All divisors of `d` in increasing order, including 1 and `d`.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let current = divs.clone();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                divs.extend(current.iter().map(|&x| x * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// `d * prod(1 - 1/p)`.
pub fn euler_phi(m: &Modulus) -> u64 {
    m.primes().fold(m.value(), |acc, p| acc / p * (p - 1))
}

/// `d * prod(1 + 1/p)`; the number of maximal lines through the origin.
pub fn dedekind_psi(m: &Modulus) -> u64 {
    m.primes().fold(m.value(), |acc, p| acc / p * (p + 1))
}

/// `d^2 * prod(1 - 1/p^2)`.
pub fn jordan_j2(m: &Modulus) -> u64 {
    m.primes()
        .fold(m.value() * m.value(), |acc, p| acc / (p * p) * (p * p - 1))
}

/// Precomputed constants for `d = d1 * d2` with `d1 < d2` distinct odd primes.
///
/// `r1 = d2`, `r2 = d1`, `t_i r_i = 1 (mod d_i)` and `s_i = t_i r_i mod d`.
/// The `s_i` are orthogonal idempotents summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrtContext {
    d1: u64,
    d2: u64,
    d: u64,
    r1: u64,
    r2: u64,
    t1: u64,
    t2: u64,
    s1: u64,
    s2: u64,
}

impl CrtContext {
    pub fn new(d1: u64, d2: u64) -> Result<Self> {
        let valid = d1 < d2
            && d1 % 2 == 1
            && d2 % 2 == 1
            && is_prime(d1)
            && is_prime(d2)
            && d1.saturating_mul(d2) <= MAX_MODULUS;
        if !valid {
            return Err(Error::InvalidDims { d1, d2 });
        }
        let d = d1 * d2;
        let (r1, r2) = (d2, d1);
        let t1 = mod_inverse(r1 % d1, d1)?;
        let t2 = mod_inverse(r2 % d2, d2)?;
        Ok(Self {
            d1,
            d2,
            d,
            r1,
            r2,
            t1,
            t2,
            s1: t1 * r1 % d,
            s2: t2 * r2 % d,
        })
    }

    pub fn d1(&self) -> u64 {
        self.d1
    }
    pub fn d2(&self) -> u64 {
        self.d2
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn r1(&self) -> u64 {
        self.r1
    }
    pub fn r2(&self) -> u64 {
        self.r2
    }
    pub fn t1(&self) -> u64 {
        self.t1
    }
    pub fn t2(&self) -> u64 {
        self.t2
    }
    pub fn s1(&self) -> u64 {
        self.s1
    }
    pub fn s2(&self) -> u64 {
        self.s2
    }

    pub fn modulus(&self) -> Modulus {
        Modulus {
            d: self.d,
            factors: vec![(self.d1, 1), (self.d2, 1)],
        }
    }

    /// `m -> (m mod d1, m mod d2)`.
    pub fn map1_split(&self, m: u64) -> (u64, u64) {
        (m % self.d1, m % self.d2)
    }

    /// `(m1, m2) -> m1 s1 + m2 s2 (mod d)`.
    pub fn map1_join(&self, m1: u64, m2: u64) -> u64 {
        add_mod(
            mul_mod(m1, self.s1, self.d),
            mul_mod(m2, self.s2, self.d),
            self.d,
        )
    }

    /// `m -> (m t1 mod d1, m t2 mod d2)`.
    pub fn map2_split(&self, m: u64) -> (u64, u64) {
        (mul_mod(m, self.t1, self.d1), mul_mod(m, self.t2, self.d2))
    }

    /// `(m1, m2) -> m1 r1 + m2 r2 (mod d)`.
    pub fn map2_join(&self, m1: u64, m2: u64) -> u64 {
        add_mod(
            mul_mod(m1, self.r1, self.d),
            mul_mod(m2, self.r2, self.d),
            self.d,
        )
    }

    /// `(m, n) -> (m1, m2, n1bar, n2bar)`: map1 on the first coordinate, map2
    /// on the second.
    pub fn point_map(&self, (m, n): (u64, u64)) -> [u64; 4] {
        let (m1, m2) = self.map1_split(m);
        let (n1, n2) = self.map2_split(n);
        [m1, m2, n1, n2]
    }

    pub fn point_unmap(&self, [m1, m2, n1, n2]: [u64; 4]) -> (u64, u64) {
        (self.map1_join(m1, m2), self.map2_join(n1, n2))
    }
}
