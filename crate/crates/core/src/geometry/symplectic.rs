use std::fmt;

use super::line::{Line, Point};
use crate::error::{Error, Result};
use crate::zring::{add_mod, mul_mod, neg_mod, reduce, sub_mod};

/// `g(kappa, lambda | mu, nu)` over `Z(d)` with `kappa nu - lambda mu = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    d: u64,
    kappa: u64,
    lambda: u64,
    mu: u64,
    nu: u64,
}

fn det_of(d: u64, [k, l, m, n]: [u64; 4]) -> u64 {
    sub_mod(mul_mod(k, n, d), mul_mod(l, m, d), d)
}

impl SymplecticMatrix {
    /// Entries are reduced modulo `d`.
    pub fn new(d: u64, kappa: u64, lambda: u64, mu: u64, nu: u64) -> Result<Self> {
        let e = [kappa % d, lambda % d, mu % d, nu % d];
        let det = det_of(d, e);
        if det != 1 % d {
            return Err(Error::DetNotOne {
                matrix: format!("g({},{}|{},{})", e[0], e[1], e[2], e[3]),
                det,
                d,
            });
        }
        let [kappa, lambda, mu, nu] = e;
        Ok(Self {
            d,
            kappa,
            lambda,
            mu,
            nu,
        })
    }

    /// Same as [`Self::new`] but accepts the signed notation, e.g. `g(0,1|-1,-2)`.
    pub fn from_signed(d: u64, kappa: i64, lambda: i64, mu: i64, nu: i64) -> Result<Self> {
        Self::new(
            d,
            reduce(kappa, d),
            reduce(lambda, d),
            reduce(mu, d),
            reduce(nu, d),
        )
    }

    pub fn identity(d: u64) -> Self {
        Self {
            d,
            kappa: 1 % d,
            lambda: 0,
            mu: 0,
            nu: 1 % d,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    /// `[kappa, lambda, mu, nu]`.
    pub fn entries(&self) -> [u64; 4] {
        [self.kappa, self.lambda, self.mu, self.nu]
    }

    pub fn det(&self) -> u64 {
        det_of(self.d, self.entries())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d)
    }

    fn check(&self, d: u64) -> Result<()> {
        if self.d != d {
            return Err(Error::ModulusMismatch {
                left: self.d,
                right: d,
            });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other.d)?;
        let d = self.d;
        let [a, b, c, e] = self.entries();
        let [p, q, r, s] = other.entries();
        Ok(Self {
            d,
            kappa: add_mod(mul_mod(a, p, d), mul_mod(b, r, d), d),
            lambda: add_mod(mul_mod(a, q, d), mul_mod(b, s, d), d),
            mu: add_mod(mul_mod(c, p, d), mul_mod(e, r, d), d),
            nu: add_mod(mul_mod(c, q, d), mul_mod(e, s, d), d),
        })
    }

    /// The adjugate `g(nu, -lambda | -mu, kappa)`; exact because `det = 1`.
    pub fn inverse(&self) -> Self {
        let d = self.d;
        Self {
            d,
            kappa: self.nu,
            lambda: neg_mod(self.lambda, d),
            mu: neg_mod(self.mu, d),
            nu: self.kappa,
        }
    }

    /// `(rho, sigma) -> (kappa rho + lambda sigma, mu rho + nu sigma)`.
    pub fn apply(&self, (rho, sigma): Point) -> Point {
        let d = self.d;
        (
            add_mod(mul_mod(self.kappa, rho, d), mul_mod(self.lambda, sigma, d), d),
            add_mod(mul_mod(self.mu, rho, d), mul_mod(self.nu, sigma, d), d),
        )
    }

    pub fn act_on_line(&self, line: &Line) -> Result<Line> {
        self.check(line.modulus())?;
        let (nu, mu) = self.apply(line.generator());
        Ok(Line::new(self.d, nu, mu))
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g({},{}|{},{})",
            self.kappa, self.lambda, self.mu, self.nu
        )
    }
}

/// Every element of `Sp(2, Z(d))`, by exhaustive search over all `d^4`
/// matrices. Only meant for small `d`.
pub fn enumerate_group(d: u64) -> Vec<SymplecticMatrix> {
    let mut out = Vec::new();
    for k in 0..d {
        for l in 0..d {
            for m in 0..d {
                for n in 0..d {
                    if let Ok(g) = SymplecticMatrix::new(d, k, l, m, n) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}
