//! Finite-dimensional Hilbert-space machinery for `H_d`.
//!
//! Conventions: `|X;m>` is the m-th standard basis vector, `omega(k) =
//! exp(2 pi i k / d)`, `F[m][n] = d^{-1/2} omega(mn)`, `Z^a |X;n> = omega(na)
//! |X;n>`, `X^b |X;n> = |X;n+b>` and `D(a,b) = Z^a X^b omega(-2^{-1} ab)`.
//! A symplectic unitary `S(k,l|m,n)` satisfies `S X S^† = D(l,k)` and
//! `S Z S^† = D(n,m)`.

use std::f64::consts::PI;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{FactorIndex, SymplecticMatrix};
use crate::zring::{is_prime, mod_inverse, mul_mod, reduce, CrtContext};

/// Tolerance for unitarity and conjugation checks.
pub const UNITARY_EPS: f64 = 1e-10;

/// `exp(2 pi i k / d)`, with `k` reduced modulo `d` before evaluation.
pub fn omega(d: u64, k: i64) -> Complex64 {
    let k = reduce(k, d);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

fn half(d: u64) -> Result<u64> {
    if d % 2 == 0 {
        return Err(Error::EvenDimension(d));
    }
    Ok(mod_inverse(2, d).expect("2 is a unit for odd d"))
}

/// A `dim x dim` complex matrix produced by the constructors in this module.
/// Unitarity holds up to floating-point error; see
/// [`UnitaryMatrix::unitarity_error`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(Array2<Complex64>);

impl UnitaryMatrix {
    pub(crate) fn from_array(a: Array2<Complex64>) -> Self {
        debug_assert!(a.is_square());
        Self(a)
    }

    pub fn identity(d: usize) -> Self {
        Self(Array2::eye(d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.t().mapv(|z| z.conj()))
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self(self.0.dot(&other.0))
    }

    /// `self * op * self^†`.
    pub fn conjugate(&self, op: &Self) -> Self {
        self.dot(op).dot(&self.adjoint())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U U^† - 1|`.
    pub fn unitarity_error(&self) -> f64 {
        self.dot(&self.adjoint())
            .max_deviation(&Self::identity(self.dim()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.mapv(|z| z * c))
    }
}

pub fn fourier(d: u64) -> UnitaryMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    UnitaryMatrix(Array2::from_shape_fn((d as usize, d as usize), |(m, n)| {
        omega(d, mul_mod(m as u64, n as u64, d) as i64) * norm
    }))
}

pub fn z_op(d: u64, alpha: i64) -> UnitaryMatrix {
    let a = reduce(alpha, d);
    let mut out = Array2::zeros((d as usize, d as usize));
    for n in 0..d {
        out[(n as usize, n as usize)] = omega(d, mul_mod(n, a, d) as i64);
    }
    UnitaryMatrix(out)
}

pub fn x_op(d: u64, beta: i64) -> UnitaryMatrix {
    let b = reduce(beta, d);
    let mut out = Array2::zeros((d as usize, d as usize));
    for n in 0..d {
        out[(((n + b) % d) as usize, n as usize)] = Complex64::new(1.0, 0.0);
    }
    UnitaryMatrix(out)
}

/// `D(a, b) = Z^a X^b omega(-2^{-1} a b)`; odd `d` only.
pub fn displacement(d: u64, alpha: i64, beta: i64) -> Result<UnitaryMatrix> {
    let h = half(d)?;
    let (a, b) = (reduce(alpha, d), reduce(beta, d));
    let phase = omega(d, -(mul_mod(h, mul_mod(a, b, d), d) as i64));
    Ok(z_op(d, a as i64).dot(&x_op(d, b as i64)).scale(phase))
}

/// Diagonal `omega(2^{-1} b n^2)`; this is `S(1,b|0,1)`.
pub fn quadratic_phase(d: u64, b: i64) -> Result<UnitaryMatrix> {
    let h = half(d)?;
    let b = reduce(b, d);
    let coeff = mul_mod(h, b, d);
    let mut out = Array2::zeros((d as usize, d as usize));
    for n in 0..d {
        out[(n as usize, n as usize)] = omega(d, mul_mod(coeff, mul_mod(n, n, d), d) as i64);
    }
    Ok(UnitaryMatrix(out))
}

/// `S(g)` for `g = 1` or `g = g(0,1|-1,-l)`, the latter built as
/// `Q(l) F` so that column `m` has entries `d^{-1/2} omega(2^{-1} l n^2 + mn)`.
/// Any odd `d` works; other matrix shapes are rejected.
pub fn symplectic_unitary(g: &SymplecticMatrix) -> Result<UnitaryMatrix> {
    let d = g.modulus();
    half(d)?;
    match g.entries() {
        [1, 0, 0, 1] => Ok(UnitaryMatrix::identity(d as usize)),
        [0, 1, m, n] if m == d - 1 => {
            let l = reduce(-(n as i64), d);
            Ok(quadratic_phase(d, l as i64)?.dot(&fourier(d)))
        }
        _ => Err(Error::UnsupportedMatrix(g.to_string())),
    }
}

/// Largest deviation in `U X U^† = D(l,k)` and `U Z U^† = D(n,m)` for the
/// label `g(k,l|m,n)`.
pub fn conjugation_deviation(u: &UnitaryMatrix, g: &SymplecticMatrix) -> Result<f64> {
    let d = g.modulus();
    if u.dim() as u64 != d {
        return Err(Error::DimMismatch {
            expected: d as usize,
            actual: u.dim(),
        });
    }
    let [k, l, m, n] = g.entries();
    let dx = u
        .conjugate(&x_op(d, 1))
        .max_deviation(&displacement(d, l as i64, k as i64)?);
    let dz = u
        .conjugate(&z_op(d, 1))
        .max_deviation(&displacement(d, n as i64, m as i64)?);
    Ok(dx.max(dz))
}

/// Where a basis came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Position,
    /// Columns of `S(0,1|-1,-l)` in a prime dimension.
    PrimeMub(u64),
    /// CRT tensor product of two factor bases.
    Tensor(Box<Provenance>, Box<Provenance>),
}

impl Provenance {
    fn from_factor(f: FactorIndex) -> Self {
        match f {
            FactorIndex::Reference => Provenance::Position,
            FactorIndex::Shear(l) => Provenance::PrimeMub(l),
        }
    }

    pub fn factor_index(&self) -> Option<FactorIndex> {
        match self {
            Provenance::Position => Some(FactorIndex::Reference),
            Provenance::PrimeMub(l) => Some(FactorIndex::Shear(*l)),
            Provenance::Tensor(..) => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Position => write!(f, "X"),
            Provenance::PrimeMub(l) => write!(f, "X{}", FactorIndex::Shear(*l)),
            Provenance::Tensor(a, b) => write!(f, "{a} (x) {b}"),
        }
    }
}

/// An orthonormal basis of `H_d`; the m-th column of the matrix is the m-th
/// basis vector.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    vectors: UnitaryMatrix,
    provenance: Provenance,
}

impl OrthonormalBasis {
    pub fn new(vectors: UnitaryMatrix, provenance: Provenance) -> Self {
        Self {
            vectors,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.vectors
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `max |<u_m|u_n> - delta_mn|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.adjoint().dot(&self.vectors);
        gram.max_deviation(&UnitaryMatrix::identity(self.dim()))
    }

    /// Entry `(n, m)` is `<self;n|other;m>`.
    pub fn inner_products(&self, other: &Self) -> Result<Array2<Complex64>> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.vectors.adjoint().dot(&other.vectors).into_array())
    }

    /// Entry `(n, m)` is `|<self;n|other;m>|`.
    pub fn overlaps(&self, other: &Self) -> Result<Array2<f64>> {
        Ok(self.inner_products(other)?.mapv(|z| z.norm()))
    }
}

pub fn position_basis(d: u64) -> OrthonormalBasis {
    OrthonormalBasis::new(UnitaryMatrix::identity(d as usize), Provenance::Position)
}

/// The basis labelled by `f` in the prime dimension `p`: the position basis
/// or the columns of `S(0,1|-1,-l)`.
pub fn factor_basis(p: u64, f: FactorIndex) -> Result<OrthonormalBasis> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let u = symplectic_unitary(&f.matrix(p))?;
    Ok(OrthonormalBasis::new(u, Provenance::from_factor(f)))
}

/// The `p + 1` mutually unbiased bases of `H_p`: position first, then
/// `S(0,1|-1,-l)|X;m>` for `l = 0..p-1`.
pub fn prime_mub(p: u64) -> Result<Vec<OrthonormalBasis>> {
    FactorIndex::all(p).map(|f| factor_basis(p, f)).collect()
}

/// Assembles `b1 (x) b2` in `H_d` through `|X;m> <-> |X1;m1bar> (x) |X2;m2bar>`
/// (map2 on both row and column labels).
pub fn assemble_tensor_basis(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    ctx: &CrtContext,
) -> Result<OrthonormalBasis> {
    for (b, expected) in [(b1, ctx.d1()), (b2, ctx.d2())] {
        if b.dim() as u64 != expected {
            return Err(Error::DimMismatch {
                expected: expected as usize,
                actual: b.dim(),
            });
        }
    }
    let labels: Vec<(usize, usize)> = (0..ctx.d())
        .map(|m| {
            let (a, b) = ctx.map2_split(m);
            (a as usize, b as usize)
        })
        .collect();
    let (u1, u2) = (b1.unitary().as_array(), b2.unitary().as_array());
    let d = ctx.d() as usize;
    let a = Array2::from_shape_fn((d, d), |(n, m)| {
        let (n1, n2) = labels[n];
        let (m1, m2) = labels[m];
        u1[(n1, m1)] * u2[(n2, m2)]
    });
    Ok(OrthonormalBasis::new(
        UnitaryMatrix::from_array(a),
        Provenance::Tensor(
            Box::new(b1.provenance().clone()),
            Box::new(b2.provenance().clone()),
        ),
    ))
}
