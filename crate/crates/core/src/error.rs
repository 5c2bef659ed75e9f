use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is out of range (expected 2 <= d <= 2^20)")]
    InvalidModulus(u64),

    #[error("{a} is not a unit modulo {d}")]
    NotAUnit { a: u64, d: u64 },

    #[error("d1 and d2 must be distinct odd primes with d1<d2 (got d1={d1}, d2={d2})")]
    InvalidDims { d1: u64, d2: u64 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("determinant of {matrix} is {det}, expected 1 modulo {d}")]
    DetNotOne { matrix: String, det: u64, d: u64 },

    #[error("line L({nu},{mu}) is not maximal in Z({d})")]
    NotMaximal { nu: u64, mu: u64, d: u64 },

    #[error("pair ({0}, {1}) does not consist of two different elements")]
    IdenticalPair(usize, usize),

    #[error("line pair {a} / {b}: intersection size {size} disagrees with the component rule")]
    ComponentRuleViolation { a: String, b: String, size: u64 },

    #[error("dimension {0} is even; 2^-1 does not exist")]
    EvenDimension(u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("no symplectic unitary is implemented for {0}")]
    UnsupportedMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bases B_{i} and B_{j} fit none of the three overlap templates (max deviation {deviation:e})")]
    NotWeaklyUnbiased { i: usize, j: usize, deviation: f64 },

    #[error("duality violated for pair ({i}, {j}): {reason}")]
    DualityViolation { i: usize, j: usize, reason: String },

    #[error("catalog and basis set were built for different moduli")]
    ContextMismatch,
}
