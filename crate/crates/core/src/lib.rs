//! Finite phase-space geometry of `Z(d) x Z(d)` and weak mutually unbiased
//! bases for `d = d1 * d2` (two distinct odd primes).
//!
//! The crate is organised bottom-up:
//!
//! * [`zring`]: exact arithmetic in `Z(d)`, totient functions and the two
//!   Chinese-remainder bijections `Z(d) <-> Z(d1) x Z(d2)`.
//! * [`geometry`]: lines through the origin, symplectic matrices, the
//!   catalog of maximal lines, pair classification and partitions.
//! * [`hilbert`]: Fourier transform, displacement operators, the symplectic
//!   unitaries used by the construction and prime-dimension MUBs.
//! * [`wmub`]: the weak mutually unbiased bases, overlap classification and
//!   the line/basis duality report.
//! * [`cli`]: table renderers and the verification pipeline behind the
//!   `wmub` binary.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod wmub;
pub mod zring;

pub use error::{Error, Result};
