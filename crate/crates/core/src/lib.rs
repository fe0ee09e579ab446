//! Symmetric mutually unbiased bases in dimension `d = 2^n`.
//!
//! The bases are built as common eigenbases of commuting classes of Clifford
//! monomials, chosen so that a single unitary (assembled from plane rotations
//! of the Clifford generators) cycles every basis into the next one. On top of
//! that the crate evaluates Rényi entropies of measurement outcomes, the two
//! analytic min-entropy bounds, exhaustive `P_b` eigenvalue sweeps, a
//! randomized minimizer of the average entropy, and the discrete Wigner
//! function over `GF(2^n)` phase space.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats, threading
//! and the command line live in the `mubforge` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classes;
pub mod entropy;
mod error;
pub mod linalg;
mod math;
pub mod mub;
pub mod pauli;
pub mod transform;
pub mod wigner;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};

/// Largest qubit count accepted by the dense constructions.
pub const MAX_QUBITS: usize = 10;
