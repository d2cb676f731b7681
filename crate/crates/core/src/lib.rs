//! Analysis of multi-party quantum states through their reduced density
//! matrices.
//!
//! The crate answers three linked questions about a state shared among n
//! parties:
//!
//! * **Reconstruction** — what is the maximum-entropy state consistent with a
//!   given set of marginals, and how far is the actual state from it? The
//!   entropy gap is the irreducible n-party correlation ([`maxent`]).
//! * **Feasibility** — is a set of putative marginals realizable by any
//!   global state at all ([`maxent::marginal_feasibility`])?
//! * **Uniqueness** — for three-qubit pure states, a closed-form classifier
//!   decides whether the two-party marginals pin the state down completely;
//!   a numerical search over purifications serves as its independent oracle
//!   and as a counterexample generator ([`uniqueness`]).
//!
//! A classical companion module treats three-bit distributions, where the
//! analogous uniqueness property always fails ([`classical`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the command
//! line live in the companion `qmargin-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod classical;
pub mod eigen;
pub mod error;
mod fmath;
pub mod matrix;
pub mod maxent;
pub mod pauli;
pub mod rng;
pub mod state;
pub mod uniqueness;

pub use error::{Error, Result};
pub use matrix::{Complex64, ComplexMatrix};
pub use state::{
    density_from_pure, embed_operator, log_on_support, partial_trace, trace_distance,
    von_neumann_entropy, DensityMatrix, PureState,
};
