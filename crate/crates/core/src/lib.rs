//! Truncated Fock-space laboratory for a neutral scalar coupled cubically to a
//! charged scalar, and for the coherent displacements that probe whether its
//! Hamiltonian is bounded below.
//!
//! The crate is `no_std` with `alloc`. File formats and the command line live
//! in `fockshift-probe`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coeffs;
pub mod dense;
pub mod displace;
pub mod error;
pub mod fockspace;
pub mod ladderalg;
pub(crate) mod math;
pub mod model;

pub use error::{Error, Result};
pub use fockspace::{FockLayout, LadderId, OperatorMatrix, StateVector};
pub use model::{Model, ModelConfig};
