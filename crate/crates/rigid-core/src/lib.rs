//! Core numerics for certified homotopy continuation of homogeneous
//! polynomial systems given in Waring form (sums of powers of linear forms).
//!
//! The crate follows the rigid continuation framework of Lairez (Ann. of
//! Math. 2020) and its average-complexity refinements: start systems are
//! moved along one-parameter unitary subgroups, step length is governed by a
//! split gamma number estimated from finitely many point evaluations, and
//! Newton correction keeps iterates on the solution path. Everything here is
//! deterministic given an explicit random stream and runs without `std`
//! (allocation is required).

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod conditioning;
pub mod continuation;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod math;
pub mod rng;
pub mod sampling;
pub mod theory;
pub mod waring;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Crate version, for experiment metadata sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector used throughout.
pub type CVector = nalgebra::DVector<Complex64>;
