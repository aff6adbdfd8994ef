//! Numerical laboratory for smoothness-dependent perturbation bounds on
//! matrix functions.
//!
//! The crate provides, bottom to top:
//!
//! * dense complex matrices with Jacobi spectral decompositions ([`matrix`],
//!   [`eigen`], [`random`]);
//! * singular-value functionals for operator ideals ([`schatten`]);
//! * dyadic smoothness seminorms for trigonometric polynomials ([`besov`]);
//! * functional calculus, divided differences, and the double/triple operator
//!   integral representations of operator differences ([`funcalc`]);
//! * structured sections realizing sharpness examples ([`hankel`]);
//! * second-order spectral shift measurements ([`specshift`]).
//!
//! Everything is deterministic: random inputs come from seeded counter-based
//! streams, so a sweep of independent trials produces identical results
//! whether it runs sequentially or on a thread pool (see [`parallel`]).

pub mod besov;
pub mod eigen;
pub mod error;
pub mod funcalc;
pub mod hankel;
pub mod matrix;
pub mod parallel;
pub mod random;
pub mod schatten;
pub mod specshift;
pub mod util;

pub use error::{Error, Result};
