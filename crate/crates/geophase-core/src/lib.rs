//! Numerical core for non-Abelian geometric phases in three-level lambda
//! systems: gauge connections induced by the diagonalizing frame,
//! path-ordered Wilson loops, vanishing-curvature checks, the spin-1/2
//! monopole reference example, and direct Schrödinger evolution along driven
//! parameter loops for cross-validation.
//!
//! Conventions: ħ = 1, coupling χ = 1; A_μ := Γ†∂_μΓ (anti-Hermitian);
//! holonomy U = P exp(−∮A_μ dμ); the Frobenius norm is the residual norm
//! everywhere. All types are immutable values; every operation is a pure
//! function, safe to call from any number of threads.
//!
//! The crate is no_std-compatible (enable the `libm` feature instead of the
//! default `std`); `alloc` is required for loop sample storage.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod fmath;

pub mod dynamics;
pub mod holonomy;
pub mod lambda;
pub mod numerics;
pub mod spin_half;

pub use error::{Error, Result};
