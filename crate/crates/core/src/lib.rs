//! Numerical invariants of hyperelliptic osculating covers of an elliptic
//! curve, and a Weierstrass-function engine for elliptic KdV solitons.
//!
//! - [`elliptic`]: `℘`, `℘′`, `ζ`, quasi-periods and Legendre's relation.
//! - [`picard`]: intersection arithmetic on the blown-up ruled surface.
//! - [`invariants`]: constraint checkers, type enumeration and the
//!   constructive families.
//! - [`kdv`]: finite-difference verification of elliptic traveling waves and
//!   of the single-valued monodromy factor.
//! - [`cli`]: the batch command-line front end.

pub mod cli;
pub mod elliptic;
pub mod invariants;
pub mod kdv;
pub mod picard;

pub use elliptic::{Backend, EllipticError, HalfPeriodIndex, Lattice, QuasiPeriods};
