//! Exact commutative algebra in prime characteristic.
//!
//! The crate provides sparse polynomial arithmetic over finite fields with
//! transcendental parameters, Groebner bases with division certificates,
//! Frobenius (bracket-power) closure tests, presented module-finite ring
//! extensions built from Artin-Schreier and radical adjunctions, Cech
//! complexes on explicit element sequences, and graded fixtures built on
//! Rees-algebra presentations.
//!
//! All arithmetic is exact; every answer that claims an identity carries a
//! certificate that is re-checked by reduction.

pub mod budget;
pub mod cech;
pub mod dickson;
pub mod error;
pub mod exponent;
pub mod extension;
pub mod field;
pub mod frobenius;
pub mod graded;
pub mod groebner;
pub mod linalg;
pub mod monomial;
pub mod par;
pub mod param;
pub mod parse;
pub mod poly;
pub mod ring;

pub use error::{Error, Result};
