//! Exact arithmetic for the dynatomic curves `Y_1(n)` and `Y_0(n)` attached to
//! the family `f_c(x) = x^m + c`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`] integers, prime fields, finite field extensions and dense
//!   polynomials over all of them, resultants, root finding and integer
//!   factorisation.
//! * [`dynatomic`] the polynomials `Psi_n`, `Phi_n`, `delta_n`, the factors
//!   `Delta_{n,d}`, their discriminant tables, and `Delta_{n,n}` modulo `p`.
//! * [`reduction`] prime classification, direct singularity tests and the
//!   candidate bad prime search.
//! * [`fibers`] ramification data over `c = 0` and `c = -2`.
//! * [`kneading`] itineraries, angles and kneading sequences.
//! * [`monodromy`] the monodromy graph and sheet permutations.
//!
//! Heavy loops go through [`par`], which uses rayon when the `parallel`
//! feature is on and plain iterators otherwise.

pub mod arith;
pub mod budget;
pub mod cache;
pub mod dynatomic;
pub mod error;
pub mod fibers;
pub mod kneading;
pub mod monodromy;
pub mod par;
pub mod reduction;

pub use error::{Error, Result};
