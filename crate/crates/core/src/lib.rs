//! `ergolab` is a desk-scale laboratory for measure-preserving systems over
//! the integers.
//!
//! It evaluates correlation sequences `⟨Tⁿf, g⟩` of explicit systems
//! (circle rotations, skew products over Cantor-type bases, the Chacon and
//! Rudin–Shapiro subshifts, interval exchanges), approximates limits of
//! Koopman operators along index sequences, estimates spectral measures,
//! classifies observables against the weak / mild / strong mixing hierarchy
//! and computes exact joining polytopes of finite systems.
//!
//! Module map:
//!
//! - [`operator`]: complex matrices, normal-operator decompositions and
//!   sequence-limit operators.
//! - [`systems`]: concrete systems, observables and correlation sequences.
//! - [`limits`]: limit schemes (subsequence, Følner–Cesàro, IP grid, tail
//!   supremum) and the finitary van der Corput verifier.
//! - [`spectral`]: Fejér spectral estimates, Wiener atom masses, coefficient
//!   convolution and Rajchman tail tables.
//! - [`mixing`]: mixing verdicts, rigidity profiles, weak-limit fits and
//!   image/kernel splits of limit operators.
//! - [`joinings`]: exact invariant-coupling polytopes of finite systems.
//! - [`scenario`]: the batch experiment runner behind the `ergolab` CLI.

pub mod error;
pub mod joinings;
pub mod limits;
pub mod mixing;
pub mod operator;
pub mod scenario;
pub mod spectral;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
