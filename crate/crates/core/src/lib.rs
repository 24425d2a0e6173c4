//! Arithmetic means of monotone null sequences.
//!
//! The crate provides the Cesàro mean calculus (`am`, `am²`, ampliation), the
//! ratio of regularity and concavity ratio with their inversion formulas,
//! closed forms for step sequences at astronomically large indices, two
//! inductive counterexample constructions, and a harness that checks the
//! identities and inequalities of the theory at finite horizons.

pub mod counterexamples;
pub mod error;
pub mod numerics;
pub mod regularity;
pub mod seq;
pub mod step;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{Exact, Index, LogReal, NumericMode, Scalar};
pub use seq::Seq;
pub use step::StepSeq;
