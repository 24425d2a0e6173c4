//! Precision substrate: log-domain reals, unbounded indices, harmonic numbers
//! and the scalar abstraction shared by the log and exact-rational backends.

pub mod harmonic;
mod index;
mod logreal;
mod scalar;

pub use harmonic::{harmonic, harmonic_diff, harmonic_engine, HarmonicEngine, EULER_GAMMA};
pub use index::{exp_as_dyadic, Index};
pub use logreal::{log_add, log_sub, LogReal, LogSum, DEGENERATE_GAP};
pub use scalar::{Accumulator, Exact, ExactSum, NumericMode, Scalar, EXACT_HARMONIC_LIMIT};
