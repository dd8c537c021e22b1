//! Ensemble weight enumerators for parallel concatenated (PCC) and braided
//! convolutional (BCC) code ensembles.
//!
//! The pipeline is:
//!
//! 1. [`trellis`]: parse octal generator matrices and build the encoder state
//!    machine together with its single-section transfer matrix.
//! 2. [`polywef`]: raise the transfer matrix to the `N`-th power over truncated
//!    multivariate polynomials with exact integer coefficients, giving the
//!    input-parity weight enumerator of the terminated trellis.
//! 3. [`ensemble`]: average component enumerators over uniform random
//!    permutations (exact rationals).
//! 4. [`bounds`]: union bounds on BER/FER, minimum-distance bounds with
//!    expurgation, and the Gilbert-Varshamov truncation point.
//!
//! [`oracle`] contains exhaustive small-scale enumerators used to validate
//! all of the above, including the folding argument that relates coupled
//! and uncoupled braided codes.

pub mod bounds;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod polywef;
pub mod trellis;

pub use error::{Error, Result};
