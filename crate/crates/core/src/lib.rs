//! Numerical verification of local (LOCC) cloning claims for three-qubit
//! GHZ and W states.
//!
//! - [`register`]: dense state vectors, density matrices, partial trace and
//!   transpose, spectra, and the local gate set.
//! - [`catalog`]: the canonical GHZ basis, the W basis, and W-class states.
//! - [`measures`]: cut entropy, negativity, and closed-form W-class spectra.
//! - [`ghz`]: cloning-circuit synthesis and the three-state no-go detector.
//! - [`audit`]: W-pair taxonomy, negativity audits, and the entropy scan.
//! - [`report`] and [`cli`]: batch reports and the `locc` command line.

pub mod audit;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod ghz;
pub mod measures;
pub mod random;
pub mod register;
pub mod report;

pub use error::{Error, Result};
