//! Representation theory and Vladimirov-Taibleson spectra of compact
//! nilpotent p-adic groups of dimension at most five.

pub mod cli;
pub mod dual;
pub mod error;
pub mod group;
pub mod oscint;
pub mod padic;
pub mod phase;
pub mod rep;
pub mod suites;
pub mod sum;
pub mod vt;

pub use error::{Error, Result};
