//! Localized frames: spectral bounds, Riesz subset selection, subframe
//! removal, localization maps and sparse subframe extraction.

pub mod cli;
pub mod error;
pub mod frame;
pub mod gabor;
pub mod io;
pub mod limits;
pub mod linalg;
pub mod localization;
pub mod random;
pub mod removal;
pub mod suites;
pub mod thinning;

pub use error::{Error, Result};
