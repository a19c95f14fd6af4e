//! File formats, random test systems and the command-line front end for
//! `hinf-core`.

pub mod cli;
pub mod error;
pub mod manifest;
pub mod mtx;
pub mod random;
pub mod report;

pub use error::{Error, Result};
