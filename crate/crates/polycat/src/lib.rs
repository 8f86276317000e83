//! Document format, seeded generators, law suites and the command line for
//! [`polycat_core`].

pub mod commands;
pub mod doc;
pub mod error;
pub mod gen;
pub mod suites;

pub use doc::{Document, Model};
pub use error::{DocError, Failure};
