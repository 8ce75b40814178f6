//! Command-line front end: subcommands over the core crate, built-in
//! corpora and the acceptance suite.

pub mod args;
pub mod commands;
pub mod corpus;
pub mod criteria;
pub mod output;
pub mod suite;

pub use args::Cli;
pub use commands::{run, Status};
pub use suite::{pipeline_paper_suite, SuiteOptions, SuiteReport};

/// Domain and input failures.
pub const EXIT_DOMAIN: u8 = 1;
/// The exact solver hit its configured capacity.
pub const EXIT_CAPACITY: u8 = 2;
/// A consistency report or the suite found violations.
pub const EXIT_VIOLATION: u8 = 3;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<lipwidth_core::Error>() {
        Some(lipwidth_core::Error::Capacity(_)) => EXIT_CAPACITY,
        _ => EXIT_DOMAIN,
    }
}
