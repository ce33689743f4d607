//! File formats, reports, seeded generators and the `polyflex` command
//! line on top of the `polyflex` library.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod format;
pub mod generators;
pub mod report;
pub mod sequence;

pub use error::{IoError, Result};
