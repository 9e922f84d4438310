//! File formats, configuration, parallel drivers and the `biasline`
//! command-line pipeline around `biasline-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod model_io;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
