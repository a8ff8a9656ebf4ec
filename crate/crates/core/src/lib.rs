pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod levy_measure;
pub mod mc;
pub mod moment_match;
pub mod quad;
pub mod rng;
pub mod schemes;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
