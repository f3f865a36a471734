pub mod cli;
pub mod dwf;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod protocols;
pub mod qmath;
pub mod sim;
pub mod synth;
pub mod tomo;

pub use error::{Error, Result};
