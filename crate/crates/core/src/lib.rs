pub mod error;
pub mod interval;
pub mod polysys;
pub mod certify;
pub mod tracker;
pub mod projection;
pub mod cli;

pub use error::{Error, Result};
