pub mod density;
pub mod error;
pub mod evolution;
pub mod interface;
pub mod membrane;
pub mod spectral;
pub mod velocity;

pub use error::{Error, Result};
pub mod harness;
