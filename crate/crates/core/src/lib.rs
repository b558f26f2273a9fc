pub mod ainf;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod filt;
pub mod fixtures;
pub mod fpcat;
pub mod loopmodels;
pub mod serde_scalar;

pub use error::{Error, Result};
