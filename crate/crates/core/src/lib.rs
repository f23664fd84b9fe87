pub mod cli;
pub mod error;
pub mod expsum;
pub mod farey;
pub mod numtheory;
pub mod spacing;
pub mod summation;
pub mod theory;

pub use error::{Error, Result};
