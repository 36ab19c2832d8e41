pub mod catalog;
pub mod cli;
pub mod compatibility;
pub mod error;
pub mod expr;
pub mod fd;
pub mod lemma;
pub mod minkowski;
pub mod reduction;
pub mod sample;
pub mod solutions;

pub use error::{Error, Result};
