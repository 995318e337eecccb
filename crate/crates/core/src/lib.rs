pub mod blowup;
pub mod cli;
pub mod diagonal;
pub mod error;
pub mod fitting;
pub mod ideal;
pub mod poly;
pub mod tree;

pub use error::{Error, Result};
