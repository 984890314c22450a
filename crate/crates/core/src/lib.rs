pub mod acceptance;
pub mod arith;
pub mod cli;
pub mod defect;
pub mod error;
pub mod family;
pub mod invariants;
pub mod oracle;
pub mod search;

pub use error::{Error, Result};
