pub mod error;
pub mod field;
pub mod series;

pub use error::{Error, Result};
pub use field::{Field, FieldElem};
pub use series::{Ideal, Series};
pub mod parse;
pub mod defects;
pub mod quaternion;
pub mod tree;
pub mod predictor;
pub mod existence;
pub mod selftest;
pub mod cli;
