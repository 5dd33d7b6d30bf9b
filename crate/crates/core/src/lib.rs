#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod criteria;
pub mod expr;
pub mod numerics;
pub mod oracle;
pub mod riccati;
pub mod transform;

pub use error::{Error, Result};
