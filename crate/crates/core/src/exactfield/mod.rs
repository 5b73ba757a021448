//! Exact arithmetic in `GF(2)[T]` and its fraction field `GF(2)(T)`, the
//! coefficient field of the spanning-tree complex.

mod frac;
mod parse;
mod poly;
mod residue;

pub use frac::RationalFn;
pub use parse::{parse_rational, MAX_EXPONENT};
pub use poly::BinPoly;
pub use residue::{ResidueField, MODULI};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivideByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
