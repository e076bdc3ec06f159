//! Exact arithmetic core: rationals, sparse polynomials, rational functions,
//! and the text syntax for expressions.

mod parse;
mod poly;
mod print;
mod ratfun;
mod var;

pub use parse::{parse, parse_with};
pub use poly::{Monomial, Poly};
pub use print::print;
pub use ratfun::RatFun;
pub use var::{MultiIndex, VarId, VarKind, MAX_INDEPENDENTS};

use thiserror::Error;

/// Arbitrary-precision rational numbers, always in lowest terms.
pub type Rational = num_rational::BigRational;

/// Parses a rational literal such as `3`, `-2/5`.
pub fn rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d == num_bigint::BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("variable {0:?} has no value")]
    UnboundVariable(VarId),
    #[error("exponent too large")]
    ExponentTooLarge,
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent must be an integer literal (at {pos})")]
    NonIntegerExponent { pos: usize },
}
