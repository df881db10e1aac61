//! Exact rational linear algebra: the trust kernel behind every decision.

mod lp;
mod matrix;

pub use lp::{lp_feasible, verify_farkas, verify_solution, FeasibilityResult};
pub use matrix::{Consistency, RationalMatrix};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Renders `p/q`, or just `p` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn format_rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    text.trim().parse().ok()
}

pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}
