//! Exact arithmetic: rationals, polynomials, real root isolation and real
//! algebraic numbers.

mod interval;
mod poly;
mod rational;
mod real;
mod resultant;
mod roots;
pub(crate) mod tower;

pub use interval::Interval;
pub use poly::{poly_arith, squarefree_part, IntPoly, PolyOp, PolyResult, RatPoly};
pub use rational::{
    ceil, ceil_dyadic, common_denominator, exact_sqrt, floor, floor_dyadic, format_rational, int, parse_rational,
    pow2, rat, round_dyadic, round_half_even, simplest_between, sqrt_lower, sqrt_lower_bound, sqrt_upper,
    sqrt_upper_bound, sqrt_upper_rel, Rational,
};
pub use real::{
    abs_upper, alg_arith, alg_compare, alg_sign, alg_sqrt, alg_to_decimal, isolate_real_roots, real_roots, refine,
    AlgOp, IsolationResult, RealAlgebraic,
};
pub use roots::RootNum;

pub(crate) use real::lift_all;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}
