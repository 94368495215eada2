use thiserror::Error;

/// Which admissibility clause a parameter triple violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ParamViolation {
    #[error("alpha and beta must both exceed -1")]
    RangeViolation,
    #[error("alpha + 1 - m - beta lies in {{0, 1, ..., m-1}}")]
    ForbiddenDifference,
    #[error("sgn(alpha + 1 - m) differs from sgn(beta) (zero counts as its own sign)")]
    SignMismatch,
    #[error("codimension m must be at least 1")]
    InvalidCodimension,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("invalid parameters: {0}")]
    Param(#[from] ParamViolation),

    #[error("denominator polynomial has degree {actual}, expected {expected}")]
    DegenerateDenominator { expected: usize, actual: i64 },

    #[error("denominator root {re}{im:+}i lies in [-1, 1]")]
    RootInInterval { re: f64, im: f64 },

    #[error("denominator roots are not simple (separation {separation:e})")]
    RepeatedRoot { separation: f64 },

    #[error("degree {n} lies in the gap below m = {m}")]
    BelowGap { n: u32, m: u32 },

    #[error("point {x} lies outside the open interval (-1, 1)")]
    DomainViolation { x: f64 },

    #[error("denominator vanishes at x = {x}")]
    SingularPoint { x: f64 },

    #[error("operator does not map the polynomial to a polynomial (remainder {remainder})")]
    NotInvariant { remainder: String },

    #[error("{what} did not converge: {detail}")]
    NonConvergent { what: &'static str, detail: String },

    #[error("quadrature requires a > -1 and b > -1 (got a = {a}, b = {b})")]
    QuadratureParams { a: f64, b: f64 },

    #[error("quadrature order must be at least 1")]
    QuadratureOrder,
}
