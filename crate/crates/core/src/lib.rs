pub mod cli;
pub mod error;
pub mod jacobi;
pub mod expansion;
pub mod linalg;
pub mod operator;
pub mod polyalg;
pub mod real;
pub mod spectral;
pub mod xjacobi;

pub use error::{Error, ParamViolation};
