//! Numerical laboratory for compressible Euler flow with time-dependent
//! damping `α(t) = μ/(1+t)^λ`.

pub mod burgers;
pub mod cli;
pub mod damping;
pub mod diagnostics;
pub mod error;
pub mod euler2d;
pub mod numeric;
pub mod specfun;

pub use damping::{classify_case, Case, CaseLabel, DampingLaw, GasLaw};
pub use error::{Error, Result};
