//! Shared numeric utilities: quadrature, root finding and a small
//! second-order automatic differentiation type.

pub mod jet;
pub mod quadrature;
pub mod roots;

pub use jet::Jet2;
pub use quadrature::{integrate, integrate_2d, QuadOptions, QuadResult};
pub use roots::{bracket_increasing, brent};
