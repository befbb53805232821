//! Computational machinery for singular moduli: imaginary quadratic orders,
//! binary quadratic forms and class groups, rigorous evaluation of the Klein
//! j-invariant, Hilbert class polynomials, Weil heights, epsilon-ball CM-point
//! counting, and certification of the effective norm bounds built from them.

pub mod certify;
pub mod classpoly;
pub mod cmcount;
pub mod disc;
pub mod error;
pub mod forms;
pub mod heights;
pub mod intarith;
pub mod interval;
pub mod jeval;

pub use disc::Discriminant;
pub use error::{Error, Result};
pub use forms::{CMPoint, QForm};
