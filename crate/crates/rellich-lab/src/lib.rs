//! Numerical laboratory for a fourth-order Hardy–Rellich problem on the
//! half-space: closed-form constants and indicial roots, reduced radial
//! energies, the two explicit test-function families, quotient minimization
//! and mountain-pass ray analysis.

pub mod cli;
pub mod constants;
pub mod error;
pub mod minimizer;
pub mod mountain_pass;
pub mod profiles;
pub mod radial_calculus;
pub mod test_functions;

pub use error::{Error, Result};
