//! Braided tensor bialgebras, primitive elements and the universal
//! enveloping tower of a braided Lie structure.

pub mod braiding;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod exactla;
pub mod oracle;
pub mod quotient;
pub mod scalar;
pub mod tensoralg;

pub use error::{Error, Result};
pub use scalar::{Field, Fp, Rational, F2, F3, F5, F7};
