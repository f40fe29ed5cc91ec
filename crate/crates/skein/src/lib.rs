//! Explicit finite-dimensional representations of Kauffman bracket skein
//! algebras of the one-punctured torus and the four-punctured sphere at
//! roots of unity: construction, relation verification, classical shadows,
//! irreducibility, and Azumaya-locus classification.

pub mod error;
pub mod linalg;
pub mod par;
pub mod scalars;

pub mod hsphere;
pub mod ptorus;

pub mod report;
pub mod sample;

pub use error::{Result, SkeinError};
pub use scalars::{RootContext, Surface};
