//! Exact computations in lattice vertex operator algebras.

pub mod autos;
pub mod cli;
pub mod commutant;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod qseries;
pub mod scalar;
pub mod scenario;
pub mod vertex;

pub use error::{Result, VoaError};
pub use scalar::{GaussScalar, Rational};
