//! Exact computations with normalized affine Hecke algebras on the torus side:
//! μ-functions, residual cosets, formal degrees, diagrams and spectral
//! transfer maps.

pub mod cli;
pub mod diagrams;
pub mod error;
pub mod exactscalars;
pub mod mu;
pub mod residual;
pub mod rootdata;
pub mod stm;
pub mod torus;

pub use error::{Error, Result};
