//! Exact desk-scale computations over the p-adic numbers: coset grids,
//! test functions, the Fourier transform as a finite character sum, the
//! Vladimirov-type fractional operators, a Radon transform over unit
//! directions, and the non-Archimedean wave equation built on top of them.

pub mod error;
pub mod experiment;
pub mod fourier;
pub mod local_field;
pub mod radon;
pub mod schwartz;
pub mod vladimirov;
pub mod waves;

pub use error::{Error, Result};
pub use local_field::{CosetGrid, FieldParams, PAdicRational, Point};
pub use schwartz::TestFunction;
