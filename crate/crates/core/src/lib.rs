//! Finite-section computations with Toeplitz-type operators on the Hardy space
//! of the symmetrized bidisc, plus executable checks of their structure.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod spaces;
pub mod symbols;

pub use error::{Error, Result};
pub use lattice::{AntiIndex, IndexWindow, Lattice};
pub use operators::OperatorMatrix;
pub use symbols::{FourierSymbol, SpPoly};
