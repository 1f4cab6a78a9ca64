pub mod catalog;
pub mod criteria;
pub mod disc;
pub mod error;
pub mod isometric;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod shortvec;
pub mod verdict;

pub use error::{Error, Result};
pub use lattice::{Lattice, Vector};
