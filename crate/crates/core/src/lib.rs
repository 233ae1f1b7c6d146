//! Exact twisted-cohomology computations for hypersphere arrangements.

pub mod arrangement;
pub mod error;
pub mod indices;
pub mod linalg;
pub mod cohomology;
pub mod random;
pub mod contiguity;
pub mod connection;
pub mod verify;
pub mod suites;

pub use arrangement::{Arrangement, MinorSpec, Sym};
pub use error::{Error, Result};
pub use indices::IndexSet;
pub use linalg::Scalar;
