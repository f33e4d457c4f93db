pub mod dd;
pub mod error;
pub mod fiber;
pub mod genericity;
pub mod lattice;
pub mod monodromy;
pub mod linalg;
pub mod numsolve;
pub mod pipeline;
pub mod poly;
pub mod rng;
pub mod theorems;

pub use error::{Error, Result};
