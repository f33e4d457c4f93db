//! Combinatorial models of smooth fibers and their homology.

mod graph;
mod model;

pub use graph::{homology, reduce, reduce_free, reverse, Cell, Homology, SheetGraph, Step, Walk};
pub use model::{build_fiber, CyclePath, FiberModel, HomologyClass, PointKind, Segment, XPoint};
#[allow(unused_imports)]
pub(crate) use model::{angle_from, lasso};
