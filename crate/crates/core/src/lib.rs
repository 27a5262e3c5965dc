//! Chip-firing divisor theory on finite multigraphs, exact Baker-Norine rank,
//! Brill-Noether checks, and generators for maximally symmetric trivalent
//! graph families.

pub mod brillnoether;
pub mod claims;
pub mod divisor;
pub mod error;
pub mod families;
pub mod graph;
pub mod symmetry;

pub use brillnoether::{BNOptions, BNReport, Verdict};
pub use divisor::{ChipFiring, Divisor, FiringScript, LoopConvention, ReductionResult};
pub use error::{Error, Result};
pub use families::{FamilySpec, JoinShape, LabeledGraph, NamedGraph};
pub use graph::{Multigraph, VertexId};
pub use symmetry::{ParallelAction, VertexPermutation};
