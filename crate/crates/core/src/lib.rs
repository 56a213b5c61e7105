//! Exact polyhedral toolkit for correlation polytopes.
//!
//! Tight Bell inequalities are the facets of a correlation polytope. Besides
//! brute-force and double-description hull oracles, the crate derives them
//! by gluing small, exactly known polytopes along a tree decomposition of
//! the compatibility graph and projecting out the unmeasurable joint
//! probabilities with Fourier-Motzkin elimination.
//!
//! All arithmetic is exact; see [`linalg::Rational`].

pub mod bell;
pub mod error;
pub mod fm;
pub mod hull;
pub mod linalg;
pub mod polyhedron;

pub use error::{Error, Result};
pub use linalg::{Rational, RationalMatrix, RationalVector};
pub use polyhedron::{Classification, InequalitySystem, LinearInequality, VertexSet};
