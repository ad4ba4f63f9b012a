//! Small-set expansion for hypergraphs: a semidefinite relaxation, two
//! randomized rounding schemes built on orthogonal separators, exact
//! brute-force oracles, and the vertex-expansion reduction for graphs.
//!
//! Numeric code is generic over the scalar: floating-point kernels take any
//! [`scalar::Scalar`] (`f32`/`f64`), and the combinatorial/feasibility layers
//! run over any [`scalar::Ring`], including exact rationals, which is how the
//! reference solutions and expansion values are checked bit-exactly. The
//! crate root re-exports the common `f64` entry points.

pub mod embedding;
pub mod hypergraph;
pub mod io;
pub mod mat;
pub mod oracle;
pub mod reductions;
pub mod rng;
pub mod rounding;
pub mod scalar;
pub mod sdp;
pub mod separators;
pub mod verify;

pub use hypergraph::{DegreeProfile, Graph, Hypergraph, HypergraphError, VertexSet};
pub use scalar::{Rational, Ring, Scalar};

/// Default floating-point solution type.
pub type Solution = sdp::SdpSolution<f64>;
