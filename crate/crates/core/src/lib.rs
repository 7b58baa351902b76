//! Linear isometries of Lipschitz-free spaces over finite metric spaces.
//!
//! The crate computes norms of molecules, extreme-molecule graphs, simple
//! cycles and connectivity of the associated directed graphs, decides when
//! an edge bijection induces a linear isometry, and assembles the full
//! group of such isometries.

pub mod constructions;
pub mod error;
pub mod extgraph;
pub mod graphkit;
pub mod io;
pub mod isogroup;
pub mod lp;
pub mod metric;
pub mod scalar;
pub mod transport;
pub mod whitney;

pub use error::{Error, Result};
pub use graphkit::{DirectedSymGraph, EdgeId, SimpleCycle};
pub use metric::{elementary_molecule, validate_metric, FiniteMetricSpace, LipschitzWitness, Molecule};
pub use scalar::{parse_rational, rat, Approx, Rational, Scalar};
pub use transport::{free_norm, NormReport};
