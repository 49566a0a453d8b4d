//! Numerical laboratory for KZ-type flat connections on diagrammatic
//! multiplicity spaces.
//!
//! The crate builds finite matrix models of Casimir operators on two families
//! of multiplicity spaces (group algebras of symmetric groups and spaces of
//! perfect matchings), realizes the same operators on fermionic Fock spaces
//! through skew Howe duality, assembles the associated flat connections
//! (KZ, kappa, dynamical, orthogonal dual), transports flat sections along
//! paths in configuration space to obtain braid monodromy, compares the
//! monodromy against Hecke-algebra braiding matrices, and evaluates
//! hypergeometric integral solutions over nested Hankel-type contours.
//!
//! See the `examples/` directory for one runnable program per capability, or
//! the `kzlab` binary for a report-emitting command line front end.

pub mod algebra;
pub mod braiding;
pub mod cache;
pub mod cli;
pub mod connections;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod operator;
pub mod report;
pub mod solutions;
pub mod transport;

pub use error::{KzError, Result};
pub use operator::LinearOperator;

/// Complex scalar used everywhere in the crate.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = ndarray::Array2<C64>;

/// Dense complex vector.
pub type CVec = ndarray::Array1<C64>;
