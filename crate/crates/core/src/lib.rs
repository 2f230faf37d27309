//! Typical matrices of random graphs with independent edges.
//!
//! The crate evaluates and empirically validates a matrix Freedman
//! inequality and its consequences: concentration of adjacency and
//! normalized Laplacian matrices around their expectations, spectral gap
//! stability under bond percolation, spectra of inhomogeneous random
//! graphs against their kernel operators, and eigenvalue/eigenprojector
//! perturbation bounds.

pub mod concentration;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod linalg;
pub mod perturbation;
pub mod quasirandom;
pub mod random_graphs;
pub mod rng;

pub use error::{Error, Result};
