//! Effective-resistance preserving symmetrization of directed graphs.
//!
//! A connected digraph Laplacian `L` is mapped to the unique undirected
//! (possibly negatively weighted) Laplacian `L̂ᵤ` with identical pairwise
//! effective resistances, together with the factorization
//! `L = H (I + 2K) L̂ᵤ`. On top of that the crate provides spectral bisection
//! of digraphs and Kron reduction with a directed re-mapping.

pub mod error;
pub mod graph;
pub mod kron;
pub mod linalg;
pub mod partition;
pub mod report;
pub mod symmetrize;

pub use error::{Error, Result};
