//! Classical and quantum expanders built from finite groups.
//!
//! The crate covers classical graphs and their Cheeger constants, quantum
//! bistochastic channels with their spectral gaps and edge expansion,
//! tracial quantum graphs, quantum Cayley and Schreier graphs over duals of
//! finite groups, and channels coming from matched pairs of finite groups.
//! All matrices are dense; see [`numerics`].

pub mod bicrossed;
pub mod channels;
pub mod dualcayley;
pub mod error;
pub mod graphs;
pub mod groups;
pub mod numerics;
pub mod qgraphs;

pub use error::Error;
pub use numerics::{ComplexMatrix, C64};
