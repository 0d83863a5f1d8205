//! Periodic torus orbits on `PGL_n(Z)\PGL_n(R)` for `n = 2, 3`.
//!
//! The crate builds totally real fields and their orders exactly, turns
//! ideal classes into periodic orbits of the diagonal group, and measures
//! those orbits: discriminants, volumes, cusp excursion, separation and
//! escape of mass. A finite model of the `x2, x3` action on `R/Z` lives in
//! [`times23`].

pub mod dynamics;
pub mod error;
pub mod fields;
pub mod forms;
pub mod ideals;
pub mod lattice;
pub mod linalg;
pub mod modular2;
pub mod orbits;
pub mod poly;
pub mod stats;
pub mod times23;

pub use error::{Error, Result};
