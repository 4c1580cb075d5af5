//! Constrained site percolation on the square lattice.
//!
//! The state space is the set of 0/1 site configurations in which every
//! black unit face reads one of the six patterns 0000, 1111, 0011, 1100,
//! 0110, 1001 (clockwise from the lower-left corner). The crate provides:
//!
//! - the lattice geometry, the contour map to the two auxiliary grids and
//!   its inverse, and exhaustive enumeration of small state spaces
//!   ([`lattice`], [`constrained`]);
//! - cluster, contour and interface analysis with the finite-box forms of
//!   the combinatorial lemmas behind them ([`topology`], [`lemmas`]);
//! - the contour surgery toolkit: boundary-preserving completion of a
//!   3x3 dual box, the inductive box merge, and face-flip reachability
//!   ([`surgery`]);
//! - Ising / XOR-Ising and square-octagon dimer samplers with the weight
//!   and coupling conversions tying them together ([`models`]);
//! - a seeded, reproducible experiment harness ([`harness`]).

mod bits;

pub mod constrained;
pub mod harness;
pub mod lattice;
pub mod lemmas;
pub mod models;
pub mod sampling;
pub mod surgery;
pub mod topology;

pub use constrained::{ContourConfig, SiteConfig, Validity};
pub use lattice::{Domain, DomainKind, FaceId, Grid, SiteCoord};

/// Library version, echoed into result records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
