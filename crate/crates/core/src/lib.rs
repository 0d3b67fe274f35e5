//! Nearest-neighbor contingency table (NNCT) methods for spatial segregation
//! and case-control disease clustering.
//!
//! The crate is organised bottom-up:
//!
//! * [`spatial`] stores planar points, answers exact k-nearest-neighbor
//!   queries and summarises the NN digraph (`R`, `Q`).
//! * [`nnct`] and [`moments`] build the contingency table and its exact
//!   first and second moments under random labeling; [`oracle`] checks them
//!   by brute-force enumeration.
//! * [`indices`] holds Pielou's coefficient and Dixon's segregation indices.
//! * [`nntest`] holds the cell-specific, overall and Cuzick-Edwards tests.
//! * [`battery`] evaluates many tests on many labelings of one location set.
//! * [`randomization`], [`patterns`] and [`sim`] provide Monte Carlo
//!   inference, point-process generators and size/power campaigns.

pub mod battery;
pub mod dataset;
pub mod dist;
pub mod error;
mod exact;
pub mod indices;
pub mod linalg;
pub mod moments;
pub mod nnct;
pub mod nntest;
pub mod oracle;
pub mod patterns;
pub mod randomization;
pub mod rng;
pub mod sim;
pub mod spatial;

pub use error::{Error, Result};
pub use nnct::{build_nnct, Nnct};
pub use spatial::{build_nn_structure, NnStructure, Point, PointSet};

/// Library version, recorded in reproducibility manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
