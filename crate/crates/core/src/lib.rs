//! Joint sparse recovery from multiple measurement vectors.
//!
//! The crate covers the whole pipeline of subspace-based support recovery:
//! sensing matrix generation, row-sparse signal models, signal subspace
//! estimation, MUSIC and subspace-augmented MUSIC with greedy partial support
//! recovery, executable recovery guarantees (weak-1 restricted isometry
//! constants, trade-off curves, sample complexity) and a seeded Monte-Carlo
//! harness.

pub mod error;
pub mod linalg;
pub mod rng;
pub mod sensing;
pub mod signal;
pub mod subspace;
pub mod recovery;
pub mod analysis;
pub mod bench;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, OrthonormalBasis, SupportSet, C64};
