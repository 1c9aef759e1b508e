//! Discrete Gaussian sampling over lattices.
//!
//! The crate is layered: [`lattice`] holds exact rational lattice arithmetic,
//! [`oracle`] brute-force ground truth, [`sampling`] the base samplers,
//! [`resample`] the square and square-root resamplers, [`combine`] the
//! Gaussian combiners, [`reductions`] SVP, GapSVP and CVP on top of a sampler,
//! and [`harness`] statistics and the verification suites.

pub mod batch;
pub mod combine;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod prob;
pub mod reductions;
pub mod profile;
pub mod resample;
pub mod sampling;

pub use batch::{LatticePoint, SampleBatch, Source};
pub use error::{Error, Result};
pub use prob::ProbVector;
