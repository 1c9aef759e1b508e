//! Lattice points and sample batches.

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::lattice::linalg::{rat_to_f64, Rational};
use crate::lattice::{Basis, BasisId};

/// A lattice point, stored by its integer coefficients with respect to a basis.
/// Ambient coordinates are derived from the basis on demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
}

impl LatticePoint {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(d: usize) -> Self {
        Self { coeffs: vec![0; d] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn ambient(&self, b: &Basis) -> Vec<Rational> {
        b.ambient(&self.coeffs)
    }

    pub fn ambient_f64(&self, b: &Basis) -> Vec<f64> {
        b.ambient_f64(&self.coeffs)
    }

    pub fn norm_sq(&self, b: &Basis) -> Rational {
        b.norm_sq(&self.coeffs)
    }

    pub fn norm(&self, b: &Basis) -> f64 {
        rat_to_f64(&self.norm_sq(b)).sqrt()
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn coeffs_big(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

/// Where a batch came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Exact,
    Gpv,
    Combiner,
    Smooth,
}

/// Points of one lattice, nominally drawn from a discrete Gaussian of width `param`.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub points: Vec<LatticePoint>,
    pub param: f64,
    pub basis: Basis,
    pub source: Source,
    pub claimed_tv_error: f64,
}

impl SampleBatch {
    pub fn new(basis: Basis, param: f64, source: Source, points: Vec<LatticePoint>, claimed_tv_error: f64) -> Self {
        Self { points, param, basis, source, claimed_tv_error: claimed_tv_error.clamp(0.0, 1.0) }
    }

    pub fn empty(basis: Basis, param: f64, source: Source) -> Self {
        Self::new(basis, param, source, Vec::new(), 0.0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn basis_id(&self) -> BasisId {
        self.basis.id()
    }

    pub fn ambient_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.ambient_f64(&self.basis)).collect()
    }
}
