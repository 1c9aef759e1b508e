//! Gram–Schmidt orthogonalization and dual bases.

use num::{One, Zero};

use super::basis::Basis;
use super::linalg::{self, rat_to_f64, RatMatrix, Rational};

/// Exact Gram–Schmidt data of a basis, in basis order.
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub gs_vectors: RatMatrix,
    /// Squared norms `‖b̃_i‖²`, exact.
    pub gs_sq_norms: Vec<Rational>,
    pub gs_norms: Vec<f64>,
    pub max_gs_norm: f64,
    /// `mu[i][j] = ⟨b_i, b̃_j⟩ / ‖b̃_j‖²` for `j < i`, with ones on the diagonal.
    pub mu: RatMatrix,
}

pub fn gram_schmidt(b: &Basis) -> GramSchmidt {
    let d = b.rank();
    let rows = b.rows();
    let mut gs: RatMatrix = Vec::with_capacity(d);
    let mut sq: Vec<Rational> = Vec::with_capacity(d);
    let mut mu = vec![vec![Rational::zero(); d]; d];
    for i in 0..d {
        let mut v = rows[i].clone();
        for j in 0..i {
            let m = linalg::dot(&rows[i], &gs[j]) / &sq[j];
            if !m.is_zero() {
                for (x, y) in v.iter_mut().zip(&gs[j]) {
                    *x -= &m * y;
                }
            }
            mu[i][j] = m;
        }
        mu[i][i] = Rational::one();
        sq.push(linalg::norm_sq(&v));
        gs.push(v);
    }
    let gs_norms: Vec<f64> = sq.iter().map(|x| rat_to_f64(x).sqrt()).collect();
    let max_gs_norm = gs_norms.iter().cloned().fold(0.0, f64::max);
    GramSchmidt { gs_vectors: gs, gs_sq_norms: sq, gs_norms, max_gs_norm, mu }
}

/// Floating-point view of the Gram–Schmidt data, for enumeration and sampling.
#[derive(Clone, Debug)]
pub struct GsoF64 {
    pub mu: Vec<Vec<f64>>,
    pub sq_norms: Vec<f64>,
    pub gs_vectors: Vec<Vec<f64>>,
}

impl GsoF64 {
    pub fn from_exact(g: &GramSchmidt) -> Self {
        Self {
            mu: g.mu.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect(),
            sq_norms: g.gs_sq_norms.iter().map(rat_to_f64).collect(),
            gs_vectors: g.gs_vectors.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect(),
        }
    }
}

/// The dual basis `B* = (B·Bᵀ)⁻¹·B`, which lies in the span of `B` and satisfies
/// `⟨b*_i, b_j⟩ = δ_ij`.
pub fn dual_basis(b: &Basis) -> Basis {
    let d = b.rank();
    if d == 0 {
        return Basis::zero(b.ambient_dim());
    }
    let inv = linalg::inverse(&b.gram()).expect("basis Gram matrix is invertible");
    let rows = linalg::mat_mul(&inv, b.rows(), b.ambient_dim());
    Basis::new_unchecked(rows, b.ambient_dim())
}
