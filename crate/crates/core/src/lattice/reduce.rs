//! Basis reduction: exact LLL and HKZ.

use num::{BigInt, One, Signed};

use super::basis::Basis;
use super::gso::{gram_schmidt, GsoF64};
use super::linalg::{self, rat_to_f64, IntMatrix, Rational};
use crate::oracle::enumerate::enumerate_projected_shortest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionProfile {
    /// LLL with Lovász parameter 0.99.
    Lll,
    /// HKZ reduction via enumeration, rank at most 10.
    Exact,
}

/// A reduced basis together with the unimodular `U` such that `reduced = U·input`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub basis: Basis,
    pub transform: IntMatrix,
}

pub const EXACT_PROFILE_MAX_RANK: usize = 10;

pub fn reduce_basis(b: &Basis, profile: ReductionProfile) -> Reduced {
    let lll = lll_reduce(b, &Rational::new(BigInt::from(99), BigInt::from(100)));
    match profile {
        ReductionProfile::Lll => lll,
        ReductionProfile::Exact => {
            assert!(b.rank() <= EXACT_PROFILE_MAX_RANK, "exact profile supports rank ≤ {EXACT_PROFILE_MAX_RANK}");
            hkz_reduce(lll)
        }
    }
}

struct Lll {
    b: Vec<Vec<Rational>>,
    u: IntMatrix,
    mu: Vec<Vec<Rational>>,
    bsq: Vec<Rational>,
}

impl Lll {
    fn size_reduce(&mut self, k: usize, l: usize) {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        if self.mu[k][l].abs() <= half {
            return;
        }
        let q = linalg::round_half_up(&self.mu[k][l]);
        let qr = Rational::from_integer(q.clone());
        let (bl, ul) = (self.b[l].clone(), self.u[l].clone());
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &qr * y;
        }
        for (x, y) in self.u[k].iter_mut().zip(&ul) {
            *x -= &q * y;
        }
        self.mu[k][l] -= &qr;
        for j in 0..l {
            let t = &qr * &self.mu[l][j];
            self.mu[k][j] -= t;
        }
    }

    fn swap(&mut self, k: usize) {
        let d = self.b.len();
        let m = self.mu[k][k - 1].clone();
        let big_b = &self.bsq[k] + &m * &m * &self.bsq[k - 1];
        self.mu[k][k - 1] = &m * &self.bsq[k - 1] / &big_b;
        self.bsq[k] = &self.bsq[k - 1] * &self.bsq[k] / &big_b;
        self.bsq[k - 1] = big_b;
        self.b.swap(k, k - 1);
        self.u.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = self.mu[k][j].clone();
            self.mu[k][j] = self.mu[k - 1][j].clone();
            self.mu[k - 1][j] = t;
        }
        for i in k + 1..d {
            let t = self.mu[i][k].clone();
            self.mu[i][k] = &self.mu[i][k - 1] - &m * &t;
            self.mu[i][k - 1] = &t + &self.mu[k][k - 1] * &self.mu[i][k];
        }
    }
}

/// Exact LLL reduction with Lovász parameter `delta`.
pub fn lll_reduce(b: &Basis, delta: &Rational) -> Reduced {
    let d = b.rank();
    let g = gram_schmidt(b);
    let mut st = Lll { b: b.rows().to_vec(), u: linalg::identity(d), mu: g.mu, bsq: g.gs_sq_norms };
    let mut k = 1;
    while k < d {
        st.size_reduce(k, k - 1);
        let m2 = &st.mu[k][k - 1] * &st.mu[k][k - 1];
        if st.bsq[k] < (delta - m2) * &st.bsq[k - 1] {
            st.swap(k);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                st.size_reduce(k, l);
            }
            k += 1;
        }
    }
    Reduced { basis: Basis::new_unchecked(st.b, b.ambient_dim()), transform: st.u }
}

/// Size reduction only (`|μ_ij| ≤ 1/2`), leaving the Gram–Schmidt vectors unchanged.
fn size_reduce_all(r: Reduced) -> Reduced {
    let d = r.basis.rank();
    let g = gram_schmidt(&r.basis);
    let mut st = Lll { b: r.basis.rows().to_vec(), u: r.transform, mu: g.mu, bsq: g.gs_sq_norms };
    for k in 1..d {
        for l in (0..k).rev() {
            st.size_reduce(k, l);
        }
    }
    Reduced { basis: Basis::new_unchecked(st.b, r.basis.ambient_dim()), transform: st.u }
}

/// HKZ reduction: each `b̃_k` is a shortest nonzero vector of the projection of
/// `L(b_k, …, b_d)` orthogonal to `b_1, …, b_{k−1}`.
fn hkz_reduce(mut r: Reduced) -> Reduced {
    let d = r.basis.rank();
    let n = r.basis.ambient_dim();
    for k in 0..d.saturating_sub(1) {
        let g = gram_schmidt(&r.basis);
        let gf = GsoF64::from_exact(&g);
        let c = enumerate_projected_shortest(&g, &gf, k);
        if c.iter().skip(1).all(|x| *x == 0) && c[0].abs() == 1 {
            continue;
        }
        let cb: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        let w = linalg::complete_to_unimodular(&cb).expect("shortest projected vector is primitive");
        let tail_rows: Vec<Vec<Rational>> = r.basis.rows()[k..].to_vec();
        let tail_u: IntMatrix = r.transform[k..].to_vec();
        let new_rows = linalg::mat_mul(&linalg::to_rat_matrix(&w), &tail_rows, n);
        let new_u = linalg::int_mat_mul(&w, &tail_u);
        let mut rows = r.basis.rows()[..k].to_vec();
        rows.extend(new_rows);
        let mut u = r.transform[..k].to_vec();
        u.extend(new_u);
        r = Reduced { basis: Basis::new_unchecked(rows, n), transform: u };
    }
    size_reduce_all(r)
}

/// First-vector length of the reduced basis, in floating point.
pub fn first_vector_norm(r: &Reduced) -> f64 {
    r.basis.rows().first().map_or(0.0, |v| rat_to_f64(&linalg::norm_sq(v)).sqrt())
}
