//! Branch-and-bound enumeration of lattice points in a ball.

use num::{BigInt, Zero};

use crate::batch::LatticePoint;
use crate::error::{Error, Result};
use crate::lattice::gso::{gram_schmidt, GramSchmidt, GsoF64};
use crate::lattice::linalg::{self, Rational};
use crate::lattice::reduce::lll_reduce;
use crate::lattice::Basis;

pub const MAX_ENUM_RANK: usize = 12;

/// Enumeration context for one lattice. Works on an LLL-reduced copy of the
/// basis and reports coefficients with respect to the original basis.
#[derive(Clone, Debug)]
pub struct Enumerator {
    basis: Basis,
    reduced: Basis,
    /// `reduced = u·basis`.
    u: Vec<Vec<i64>>,
    gso: GramSchmidt,
    gf: GsoF64,
}

/// Ambient center projected onto the Gram–Schmidt directions.
#[derive(Clone, Debug)]
pub struct Center {
    pub tau: Vec<f64>,
    /// Squared distance from the center to the span of the lattice.
    pub perp_sq: f64,
}

impl Enumerator {
    pub fn new(basis: &Basis, limit: usize, op: &'static str) -> Result<Self> {
        if basis.rank() > limit {
            return Err(Error::RankTooHigh { op, rank: basis.rank(), limit });
        }
        let red = lll_reduce(basis, &Rational::new(BigInt::from(99), BigInt::from(100)));
        let u = linalg::to_i64_matrix(&red.transform).expect("LLL transform fits in 64 bits");
        let gso = gram_schmidt(&red.basis);
        let gf = GsoF64::from_exact(&gso);
        Ok(Self { basis: basis.clone(), reduced: red.basis, u, gso, gf })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn reduced(&self) -> &Basis {
        &self.reduced
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn gso(&self) -> &GramSchmidt {
        &self.gso
    }

    pub fn gs_sq_norms(&self) -> &[f64] {
        &self.gf.sq_norms
    }

    pub fn center(&self, c: &[f64]) -> Center {
        let mut tau = Vec::with_capacity(self.rank());
        let mut in_span = 0.0;
        for (v, &sq) in self.gf.gs_vectors.iter().zip(&self.gf.sq_norms) {
            let t = v.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() / sq;
            in_span += t * t * sq;
            tau.push(t);
        }
        let total: f64 = c.iter().map(|x| x * x).sum();
        Center { tau, perp_sq: (total - in_span).max(0.0) }
    }

    pub fn origin(&self) -> Center {
        Center { tau: vec![0.0; self.rank()], perp_sq: 0.0 }
    }

    /// Calls `f(x, dist_sq)` for every point with in-span squared distance at most
    /// `bound` from the center, where `x` are coefficients over the reduced basis.
    pub fn visit(&self, center: &Center, bound: f64, f: &mut dyn FnMut(&[i64], f64)) {
        let d = self.rank();
        if bound < 0.0 {
            return;
        }
        if d == 0 {
            f(&[], 0.0);
            return;
        }
        let mut x = vec![0i64; d];
        visit_levels(&self.gf.mu, &self.gf.sq_norms, &center.tau, 0, d - 1, &mut x, 0.0, bound, f);
    }

    /// Coefficients over the original basis of a point given over the reduced basis.
    pub fn to_basis_coeffs(&self, x: &[i64]) -> Vec<i64> {
        let d = self.rank();
        let mut out = vec![0i64; d];
        for (xi, row) in x.iter().zip(&self.u) {
            if *xi == 0 {
                continue;
            }
            for (o, uij) in out.iter_mut().zip(row) {
                *o += xi * uij;
            }
        }
        out
    }

    /// All lattice points `y` with `‖y − center‖² ≤ radius_sq`, decided exactly,
    /// with their exact squared distances, sorted by coefficients.
    pub fn ball_exact(&self, center: &[Rational], radius_sq: &Rational) -> Vec<(Vec<i64>, Rational)> {
        let cf: Vec<f64> = center.iter().map(linalg::rat_to_f64).collect();
        let c = self.center(&cf);
        let r2 = linalg::rat_to_f64(radius_sq);
        let scale = r2 + c.perp_sq + self.gf.sq_norms.iter().cloned().fold(0.0, f64::max);
        let bound = r2 - c.perp_sq + 1e-9 * scale + 1e-12;
        let mut cands = Vec::new();
        self.visit(&c, bound, &mut |x, _| cands.push(x.to_vec()));
        let mut out: Vec<(Vec<i64>, Rational)> = cands
            .into_iter()
            .filter_map(|x| {
                let v = self.reduced.ambient(&x);
                let dist: Rational = v.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (dist <= *radius_sq).then(|| (self.to_basis_coeffs(&x), dist))
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn visit_levels(
    mu: &[Vec<f64>],
    sq: &[f64],
    tau: &[f64],
    lo: usize,
    j: usize,
    x: &mut [i64],
    partial: f64,
    bound: f64,
    f: &mut dyn FnMut(&[i64], f64),
) {
    let d = x.len();
    let mut c = tau[j];
    for i in j + 1..d {
        c -= mu[i][j] * x[i] as f64;
    }
    let rem = bound - partial;
    if rem < 0.0 {
        return;
    }
    let w = (rem / sq[j]).sqrt();
    let start = (c - w).ceil() as i64;
    let end = (c + w).floor() as i64;
    for xj in start..=end {
        let diff = xj as f64 - c;
        let p = partial + diff * diff * sq[j];
        if p > bound {
            continue;
        }
        x[j] = xj;
        if j == lo {
            f(x, p);
        } else {
            visit_levels(mu, sq, tau, lo, j - 1, x, p, bound, f);
        }
    }
    x[j] = 0;
}

/// Lattice points in the closed ball of the given radius, sorted by coefficients.
pub fn enumerate_ball(b: &Basis, center: &[Rational], radius: f64) -> Result<Vec<LatticePoint>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {radius} must be finite and nonnegative")));
    }
    if center.len() != b.ambient_dim() {
        return Err(Error::Dimension(format!("center has {} coordinates, expected {}", center.len(), b.ambient_dim())));
    }
    let e = Enumerator::new(b, MAX_ENUM_RANK, "enumerate_ball")?;
    let r = Rational::from_float(radius).expect("finite radius");
    Ok(e.ball_exact(center, &(&r * &r)).into_iter().map(|(c, _)| LatticePoint::new(c)).collect())
}

/// Shortest nonzero vector of the projection of `L(b_k, …, b_d)` orthogonal to
/// `b_1, …, b_{k−1}`, as coefficients over `b_k, …, b_d`.
pub fn enumerate_projected_shortest(g: &GramSchmidt, gf: &GsoF64, k: usize) -> Vec<i64> {
    let d = gf.sq_norms.len();
    let bound = gf.sq_norms[k] * (1.0 + 1e-9);
    let tau = vec![0.0; d];
    let mut cands: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; d];
    visit_levels(&gf.mu, &gf.sq_norms, &tau, k, d - 1, &mut x, 0.0, bound, &mut |x, _| {
        if x[k..].iter().any(|&v| v != 0) {
            cands.push(x[k..].to_vec());
        }
    });
    let proj_norm = |c: &[i64]| -> Rational {
        let mut total = Rational::zero();
        for j in k..d {
            let mut coord = Rational::zero();
            for i in j..d {
                let xi = c[i - k];
                if xi != 0 {
                    coord += &g.mu[i][j] * Rational::from_integer(BigInt::from(xi));
                }
            }
            total += &coord * &coord * &g.gs_sq_norms[j];
        }
        total
    };
    cands
        .into_iter()
        .map(|c| (proj_norm(&c), c))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .map(|(_, c)| c)
        .expect("b_k itself is a candidate")
}
