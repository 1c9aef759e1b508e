//! Sublattice transforms and canonical coset labels.

use num::{BigInt, Signed, ToPrimitive, Zero};

use super::basis::{Basis, BasisId};
use super::linalg::{self, IntMatrix, Rational};
use crate::error::{Error, Result};

/// Integer matrix `T` with `Lsub = T·L` (rows are basis vectors), so row `i` of
/// `T` holds the coefficients of the `i`-th vector of `Lsub` in the basis of `L`.
pub fn sublattice_transform(l: &Basis, lsub: &Basis) -> Result<IntMatrix> {
    if l.ambient_dim() != lsub.ambient_dim() {
        return Err(Error::NotSublattice("ambient dimensions differ".into()));
    }
    if l.rank() != lsub.rank() {
        return Err(Error::NotSublattice(format!("rank {} differs from rank {}", lsub.rank(), l.rank())));
    }
    let d = l.rank();
    if d == 0 {
        return Ok(Vec::new());
    }
    let inv = linalg::inverse(&l.gram()).expect("basis Gram matrix is invertible");
    let cross: Vec<Vec<Rational>> =
        lsub.rows().iter().map(|v| l.rows().iter().map(|b| linalg::dot(v, b)).collect()).collect();
    let t = linalg::mat_mul(&cross, &inv, d);
    let t = linalg::to_int_matrix(&t).ok_or_else(|| Error::NotSublattice("non-integer coefficients".into()))?;
    let back = linalg::mat_mul(&linalg::to_rat_matrix(&t), l.rows(), l.ambient_dim());
    if back != lsub.rows() {
        return Err(Error::NotSublattice("vectors outside the span".into()));
    }
    Ok(t)
}

/// Index `[L : Lsub] = |det T|`.
pub fn sublattice_index(l: &Basis, lsub: &Basis) -> Result<BigInt> {
    let t = sublattice_transform(l, lsub)?;
    Ok(linalg::int_det(&t).abs())
}

/// A coset of a sublattice, identified by its canonical residue.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    pub residue: Vec<i64>,
    pub sublattice_id: BasisId,
}

/// The quotient `L / Lsub` with canonical residues taken modulo the Hermite
/// normal form of the transform.
#[derive(Clone, Debug)]
pub struct Quotient {
    d: usize,
    hnf: Vec<Vec<i64>>,
    diag: Vec<i64>,
    index: u64,
    t: Vec<Vec<i64>>,
    inv_num: Vec<Vec<i64>>,
    inv_den: i64,
    sub_id: BasisId,
}

impl Quotient {
    pub fn new(l: &Basis, lsub: &Basis) -> Result<Self> {
        let t = sublattice_transform(l, lsub)?;
        Self::from_transform(&t, lsub.id())
    }

    /// The quotient `L / 2L` for a rank-`d` lattice.
    pub fn doubling(d: usize, sub_id: BasisId) -> Self {
        let two: IntMatrix = (0..d)
            .map(|i| (0..d).map(|j| BigInt::from(if i == j { 2 } else { 0 })).collect())
            .collect();
        Self::from_transform(&two, sub_id).expect("2·I is a valid transform")
    }

    fn from_transform(t: &IntMatrix, sub_id: BasisId) -> Result<Self> {
        let d = t.len();
        let overflow = || Error::InvalidArgument("transform entries exceed 64-bit range".into());
        let hnf_big = linalg::hermite_normal_form(t);
        if hnf_big.len() != d {
            return Err(Error::NotSublattice("transform is singular".into()));
        }
        let hnf = linalg::to_i64_matrix(&hnf_big).ok_or_else(overflow)?;
        let diag: Vec<i64> = (0..d).map(|i| hnf[i][i]).collect();
        let index_big = diag.iter().fold(BigInt::from(1), |acc, &x| acc * BigInt::from(x));
        let index = index_big.to_u64().ok_or(Error::IndexTooLarge { index: u128::MAX, limit: u64::MAX as u128 })?;
        // T⁻¹ = adj / det, stored with a common denominator.
        let inv = linalg::inverse(&linalg::to_rat_matrix(t)).expect("nonsingular");
        let den = linalg::common_denominator(inv.iter().flatten());
        let num: IntMatrix = inv
            .iter()
            .map(|r| r.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        Ok(Self {
            d,
            hnf,
            diag,
            index,
            t: linalg::to_i64_matrix(t).ok_or_else(overflow)?,
            inv_num: linalg::to_i64_matrix(&num).ok_or_else(overflow)?,
            inv_den: den.to_i64().ok_or_else(overflow)?,
            sub_id,
        })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    /// Canonical residue: entry `i` lies in `[0, h_ii)`.
    pub fn residue(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut c = coeffs.to_vec();
        for i in 0..self.d {
            let q = c[i].div_euclid(self.diag[i]);
            if q != 0 {
                for (x, h) in c.iter_mut().zip(&self.hnf[i]).skip(i) {
                    *x -= q * h;
                }
            }
        }
        c
    }

    pub fn label(&self, coeffs: &[i64]) -> CosetLabel {
        CosetLabel { residue: self.residue(coeffs), sublattice_id: self.sub_id }
    }

    /// Mixed-radix encoding of the residue as an integer in `[0, index)`.
    pub fn label_index(&self, coeffs: &[i64]) -> usize {
        let r = self.residue(coeffs);
        self.encode(&r)
    }

    pub fn encode(&self, residue: &[i64]) -> usize {
        let mut idx = 0usize;
        for i in (0..self.d).rev() {
            idx = idx * self.diag[i] as usize + residue[i] as usize;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<i64> {
        let mut r = vec![0; self.d];
        for i in 0..self.d {
            let m = self.diag[i] as usize;
            r[i] = (idx % m) as i64;
            idx /= m;
        }
        r
    }

    /// Every canonical residue, in encoding order.
    pub fn residues(&self) -> Vec<Vec<i64>> {
        (0..self.index as usize).map(|i| self.decode(i)).collect()
    }

    /// Coefficients in the sublattice basis of a point of the sublattice given
    /// in coefficients of `L`; `None` if the point is not in the sublattice.
    pub fn to_sub_coords(&self, coeffs: &[i64]) -> Option<Vec<i64>> {
        let mut out = vec![0i64; self.d];
        for (o, j) in out.iter_mut().zip(0..self.d) {
            let mut acc: i128 = 0;
            for (c, row) in coeffs.iter().zip(&self.inv_num) {
                acc += *c as i128 * row[j] as i128;
            }
            if acc % self.inv_den as i128 != 0 {
                return None;
            }
            *o = (acc / self.inv_den as i128) as i64;
        }
        Some(out)
    }

    /// Coefficients in `L` of a point given in sublattice coefficients.
    pub fn from_sub_coords(&self, z: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.d];
        for (zi, row) in z.iter().zip(&self.t) {
            if *zi == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += zi * x;
            }
        }
        out
    }
}

/// Canonical label of a point of `L` (given by coefficients) modulo `Lsub`.
pub fn coset_label(coeffs: &[i64], l: &Basis, lsub: &Basis) -> Result<CosetLabel> {
    Ok(Quotient::new(l, lsub)?.label(coeffs))
}

/// Maps coefficient vectors through an integer matrix: returns `z·T`.
pub fn apply_transform(z: &[i64], t: &IntMatrix) -> Vec<i64> {
    let cols = t.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); cols];
    for (zi, row) in z.iter().zip(t) {
        if *zi == 0 {
            continue;
        }
        let zi = BigInt::from(*zi);
        for (o, x) in out.iter_mut().zip(row) {
            *o += &zi * x;
        }
    }
    out.iter().map(|x| x.to_i64().expect("coefficient fits in 64 bits")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Basis {
        Basis::identity(2)
    }

    fn checkerboard() -> Basis {
        Basis::from_integer_rows(&[vec![1, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn transform_of_doubled_lattice() {
        let t = sublattice_transform(&z2(), &z2().scaled(&linalg::rat(2))).unwrap();
        assert_eq!(linalg::to_i64_matrix(&t).unwrap(), vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(sublattice_index(&z2(), &z2().scaled(&linalg::rat(2))).unwrap(), BigInt::from(4));
        let t = sublattice_transform(&z2(), &z2()).unwrap();
        assert_eq!(linalg::to_i64_matrix(&t).unwrap(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn checkerboard_has_index_two() {
        assert_eq!(sublattice_index(&z2(), &checkerboard()).unwrap(), BigInt::from(2));
    }

    #[test]
    fn non_sublattice_is_rejected() {
        let half = z2().scaled(&Rational::new(1.into(), 2.into()));
        assert!(matches!(sublattice_transform(&z2(), &half), Err(Error::NotSublattice(_))));
    }

    #[test]
    fn labels_mod_two() {
        let two = z2().scaled(&linalg::rat(2));
        assert_eq!(coset_label(&[3, 5], &z2(), &two).unwrap().residue, vec![1, 1]);
        assert_eq!(coset_label(&[4, 6], &z2(), &two).unwrap().residue, vec![0, 0]);
        let cb = checkerboard();
        assert_eq!(coset_label(&[1, 1], &z2(), &cb).unwrap(), coset_label(&[0, 0], &z2(), &cb).unwrap());
        assert_ne!(coset_label(&[1, 0], &z2(), &cb).unwrap(), coset_label(&[0, 0], &z2(), &cb).unwrap());
    }

    #[test]
    fn sub_coordinates_round_trip() {
        let q = Quotient::new(&z2(), &checkerboard()).unwrap();
        let z = q.to_sub_coords(&[3, 5]).unwrap();
        assert_eq!(q.from_sub_coords(&z), vec![3, 5]);
        assert!(q.to_sub_coords(&[1, 0]).is_none());
    }
}
