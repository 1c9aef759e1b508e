//! Lattice towers and random superlattices of index `2^a`.

use num::{BigInt, One, Zero};
use rand::Rng;

use super::basis::Basis;
use super::gso::dual_basis;
use super::linalg::{self, IntMatrix, Rational};
use super::sublattice::{sublattice_index, sublattice_transform};
use crate::error::{Error, Result};

/// Nested lattices `L_0 ⊃ L_1 ⊃ … ⊃ L_ℓ`, each of index `2^a` in the previous one.
#[derive(Clone, Debug)]
pub struct Tower {
    pub levels: Vec<Basis>,
    pub a: usize,
    pub ell: usize,
}

impl Tower {
    pub fn top(&self) -> &Basis {
        &self.levels[self.ell]
    }

    pub fn bottom(&self) -> &Basis {
        &self.levels[0]
    }

    /// Checks `2·L_{i−1} ⊆ L_i ⊂ L_{i−1}` with index `2^a`, and `L_i/2 ⊆ L_{i−2}`.
    pub fn check(&self) -> Result<()> {
        let two = linalg::rat(2);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let want = BigInt::one() << self.a;
        for i in 1..=self.ell {
            let (prev, cur) = (&self.levels[i - 1], &self.levels[i]);
            sublattice_transform(cur, &prev.scaled(&two))
                .map_err(|e| Error::Precondition(format!("2·L_{} ⊄ L_{i}: {e}", i - 1)))?;
            let idx = sublattice_index(prev, cur)
                .map_err(|e| Error::Precondition(format!("L_{i} ⊄ L_{}: {e}", i - 1)))?;
            if idx != want {
                return Err(Error::Precondition(format!("[L_{} : L_{i}] = {idx}, expected {want}", i - 1)));
            }
            if i >= 2 {
                sublattice_transform(&self.levels[i - 2], &cur.scaled(&half))
                    .map_err(|e| Error::Precondition(format!("L_{i}/2 ⊄ L_{}: {e}", i - 2)))?;
            }
        }
        Ok(())
    }
}

/// Builds the tower with `L_ℓ = L` and `L_{ℓ−1} = Lprev` by halving `a` basis
/// vectors per step in cyclic order.
pub fn make_tower(l: &Basis, lprev: &Basis, a: usize, ell: usize) -> Result<Tower> {
    let d = l.rank();
    if ell == 0 {
        return Err(Error::Precondition("tower needs ℓ ≥ 1".into()));
    }
    if 2 * a < d || a > d || a == 0 {
        return Err(Error::Precondition(format!("a = {a} outside [n/2, n] for n = {d}")));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    // Lprev = P·(L/2) with P integer.
    let p = sublattice_transform(&l.scaled(&half), lprev)
        .map_err(|e| Error::Precondition(format!("Lprev ⊄ L/2: {e}")))?;
    let idx = sublattice_index(lprev, l).map_err(|e| Error::Precondition(format!("L ⊄ Lprev: {e}")))?;
    if idx != BigInt::one() << a {
        return Err(Error::Precondition(format!("[Lprev : L] = {idx}, expected 2^{a}")));
    }
    let (w, pivots) = rref_mod2(&p.iter().map(|r| r.iter().map(|x| x.bit(0) as u8).collect()).collect::<Vec<_>>());
    if w.len() != a {
        return Err(Error::Precondition(format!("Lprev/L has 2-rank {}, expected {a}", w.len())));
    }
    let mut u: IntMatrix = w.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for j in (0..d).filter(|j| !pivots.contains(j)) {
        u.push((0..d).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }).collect());
    }
    let b = linalg::mat_mul(&linalg::to_rat_matrix(&u), l.rows(), l.ambient_dim());
    let mut exps = vec![0u32; d];
    let mut levels = vec![Basis::new_unchecked(b.clone(), l.ambient_dim())];
    let mut next = 0usize;
    for _ in 0..ell {
        for _ in 0..a {
            exps[next] += 1;
            next = (next + 1) % d;
        }
        let rows = b
            .iter()
            .zip(&exps)
            .map(|(r, &e)| {
                let f = Rational::new(BigInt::one(), BigInt::one() << e);
                r.iter().map(|x| x * &f).collect()
            })
            .collect();
        levels.push(Basis::new_unchecked(rows, l.ambient_dim()));
    }
    levels.reverse();
    Ok(Tower { levels, a, ell })
}

/// Row-reduced echelon form over F₂; returns the nonzero rows and pivot columns.
fn rref_mod2(rows: &[Vec<u8>]) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] == 1 {
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// A uniformly random superlattice `L ⊂ L' ⊆ L/2` of index `2^a`, obtained by
/// choosing a random `(n−a)`-dimensional subspace `V` of `F₂^n` and taking
/// `L'` as the dual of `2·L* + V·B*`.
pub fn random_superlattice<R: Rng + ?Sized>(l: &Basis, a: usize, rng: &mut R) -> Result<Basis> {
    let d = l.rank();
    if 2 * a < d || a >= d {
        return Err(Error::Precondition(format!("a = {a} outside [n/2, n) for n = {d}")));
    }
    let k = d - a;
    let v = loop {
        let cand: Vec<Vec<u8>> = (0..k).map(|_| (0..d).map(|_| rng.random_range(0..2u8)).collect()).collect();
        if rref_mod2(&cand).0.len() == k {
            break cand;
        }
    };
    let mut gens: IntMatrix = (0..d)
        .map(|i| (0..d).map(|j| BigInt::from(if i == j { 2 } else { 0 })).collect())
        .collect();
    gens.extend(v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()));
    let g = linalg::hermite_normal_form(&gens);
    let ginv = linalg::inverse(&linalg::to_rat_matrix(&g)).expect("full-rank generators");
    let ginv_t = linalg::transpose(&ginv, d);
    // Dual of G·B* is G⁻ᵀ·B.
    let rows = linalg::mat_mul(&ginv_t, l.rows(), l.ambient_dim());
    let out = Basis::new_unchecked(rows, l.ambient_dim());
    debug_assert!(dual_basis(&out).rank() == d);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn two_level_tower_on_z2() {
        let l = Basis::identity(2);
        let lprev = Basis::new(vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 1)]], 2).unwrap();
        let t = make_tower(&l, &lprev, 1, 2).unwrap();
        let expect = Basis::new(vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 2)]], 2).unwrap();
        assert!(t.bottom().same_lattice(&expect));
        assert!(t.levels[1].same_lattice(&lprev));
        assert!(t.top().same_lattice(&l));
        t.check().unwrap();
    }

    #[test]
    fn single_step_tower_is_the_pair() {
        let l = Basis::identity(2);
        let lprev = Basis::new(vec![vec![r(1, 2), r(1, 2)], vec![r(0, 1), r(1, 1)]], 2).unwrap();
        let t = make_tower(&l, &lprev, 1, 1).unwrap();
        assert_eq!(t.levels.len(), 2);
        assert!(t.bottom().same_lattice(&lprev));
        assert!(t.top().same_lattice(&l));
    }

    #[test]
    fn out_of_range_a_is_rejected() {
        let l = Basis::identity(4);
        let lprev = l.scaled(&r(1, 2));
        assert!(matches!(make_tower(&l, &lprev, 1, 1), Err(Error::Precondition(_))));
        assert!(matches!(make_tower(&l, &lprev, 5, 1), Err(Error::Precondition(_))));
        // a = n is allowed: Lprev = L/2.
        make_tower(&l, &lprev, 4, 3).unwrap().check().unwrap();
    }

    #[test]
    fn superlattice_index_and_containment() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let l = Basis::from_integer_rows(&[vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 2]]).unwrap();
        for a in [2usize] {
            for _ in 0..20 {
                let sup = random_superlattice(&l, a, &mut rng).unwrap();
                assert_eq!(sublattice_index(&sup, &l).unwrap(), BigInt::one() << a);
                sublattice_transform(&l.scaled(&r(1, 2)), &sup).unwrap();
            }
        }
        assert!(random_superlattice(&l, 3, &mut rng).is_err());
        assert!(random_superlattice(&l, 1, &mut rng).is_err());
    }
}
