//! Small dense linear algebra over exact rationals and integers.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type RatMatrix = Vec<Vec<Rational>>;
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Rational], m: &[Vec<Rational>], cols: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); cols];
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            if !x.is_zero() {
                *o += vi * x;
            }
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>], cols: usize) -> RatMatrix {
    a.iter().map(|row| vec_mat(row, b, cols)).collect()
}

pub fn transpose(a: &[Vec<Rational>], cols: usize) -> RatMatrix {
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Gram matrix `A·Aᵀ` of the rows of `a`.
pub fn gram(a: &[Vec<Rational>]) -> RatMatrix {
    let d = a.len();
    let mut g = vec![vec![Rational::zero(); d]; d];
    for i in 0..d {
        for j in 0..=i {
            let v = dot(&a[i], &a[j]);
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    g
}

/// Rank of a set of rational row vectors.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: RatMatrix = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a.to_vec();
    let mut inv: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        inv.swap(c, p);
        let piv = m[c][c].clone();
        for j in 0..n {
            m[c][j] = &m[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
                let t = &f * &inv[c][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Determinant of a square rational matrix.
pub fn det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m: RatMatrix = a.to_vec();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(c, p);
            acc = -acc;
        }
        acc *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    acc
}

pub fn int_det(a: &[Vec<BigInt>]) -> BigInt {
    let r: RatMatrix = a.iter().map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    det(&r).to_integer()
}

pub fn to_rat_matrix(a: &[Vec<BigInt>]) -> RatMatrix {
    a.iter().map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
}

/// Converts an integer-valued rational matrix, `None` if any entry is fractional.
pub fn to_int_matrix(a: &[Vec<Rational>]) -> Option<IntMatrix> {
    a.iter()
        .map(|row| row.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
        .collect()
}

pub fn to_i64_matrix(a: &[Vec<BigInt>]) -> Option<Vec<Vec<i64>>> {
    a.iter().map(|row| row.iter().map(|x| x.to_i64()).collect()).collect()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(entries: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut l = BigInt::one();
    for x in entries {
        l = l.lcm(x.denom());
    }
    l
}

/// Row-style Hermite normal form: the nonzero rows of the result generate the
/// same integer lattice as `rows`, are in echelon form with positive pivots, and
/// every entry above a pivot is reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut m: IntMatrix = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m.len() {
                if !m[i][c].is_zero() && best.is_none_or(|b| m[i][c].abs() < m[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let (head, tail) = m.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]).skip(c) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = m.split_at_mut(r);
            for (x, y) in head[i].iter_mut().zip(&tail[0]).skip(c) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Extended gcd: returns `(g, x, y)` with `a·x + b·y = g ≥ 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// A unimodular integer matrix whose first row is the primitive vector `c`.
pub fn complete_to_unimodular(c: &[BigInt]) -> Option<IntMatrix> {
    let m = c.len();
    // Column operations V with c·V = e1; only V⁻¹ is kept.
    let mut vinv: IntMatrix = identity(m);
    let mut w: Vec<BigInt> = c.to_vec();
    for j in (1..m).rev() {
        let (a, b) = (w[j - 1].clone(), w[j].clone());
        if b.is_zero() {
            continue;
        }
        let (g, x, y) = ext_gcd(&a, &b);
        let (ag, bg) = (&a / &g, &b / &g);
        // The step maps columns (j-1, j) by [[x, -bg], [y, ag]]; its inverse
        // [[ag, bg], [-y, x]] acts on the rows of V⁻¹. of [[x, -bg], [y, ag]] is [[ag, bg], [-y, x]] applied to rows.
        let (rp, rq) = (vinv[j - 1].clone(), vinv[j].clone());
        vinv[j - 1] = rp.iter().zip(&rq).map(|(p, q)| &ag * p + &bg * q).collect();
        vinv[j] = rp.iter().zip(&rq).map(|(p, q)| -&y * p + &x * q).collect();
        w[j - 1] = g;
        w[j] = BigInt::zero();
    }
    if w[0] == -BigInt::one() {
        vinv[0] = vinv[0].iter().map(|x| -x).collect();
    } else if !w[0].is_one() {
        return None;
    }
    Some(vinv)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); cols];
            for (x, brow) in row.iter().zip(b) {
                if x.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(brow) {
                    *o += x * y;
                }
            }
            out
        })
        .collect()
}

/// Rounds to the nearest integer, halves toward +∞.
pub fn round_half_up(x: &Rational) -> BigInt {
    (x + Rational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

pub fn rat_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for huge numerators/denominators.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}
