//! Lattice bases with exact rational coordinates.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num::{BigInt, One, Zero};

use super::linalg::{self, rat_to_f64, RatMatrix, Rational};
use crate::error::{Error, Result};

/// Fingerprint of a basis, used to tag batches and labels with their lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisId(pub u64);

/// An ordered list of linearly independent rational vectors in `Q^n`.
///
/// Rows are basis vectors. A rank-0 basis (no rows) stands for the zero lattice.
#[derive(Clone, Debug)]
pub struct Basis {
    rows: RatMatrix,
    n: usize,
    rows_f64: Vec<Vec<f64>>,
    id: BasisId,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl Eq for Basis {}

impl Basis {
    pub fn new(rows: RatMatrix, n: usize) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!("vector {} has {} coordinates, expected {n}", i + 1, r.len())));
        }
        if rows.len() > n {
            return Err(Error::DependentRows);
        }
        if linalg::rank(&rows) != rows.len() {
            return Err(Error::DependentRows);
        }
        Ok(Self::new_unchecked(rows, n))
    }

    pub(crate) fn new_unchecked(rows: RatMatrix, n: usize) -> Self {
        let rows_f64 = rows.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
        let mut h = DefaultHasher::new();
        n.hash(&mut h);
        for r in &rows {
            for x in r {
                x.numer().hash(&mut h);
                x.denom().hash(&mut h);
            }
        }
        let id = BasisId(h.finish());
        Self { rows, n, rows_f64, id }
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        Self::new(rows.iter().map(|r| r.iter().map(|&x| linalg::rat(x)).collect()).collect(), n)
    }

    /// The standard basis of `Z^n`.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self::new_unchecked(rows, n)
    }

    /// The zero lattice in `Q^n`.
    pub fn zero(n: usize) -> Self {
        Self::new_unchecked(Vec::new(), n)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rows_f64(&self) -> &[Vec<f64>] {
        &self.rows_f64
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn gram(&self) -> RatMatrix {
        linalg::gram(&self.rows)
    }

    /// Squared covolume `det(B·Bᵀ)`.
    pub fn det_sq(&self) -> Rational {
        linalg::det(&self.gram())
    }

    /// Exact ambient coordinates of the lattice point with the given coefficients.
    pub fn ambient(&self, coeffs: &[i64]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n];
        for (&c, row) in coeffs.iter().zip(&self.rows) {
            if c == 0 {
                continue;
            }
            let c = Rational::from_integer(BigInt::from(c));
            for (o, x) in out.iter_mut().zip(row) {
                *o += &c * x;
            }
        }
        out
    }

    pub fn ambient_f64(&self, coeffs: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (&c, row) in coeffs.iter().zip(&self.rows_f64) {
            if c == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += c as f64 * x;
            }
        }
        out
    }

    /// Squared norm of the lattice point, exactly.
    pub fn norm_sq(&self, coeffs: &[i64]) -> Rational {
        linalg::norm_sq(&self.ambient(coeffs))
    }

    /// All basis vectors multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(!factor.is_zero(), "scaling by zero");
        Self::new_unchecked(self.rows.iter().map(|r| r.iter().map(|x| x * factor).collect()).collect(), self.n)
    }

    /// Integer coefficients of `v` with respect to this basis, if `v` is a lattice point.
    pub fn coords_of(&self, v: &[Rational]) -> Option<Vec<BigInt>> {
        let d = self.rank();
        if v.len() != self.n {
            return None;
        }
        if d == 0 {
            return v.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        let inv = linalg::inverse(&self.gram())?;
        let bv: Vec<Rational> = self.rows.iter().map(|r| linalg::dot(r, v)).collect();
        let c = linalg::vec_mat(&bv, &inv, d);
        if !c.iter().all(|x| x.is_integer()) {
            return None;
        }
        let c: Vec<BigInt> = c.iter().map(|x| x.to_integer()).collect();
        let back: Vec<Rational> = linalg::vec_mat(
            &c.iter().map(|x| Rational::from_integer(x.clone())).collect::<Vec<_>>(),
            &self.rows,
            self.n,
        );
        (back == v).then_some(c)
    }

    /// Canonical form of the lattice: the denominator scale `D` and the Hermite
    /// normal form of the integer matrix `D·B`. Two bases generate the same
    /// lattice iff their canonical forms are equal.
    pub fn hermite_form(&self) -> (BigInt, linalg::IntMatrix) {
        let den = linalg::common_denominator(self.rows.iter().flatten());
        let scale = Rational::from_integer(den.clone());
        let ints: linalg::IntMatrix =
            self.rows.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
        (den, linalg::hermite_normal_form(&ints))
    }

    pub fn same_lattice(&self, other: &Basis) -> bool {
        self.n == other.n && self.rank() == other.rank() && self.hermite_form() == other.hermite_form()
    }

    /// Parses the basis file format: a header line `n d` followed by `d` lines of
    /// `n` rationals (`p` or `p/q`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let hnum = hline + 1;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse { line: hnum, msg: "header must be \"n d\"".into() });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse { line: hnum, msg: format!("bad dimension {s:?}") })
        };
        let n = parse_dim(dims[0])?;
        let d = parse_dim(dims[1])?;
        if d > n {
            return Err(Error::Parse { line: hnum, msg: format!("rank {d} exceeds dimension {n}") });
        }
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let (i, line) = lines
                .next()
                .ok_or(Error::Parse { line: text.lines().count() + 1, msg: format!("expected {d} basis vectors") })?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != n {
                return Err(Error::Parse { line: i + 1, msg: format!("expected {n} entries, found {}", toks.len()) });
            }
            let row = toks
                .iter()
                .map(|t| parse_rational(t).map_err(|msg| Error::Parse { line: i + 1, msg }))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if let Some((i, _)) = lines.next() {
            return Err(Error::Parse { line: i + 1, msg: "trailing content after basis vectors".into() });
        }
        for k in 1..=rows.len() {
            if linalg::rank(&rows[..k]) < k {
                let line = text
                    .lines()
                    .enumerate()
                    .filter(|(_, l)| !l.trim().is_empty())
                    .nth(k)
                    .map_or(k + 1, |(i, _)| i + 1);
                return Err(Error::Parse { line, msg: "dependent rows".into() });
            }
        }
        Ok(Self::new_unchecked(rows, n))
    }

    /// Serializes to the basis file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.rank());
        for r in &self.rows {
            let toks: Vec<String> = r.iter().map(format_rational).collect();
            s.push_str(&toks.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(tok: &str) -> std::result::Result<Rational, String> {
    let bad = || format!("malformed number {tok:?}");
    let (p, q) = match tok.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (tok, None),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = match q {
        Some(q) => q.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(format!("zero denominator in {tok:?}"));
    }
    Ok(Rational::new(p, q))
}

/// Parses a decimal such as `-0.25` or `3e-2`, or a fraction `p/q`, exactly.
pub fn parse_decimal(tok: &str) -> std::result::Result<Rational, String> {
    let tok = tok.trim();
    if tok.contains('/') {
        return parse_rational(tok);
    }
    let bad = || format!("malformed number {tok:?}");
    let (mant, exp) = match tok.find(['e', 'E']) {
        Some(i) => (&tok[..i], tok[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (tok, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut x = Rational::from_integer(digits);
    if shift >= 0 {
        x *= Rational::from_integer(num::pow(ten, shift as usize));
    } else {
        x /= Rational::from_integer(num::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -x } else { x })
}

pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
