//! Goodness-of-fit tests used by the distributional checks.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::batch::LatticePoint;
use crate::lattice::Rational;
use crate::oracle::ExactSampler;
use crate::prob::ProbVector;

pub const DEFAULT_MIN_EXPECTED: f64 = 5.0;

/// A chi-squared test result; `p_value` is `None` when fewer than two buckets
/// remain after merging (inconclusive).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub buckets: usize,
    pub p_value: Option<f64>,
}

impl GofResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value.is_some_and(|p| p > alpha)
    }

    fn inconclusive(buckets: usize) -> Self {
        Self { statistic: 0.0, dof: 0, buckets, p_value: None }
    }
}

fn chi2_sf(x: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(x)
}

/// Chi-squared goodness of fit of `observed` against probabilities `expected`.
/// Categories with expected count below `min_expected` go to a tail bucket,
/// which joins the smallest other bucket if it is still too small.
pub fn chi_squared_counts(observed: &[u64], expected: &[f64], min_expected: f64) -> GofResult {
    assert_eq!(observed.len(), expected.len(), "observed and expected lengths differ");
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return GofResult::inconclusive(0);
    }
    let psum: f64 = expected.iter().sum();
    let mut buckets: Vec<(f64, f64)> = Vec::new();
    let (mut tail_o, mut tail_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = total as f64 * p / psum;
        if e < min_expected {
            tail_o += o as f64;
            tail_e += e;
        } else {
            buckets.push((o as f64, e));
        }
    }
    if tail_e > 0.0 || tail_o > 0.0 {
        if tail_e >= min_expected || buckets.is_empty() {
            buckets.push((tail_o, tail_e));
        } else {
            let k = (0..buckets.len()).min_by(|&a, &b| buckets[a].1.total_cmp(&buckets[b].1)).expect("nonempty");
            buckets[k].0 += tail_o;
            buckets[k].1 += tail_e;
        }
    }
    if buckets.len() < 2 {
        return GofResult::inconclusive(buckets.len());
    }
    let statistic: f64 = buckets.iter().map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 }).sum();
    let dof = buckets.len() - 1;
    GofResult { statistic, dof, buckets: buckets.len(), p_value: Some(chi2_sf(statistic, dof)) }
}

pub fn chi_squared_gof(observed: &[u64], expected: &ProbVector, min_expected: f64) -> GofResult {
    chi_squared_counts(observed, &expected.probs, min_expected)
}

/// Chi-squared test of independence on a contingency table.
pub fn chi_squared_independence(table: &[Vec<u64>], min_expected: f64) -> GofResult {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let ncols = table.first().map_or(0, |r| r.len());
    let cols: Vec<f64> = (0..ncols).map(|j| table.iter().map(|r| r[j] as f64).sum()).collect();
    let total: f64 = rows.iter().sum();
    let keep_r: Vec<usize> = (0..rows.len()).filter(|&i| rows[i] > 0.0).collect();
    let keep_c: Vec<usize> = (0..ncols).filter(|&j| cols[j] > 0.0).collect();
    if keep_r.len() < 2 || keep_c.len() < 2 {
        return GofResult::inconclusive(keep_r.len().min(keep_c.len()));
    }
    let mut stat = 0.0;
    let mut cells = 0;
    for &i in &keep_r {
        for &j in &keep_c {
            let e = rows[i] * cols[j] / total;
            if e >= min_expected {
                cells += 1;
            }
            let o = table[i][j] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    if cells < 2 {
        return GofResult::inconclusive(cells);
    }
    let dof = (keep_r.len() - 1) * (keep_c.len() - 1);
    GofResult { statistic: stat, dof, buckets: keep_r.len() * keep_c.len(), p_value: Some(chi2_sf(stat, dof)) }
}

/// Chi-squared test of homogeneity between two count vectors over the same categories.
pub fn chi_squared_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> GofResult {
    let table: Vec<Vec<u64>> = vec![a.to_vec(), b.to_vec()];
    let ta: u64 = a.iter().sum();
    let tb: u64 = b.iter().sum();
    let total = (ta + tb) as f64;
    // Merge sparse categories before forming the table.
    let mut merged = vec![Vec::new(), Vec::new()];
    let (mut ra, mut rb) = (0u64, 0u64);
    for j in 0..a.len() {
        let col = (table[0][j] + table[1][j]) as f64;
        if col * (ta.min(tb) as f64) / total < min_expected {
            ra += a[j];
            rb += b[j];
        } else {
            merged[0].push(a[j]);
            merged[1].push(b[j]);
        }
    }
    if ra + rb > 0 {
        merged[0].push(ra);
        merged[1].push(rb);
    }
    chi_squared_independence(&merged, 0.0)
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut acc = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        acc += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * acc).clamp(0.0, 1.0)
}

/// Kolmogorov–Smirnov result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample test with the asymptotic distribution.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsResult { statistic: d, p_value: kolmogorov_sf(lambda) }
}

/// One-sample test against the uniform distribution on `[0, 1]`.
pub fn ks_uniform(sample: &[f64]) -> KsResult {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n))
        .fold(0.0f64, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    KsResult { statistic: d, p_value: kolmogorov_sf(lambda) }
}

/// Chi-squared test of points (coefficients over the sampler's basis) against
/// the exact distribution, one category per support point plus one for points
/// outside the truncated support.
pub fn gof_points(points: &[LatticePoint], exact: &ExactSampler, min_expected: f64) -> GofResult {
    let mut index: HashMap<&[i64], usize> = HashMap::new();
    let mut probs = Vec::with_capacity(exact.support_len() + 1);
    for (c, p) in exact.support() {
        index.insert(c, probs.len());
        probs.push(p);
    }
    let outside = probs.len();
    probs.push(exact.tv_error());
    let mut counts = vec![0u64; probs.len()];
    for p in points {
        counts[index.get(p.coeffs.as_slice()).copied().unwrap_or(outside)] += 1;
    }
    chi_squared_counts(&counts, &probs, min_expected)
}

/// As [`gof_points`], with one category per norm shell.
pub fn gof_shells(points: &[LatticePoint], exact: &ExactSampler, min_expected: f64) -> GofResult {
    let b = exact.basis();
    let mut shells: BTreeMap<Rational, f64> = BTreeMap::new();
    for (c, p) in exact.support() {
        *shells.entry(b.norm_sq(c)).or_insert(0.0) += p;
    }
    let keys: Vec<Rational> = shells.keys().cloned().collect();
    let mut probs: Vec<f64> = shells.values().copied().collect();
    let outside = probs.len();
    probs.push(exact.tv_error());
    let mut counts = vec![0u64; probs.len()];
    for p in points {
        let k = keys.binary_search(&b.norm_sq(&p.coeffs)).unwrap_or(outside);
        counts[k] += 1;
    }
    chi_squared_counts(&counts, &probs, min_expected)
}
