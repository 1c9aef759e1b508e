//! Verification harness: run configuration, seeded streams, random instances,
//! statistical tests and the invariant suites behind `latdgs verify`.

pub mod stats;
mod suites;

pub use suites::{check_names, run_suite, Suite};

use std::io::Write;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::lattice::Basis;
use crate::profile::Constants;

/// Settings shared by every check of a run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub consts: Constants,
    pub alpha: f64,
    pub identity_tol: f64,
    pub max_exact_rank: usize,
    pub trials: usize,
    pub dims: RangeInclusive<usize>,
}

impl RunConfig {
    pub fn new(seed: u64, consts: Constants) -> Self {
        Self { seed, consts, alpha: 0.01, identity_tol: 1e-9, max_exact_rank: 10, trials: 10, dims: 1..=3 }
    }
}

/// Deterministic stream for check number `index` of a run seeded with `seed`.
pub fn derived_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derived_seed(seed, index))
}

/// Integer basis with entries uniform in `[−bound, bound]`, redrawn until independent.
pub fn random_integer_basis<R: Rng + ?Sized>(n: usize, bound: i64, rng: &mut R) -> Basis {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-bound..=bound)).collect()).collect();
        if let Ok(b) = Basis::from_integer_rows(&rows) {
            return b;
        }
    }
}

/// Random unimodular matrix as a product of elementary row operations.
pub fn random_unimodular<R: Rng + ?Sized>(n: usize, steps: usize, rng: &mut R) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return u;
    }
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let k = rng.random_range(-2..=2i64);
        for c in 0..n {
            u[i][c] += k * u[j][c];
        }
    }
    u
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Flag,
}

/// One check's outcome.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub flag: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn new(suite: &str, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Flag => summary.flag += 1,
            }
        }
        Self { suite: suite.to_string(), checks, summary }
    }

    pub fn ok(&self) -> bool {
        self.summary.fail == 0
    }

    /// One line per check, then a summary line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for c in &self.checks {
            serde_json::to_writer(&mut w, &serde_json::json!({ "suite": self.suite, "check": c }))?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut w, &serde_json::json!({ "suite": self.suite, "summary": self.summary }))?;
        writeln!(w)
    }
}
