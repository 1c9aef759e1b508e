mod combiners;
mod identities;
mod reductions;
mod resamplers;
mod samplers;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha20Rng;

use super::{derived_seed, stream_rng, CheckRecord, RunConfig, Status, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Samplers,
    Resamplers,
    Combiners,
    Reductions,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "identities" => Suite::Identities,
            "samplers" => Suite::Samplers,
            "resamplers" => Suite::Resamplers,
            "combiners" => Suite::Combiners,
            "reductions" => Suite::Reductions,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite `{s}`")),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Identities => "identities",
            Suite::Samplers => "samplers",
            Suite::Resamplers => "resamplers",
            Suite::Combiners => "combiners",
            Suite::Reductions => "reductions",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

/// What a single check measured.
pub(crate) struct Outcome {
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Outcome {
    /// Passes when `bad` does not exceed `allowed`.
    pub fn count(bad: usize, allowed: usize, detail: impl Into<String>) -> Self {
        Self {
            status: if bad <= allowed { Status::Pass } else { Status::Fail },
            measured: bad as f64,
            threshold: allowed as f64,
            detail: detail.into(),
        }
    }

    /// Passes when the success fraction reaches `min_rate`.
    pub fn rate(good: usize, total: usize, min_rate: f64, detail: impl Into<String>) -> Self {
        let r = if total == 0 { 1.0 } else { good as f64 / total as f64 };
        Self {
            status: if r >= min_rate { Status::Pass } else { Status::Fail },
            measured: r,
            threshold: min_rate,
            detail: detail.into(),
        }
    }

    /// Passes when `p > alpha`; `None` is inconclusive and flagged.
    pub fn p_value(p: Option<f64>, alpha: f64, detail: impl Into<String>) -> Self {
        let (status, measured) = match p {
            Some(p) if p > alpha => (Status::Pass, p),
            Some(p) => (Status::Fail, p),
            None => (Status::Flag, f64::NAN),
        };
        Self { status, measured, threshold: alpha, detail: detail.into() }
    }
}

type CheckFn = fn(&RunConfig, &mut ChaCha20Rng) -> Outcome;

const REGISTRY: &[(Suite, &str, CheckFn)] = &[
    (Suite::Identities, "lattice.unimodularity", identities::unimodularity),
    (Suite::Identities, "lattice.duality_involution", identities::duality_involution),
    (Suite::Identities, "lattice.coset_partition", identities::coset_partition),
    (Suite::Identities, "lattice.tower_invariants", identities::tower_invariants),
    (Suite::Identities, "lattice.superlattice_equidistribution", identities::superlattice_equidistribution),
    (Suite::Identities, "oracle.square_identity", identities::square_identity),
    (Suite::Identities, "oracle.banaszczyk_growth", identities::banaszczyk_growth),
    (Suite::Identities, "oracle.tail_bound", identities::tail_bound),
    (Suite::Identities, "oracle.smoothing_ratio", identities::smoothing_ratio),
    (Suite::Identities, "oracle.double_smoothing", identities::double_smoothing),
    (Suite::Identities, "oracle.lambda_eta_duality", identities::lambda_eta_duality),
    (Suite::Identities, "oracle.brute_force_lambda1", identities::brute_force_lambda1),
    (Suite::Samplers, "samplers.exactness_at_base", samplers::exactness_at_base),
    (Suite::Samplers, "samplers.basis_independence", samplers::basis_independence),
    (Suite::Samplers, "samplers.start_gauss_short_vectors", samplers::start_gauss_short_vectors),
    (Suite::Resamplers, "resamplers.square_sqrt_inversion", resamplers::square_sqrt_inversion),
    (Suite::Resamplers, "resamplers.square_output_size", resamplers::square_output_size),
    (Suite::Resamplers, "resamplers.sqrt_coin_unlimited", resamplers::sqrt_coin_unlimited),
    (Suite::Resamplers, "resamplers.conservation", resamplers::conservation),
    (Suite::Resamplers, "resamplers.structured_failures", resamplers::structured_failures),
    (Suite::Combiners, "combiners.rotation_identity", combiners::rotation_identity),
    (Suite::Combiners, "combiners.exact_conditional_law", combiners::exact_conditional_law),
    (Suite::Combiners, "combiners.honesty", combiners::honesty),
    (Suite::Combiners, "combiners.determinism", combiners::determinism),
    (Suite::Combiners, "combiners.all_or_quota", combiners::all_or_quota),
    (Suite::Reductions, "reductions.svp_correctness", reductions::svp_correctness),
    (Suite::Reductions, "reductions.covariance_separation", reductions::covariance_separation),
    (Suite::Reductions, "reductions.cvp_bound", reductions::cvp_bound),
    (Suite::Reductions, "reductions.embedding_sanity", reductions::embedding_sanity),
    (Suite::Reductions, "reductions.grid_coverage", reductions::grid_coverage),
];

/// Names of the checks a suite runs, in registry order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    REGISTRY.iter().filter(|(s, _, _)| suite == Suite::All || *s == suite).map(|(_, n, _)| *n).collect()
}

/// Runs a suite; `trials = 0` gives an empty report.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> VerifyReport {
    let mut records = Vec::new();
    if cfg.trials > 0 {
        for (i, (s, name, f)) in REGISTRY.iter().enumerate() {
            if suite != Suite::All && *s != suite {
                continue;
            }
            let mut rng = stream_rng(cfg.seed, i as u64);
            let o = f(cfg, &mut rng);
            records.push(CheckRecord {
                name: name.to_string(),
                status: o.status,
                measured: o.measured,
                threshold: o.threshold,
                seed: derived_seed(cfg.seed, i as u64),
                detail: o.detail,
            });
        }
    }
    VerifyReport::new(&suite.to_string(), records)
}

/// Ranks from the configured range, clipped to `[lo, hi]`.
pub(crate) fn ranks(cfg: &RunConfig, lo: usize, hi: usize) -> Vec<usize> {
    let v: Vec<usize> = cfg.dims.clone().filter(|&d| d >= lo && d <= hi).collect();
    if v.is_empty() {
        vec![(*cfg.dims.start()).clamp(lo, hi)]
    } else {
        v
    }
}
