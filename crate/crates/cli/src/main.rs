use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use lattice_dgs::combine::{general_dgs, smooth_dgs, SmoothConfig};
use lattice_dgs::harness::{run_suite, RunConfig, Suite};
use lattice_dgs::lattice::basis::{format_rational, parse_decimal};
use lattice_dgs::lattice::{Basis, Rational};
use lattice_dgs::oracle::ExactSampler;
use lattice_dgs::profile::{Constants, ProfileName};
use lattice_dgs::reductions::{
    approx_cvp, decide_gapsvp, solve_svp, DgsProvider, ExactProvider, GeneralProvider, SmoothProvider,
};
use lattice_dgs::sampling::KleinSampler;
use lattice_dgs::{Error, SampleBatch};

#[derive(Parser)]
#[command(name = "latdgs", version, about = "Discrete Gaussian sampling over lattices")]
struct Cli {
    /// Constants profile; defaults to $LATDGS_PROFILE, then desk.
    #[arg(long, global = true)]
    profile: Option<ProfileName>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Gpv,
    General,
    Smooth,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Exact,
    General,
    Smooth,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from a discrete Gaussian.
    Sample {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        param: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        kappa: Option<f64>,
        /// Start-up batch size for the general and smooth methods.
        #[arg(long)]
        input_size: Option<usize>,
    },
    /// Shortest nonzero vector via the sampling oracle.
    Svp {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: Oracle,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples requested per grid width.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        input_size: Option<usize>,
    },
    /// Decide whether λ₁ < d (yes) or λ₁ is much larger (no).
    Gapsvp {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        dist: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: Oracle,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        input_size: Option<usize>,
    },
    /// Approximate closest lattice vector to a target.
    Cvp {
        #[arg(long)]
        basis: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: Oracle,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        input_size: Option<usize>,
    },
    /// Run an invariant suite and print its report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Ranks to draw instances from, e.g. `1..3` or `2`.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        dims: RangeInclusive<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("malformed range {s:?} (expected A..B or A)");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Exit status 2 with a message.
struct Invalid(String);

impl From<Error> for Invalid {
    fn from(e: Error) -> Self {
        Invalid(e.to_string())
    }
}

impl From<io::Error> for Invalid {
    fn from(e: io::Error) -> Self {
        Invalid(e.to_string())
    }
}

fn load_basis(path: &Path) -> Result<Basis, Invalid> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    Basis::parse(&text).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

fn check_positive(name: &str, x: f64) -> Result<(), Invalid> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Invalid(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn provider(oracle: Oracle, kappa: Option<f64>, input_size: Option<usize>, consts: Constants) -> Box<dyn DgsProvider> {
    match oracle {
        Oracle::Exact => Box::new(ExactProvider::new()),
        Oracle::General => Box::new(GeneralProvider {
            kappa: kappa.unwrap_or(consts.general_kappa),
            input_size: input_size.unwrap_or(100_000),
            consts,
        }),
        Oracle::Smooth => Box::new(SmoothProvider {
            cfg: SmoothConfig { kappa: kappa.unwrap_or(consts.smooth_kappa), input_size },
            consts,
        }),
    }
}

fn write_record(out: &mut impl Write, v: &serde_json::Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn run(cli: Cli) -> Result<u8, Invalid> {
    let consts = match cli.profile {
        Some(p) => Constants::named(p),
        None => Constants::from_env().map_err(Invalid)?,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Sample { basis, param, count, method, seed, kappa, input_size } => {
            check_positive("param", param)?;
            let b = load_basis(&basis)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let batch: SampleBatch = match method {
                Method::Exact => ExactSampler::new(&b, param)?.sample_batch(count, &mut rng),
                Method::Gpv => KleinSampler::new(&b, param, &consts)?.sample_batch(count, &mut rng),
                Method::General => {
                    let k = kappa.unwrap_or(consts.general_kappa);
                    let size = input_size.unwrap_or(100_000.max(200 * count));
                    let mut batch = general_dgs(&b, param, k, size, &consts, &mut rng)?.batch;
                    batch.points.truncate(count);
                    batch
                }
                Method::Smooth => {
                    let cfg = SmoothConfig { kappa: kappa.unwrap_or(consts.smooth_kappa), input_size };
                    smooth_dgs(&b, param, count, &cfg, &consts, &mut rng)?.batch
                }
            };
            for p in &batch.points {
                write_record(&mut out, &json!({ "coeffs": p.coeffs, "ambient": b.ambient_f64(&p.coeffs) }))?;
            }
            write_record(
                &mut out,
                &json!({ "summary": {
                    "requested": count,
                    "produced": batch.len(),
                    "param": batch.param,
                    "claimed_tv_error": batch.claimed_tv_error,
                    "profile": consts.profile,
                }}),
            )?;
            u8::from(batch.len() < count)
        }
        Command::Svp { basis, oracle, seed, samples, kappa, input_size } => {
            let b = load_basis(&basis)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut o = provider(oracle, kappa, input_size, consts);
            let res = solve_svp(&b, o.as_mut(), samples, &mut rng)?;
            match (&res.point, &res.norm_sq) {
                (Some(p), Some(nsq)) => {
                    write_record(
                        &mut out,
                        &json!({
                            "coeffs": p.coeffs,
                            "ambient": rationals(&p.ambient(&b)),
                            "norm": res.norm,
                            "norm_sq": format_rational(nsq),
                            "params_tried": res.params_tried,
                        }),
                    )?;
                    0
                }
                _ => {
                    write_record(&mut out, &json!({ "failure": "no nonzero vector returned", "params_tried": res.params_tried }))?;
                    1
                }
            }
        }
        Command::Gapsvp { basis, dist, eps, oracle, seed, samples, kappa, input_size } => {
            check_positive("dist", dist)?;
            let b = load_basis(&basis)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut o = provider(oracle, kappa, input_size, consts);
            let d = decide_gapsvp(&b, dist, eps, o.as_mut(), samples, &mut rng)?;
            write_record(
                &mut out,
                &json!({
                    "answer": if d.yes { "yes" } else { "no" },
                    "statistic": d.statistic,
                    "threshold": d.threshold,
                    "s": d.s,
                }),
            )?;
            0
        }
        Command::Cvp { basis, target, oracle, seed, samples, kappa, input_size } => {
            let b = load_basis(&basis)?;
            let t = target
                .split(',')
                .map(|x| parse_decimal(x).map_err(|e| Invalid(format!("--target: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut o = provider(oracle, kappa, input_size, consts);
            let res = approx_cvp(&b, &t, o.as_mut(), samples, &mut rng)?;
            match &res.point {
                Some(p) => {
                    write_record(
                        &mut out,
                        &json!({
                            "coeffs": p.coeffs,
                            "ambient": rationals(&p.ambient(&b)),
                            "distance": res.distance,
                            "params_tried": res.params_tried,
                        }),
                    )?;
                    0
                }
                None => {
                    write_record(&mut out, &json!({ "failure": "no candidate returned", "params_tried": res.params_tried }))?;
                    1
                }
            }
        }
        Command::Verify { suite, dims, trials, seed, out: path } => {
            let mut cfg = RunConfig::new(seed, consts);
            cfg.dims = dims;
            cfg.trials = trials;
            let report = run_suite(suite, &cfg);
            match path {
                Some(p) => {
                    let f = std::fs::File::create(&p).map_err(|e| Invalid(format!("{}: {e}", p.display())))?;
                    report.write_jsonl(BufWriter::new(f))?;
                }
                None => report.write_jsonl(&mut out)?,
            }
            u8::from(!report.ok())
        }
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
