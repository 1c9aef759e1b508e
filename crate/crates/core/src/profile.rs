//! Constants profiles. Every unnamed universal constant used by the samplers
//! resolves here; `docs/constants.md` tabulates both profiles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Environment variable naming the default profile.
pub const PROFILE_ENV: &str = "LATDGS_PROFILE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Paper,
    Desk,
}

impl FromStr for ProfileName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Self::Paper),
            "desk" => Ok(Self::Desk),
            other => Err(format!("unknown profile '{other}' (expected paper or desk)")),
        }
    }
}

impl fmt::Display for ProfileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Desk => "desk",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub profile: ProfileName,
    /// Klein sampler width requirement `s ≥ ‖B̃‖·√(c_gpv·ln n)`.
    pub c_gpv: f64,
    /// start_gauss prefix rule `‖b̃_i‖ ≤ s/√(c_start·ln n)`.
    pub c_start: f64,
    /// Ratio bound fed to the size test of the sublattice combiner.
    pub sqrt_t: f64,
    /// Ratio bound for the ratio check and the square-root sampler.
    pub sqrt_t_prime: f64,
    /// Default confidence parameter of general_dgs.
    pub general_kappa: f64,
    /// Default confidence parameter of smooth_dgs.
    pub smooth_kappa: f64,
    /// Largest input size the paper-profile pipelines will attempt.
    pub max_input: f64,
}

impl Constants {
    pub fn paper() -> Self {
        Self {
            profile: ProfileName::Paper,
            c_gpv: 4.0,
            c_start: 4.0,
            sqrt_t: 49.0,
            sqrt_t_prime: 196.0,
            general_kappa: 30.0,
            smooth_kappa: 30.0,
            max_input: 1e8,
        }
    }

    pub fn desk() -> Self {
        Self {
            profile: ProfileName::Desk,
            c_gpv: 1.0,
            c_start: 1.0,
            sqrt_t: 1.0,
            sqrt_t_prime: 4.0,
            general_kappa: 30.0,
            smooth_kappa: 2.0,
            max_input: f64::INFINITY,
        }
    }

    pub fn named(p: ProfileName) -> Self {
        match p {
            ProfileName::Paper => Self::paper(),
            ProfileName::Desk => Self::desk(),
        }
    }

    /// Profile from [`PROFILE_ENV`], defaulting to desk.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(PROFILE_ENV) {
            Ok(v) => Ok(Self::named(v.parse()?)),
            Err(_) => Ok(Self::desk()),
        }
    }

    pub fn is_paper(&self) -> bool {
        self.profile == ProfileName::Paper
    }

    /// `ln(max(n, 2))`.
    pub fn log_n(n: usize) -> f64 {
        (n.max(2) as f64).ln()
    }

    /// Constant in the sublattice combiner's quota `m = M/(c_sqrt·κ⁴)`.
    pub fn c_sqrt(&self) -> f64 {
        1024.0 * self.sqrt_t.sqrt() * self.sqrt_t_prime.powf(1.5)
    }

    /// Tower index exponent for rank `n ≥ 2`; always in `[⌈n/2⌉, n−1]`.
    pub fn tower_a(&self, n: usize) -> usize {
        let half = n.div_ceil(2);
        let raw = match self.profile {
            ProfileName::Paper => (n as f64 / 2.0 + n as f64 / Self::log_n(n)).ceil() as usize,
            ProfileName::Desk => half + 1,
        };
        raw.clamp(half, n.saturating_sub(1).max(half))
    }

    /// Tower height for smooth_dgs.
    pub fn tower_ell(&self, n: usize) -> usize {
        match self.profile {
            ProfileName::Paper => Self::log_n(n).log2().powi(4).ceil().max(1.0) as usize,
            ProfileName::Desk => 1,
        }
    }

    /// Number of halving steps of general_dgs under the paper profile.
    pub fn general_ell(&self, kappa: f64, n: usize) -> usize {
        let ln = (n.max(2) as f64).log2();
        4 * (kappa.log2() + ln * ln).ceil() as usize
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::desk()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_exponent_stays_in_range() {
        for n in 2..12 {
            for c in [Constants::paper(), Constants::desk()] {
                let a = c.tower_a(n);
                assert!(2 * a >= n && a < n, "n = {n}, a = {a}");
            }
        }
        assert_eq!(Constants::desk().tower_a(2), 1);
        assert_eq!(Constants::desk().tower_a(4), 3);
    }

    #[test]
    fn sqrt_constant() {
        let c = Constants::paper();
        assert!((c.c_sqrt() - 1024.0 * 7.0 * 196f64.powf(1.5)).abs() < 1e-6);
    }

    #[test]
    fn parse_names() {
        assert_eq!("desk".parse::<ProfileName>().unwrap(), ProfileName::Desk);
        assert!("fast".parse::<ProfileName>().is_err());
    }
}
