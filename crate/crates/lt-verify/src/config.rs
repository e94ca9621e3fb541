//! Run configuration: a TOML matrix of `(p, d, pi)` entries with shared defaults,
//! and command-line overrides.

use std::path::Path;

use clap::ValueEnum;
use lt_core::padic::{is_prime, MAX_PRIME};
use lt_core::PrimeConfig;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Coleman,
    Equations,
    Anomaly,
    Exp,
    Lattice,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Core, Suite::Coleman, Suite::Equations, Suite::Anomaly, Suite::Exp, Suite::Lattice];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Coleman => "coleman",
            Suite::Equations => "equations",
            Suite::Anomaly => "anomaly",
            Suite::Exp => "exp",
            Suite::Lattice => "lattice",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeSpec {
    pub pi_e: i64,
    pub k: u32,
    pub j: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PiMode {
    Explicit(i64),
    Hecke(HeckeSpec),
}

/// Settings shared by every entry unless the entry sets its own.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub precision: Option<u32>,
    pub series_degree: Option<usize>,
    pub ks: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suites: Option<Vec<Suite>>,
    pub sweep: Option<usize>,
    pub poly_trials: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub p: u32,
    pub d: usize,
    pub pi: Option<i64>,
    pub hecke: Option<HeckeSpec>,
    pub precision: Option<u32>,
    pub series_degree: Option<usize>,
    pub ks: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suites: Option<Vec<Suite>>,
    pub sweep: Option<usize>,
    pub poly_trials: Option<usize>,
}

impl Entry {
    fn synthesized(p: u32, d: usize) -> Self {
        Entry {
            p,
            d,
            pi: Some(fallback_pi(p)),
            hecke: None,
            precision: None,
            series_degree: None,
            ks: None,
            seed: None,
            samples: None,
            suites: None,
            sweep: None,
            poly_trials: None,
        }
    }

    fn own(&self) -> Defaults {
        Defaults {
            precision: self.precision,
            series_degree: self.series_degree,
            ks: self.ks.clone(),
            seed: self.seed,
            samples: self.samples,
            suites: self.suites.clone(),
            sweep: self.sweep,
            poly_trials: self.poly_trials,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default, rename = "run")]
    pub runs: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub d: usize,
    pub pi: PiMode,
    pub m: u32,
    pub deg: usize,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<Suite>,
    pub sweep: usize,
    pub poly_trials: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub prime: Option<u32>,
    pub degree_d: Option<usize>,
    pub precision: Option<u32>,
    pub series_degree: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suites: Option<Vec<Suite>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid entry (p = {p}, d = {d}): {msg}")]
    Invalid { p: u32, d: usize, msg: String },
    #[error("no entry matches the requested prime and degree")]
    Empty,
}

pub const DEFAULT_CONFIG: &str = include_str!("../default.toml");

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("the shipped config parses")
    }
}

fn pick<T: Clone>(ov: &Option<T>, own: &Option<T>, shared: &Option<T>, fallback: T) -> T {
    ov.clone().or_else(|| own.clone()).or_else(|| shared.clone()).unwrap_or(fallback)
}

/// `p + p^2`, used when an override names a prime absent from the matrix.
fn fallback_pi(p: u32) -> i64 {
    p as i64 * (p as i64 + 1)
}

/// Applies overrides and validates.  `--prime` and `--degree-d` select matching
/// entries; when none match, a single entry is synthesized with `pi = p + p^2`.
pub fn resolve(file: &FileConfig, ov: &Overrides) -> Result<Vec<RunConfig>, ConfigError> {
    let mut entries: Vec<Entry> = file
        .runs
        .iter()
        .filter(|e| ov.prime.is_none_or(|p| p == e.p) && ov.degree_d.is_none_or(|d| d == e.d))
        .cloned()
        .collect();
    if entries.is_empty() {
        match ov.prime {
            Some(p) => entries.push(Entry::synthesized(p, ov.degree_d.unwrap_or(1))),
            None => return Err(ConfigError::Empty),
        }
    }
    let sh = &file.defaults;
    entries
        .iter()
        .map(|e| {
            let own = &e.own();
            let pi = match (e.pi, e.hecke) {
                (Some(x), None) => PiMode::Explicit(x),
                (None, Some(h)) => PiMode::Hecke(h),
                _ => return Err(invalid(e, "exactly one of pi and hecke is required")),
            };
            let cfg = RunConfig {
                p: e.p,
                d: e.d,
                pi,
                m: pick(&ov.precision, &own.precision, &sh.precision, 10),
                deg: pick(&ov.series_degree, &own.series_degree, &sh.series_degree, 48),
                ks: pick(&None, &own.ks, &sh.ks, (1..=6).collect()),
                seed: pick(&ov.seed, &own.seed, &sh.seed, 1),
                samples: pick(&ov.samples, &own.samples, &sh.samples, 32),
                suites: pick(&ov.suites, &own.suites, &sh.suites, Suite::ALL.to_vec()),
                sweep: pick(&None, &own.sweep, &sh.sweep, 200),
                poly_trials: pick(&None, &own.poly_trials, &sh.poly_trials, 500),
            };
            validate(&cfg).map_err(|m| invalid(e, m))?;
            Ok(cfg)
        })
        .collect()
}

fn invalid(e: &Entry, msg: &str) -> ConfigError {
    ConfigError::Invalid { p: e.p, d: e.d, msg: msg.to_string() }
}

fn validate(c: &RunConfig) -> Result<(), &'static str> {
    if c.p < 3 || c.p > MAX_PRIME || !is_prime(c.p) {
        return Err("p must be an odd prime below 128");
    }
    if c.d == 0 || (c.p as usize - 1) % c.d != 0 {
        return Err("d must divide p - 1");
    }
    if let Err(e) = PrimeConfig::new(c.p, c.m, c.deg) {
        return Err(match e {
            lt_core::Error::Hypothesis(m) => m,
            _ => "invalid precision parameters",
        });
    }
    if c.ks.is_empty() || c.ks.iter().any(|&k| k == 0 || k > 12) {
        return Err("ks must be a nonempty list in 1..=12");
    }
    if c.samples == 0 {
        return Err("samples must be positive");
    }
    if c.suites.is_empty() {
        return Err("no suites selected");
    }
    let p = c.p as i64;
    let v1 = |x: i64| x != 0 && x % p == 0 && (x / p) % p != 0;
    match c.pi {
        PiMode::Explicit(x) if !v1(x) => return Err("pi must have valuation one"),
        PiMode::Hecke(h) if !v1(h.pi_e) => return Err("pi_E must have valuation one"),
        PiMode::Hecke(h) if h.k == 0 || h.k % c.p == 0 => return Err("hecke mode requires p not dividing k"),
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_matrix() {
        let runs = resolve(&FileConfig::builtin(), &Overrides::default()).unwrap();
        let pd: Vec<(u32, usize)> = runs.iter().map(|r| (r.p, r.d)).collect();
        assert_eq!(pd, vec![(5, 1), (5, 4), (7, 1), (7, 6)]);
        assert!(runs.iter().all(|r| r.m == 10 && r.deg == 48 && r.samples == 32));
    }

    #[test]
    fn overrides_select_and_synthesize() {
        let f = FileConfig::builtin();
        let ov = Overrides { prime: Some(5), degree_d: Some(4), samples: Some(3), ..Default::default() };
        let r = resolve(&f, &ov).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].pi, PiMode::Explicit(35));
        assert_eq!(r[0].samples, 3);
        let ov = Overrides { prime: Some(11), degree_d: Some(5), ..Default::default() };
        assert_eq!(resolve(&f, &ov).unwrap()[0].pi, PiMode::Explicit(132));
    }

    #[test]
    fn rejects_bad_entries() {
        let f = FileConfig::parse("[[run]]\np = 5\nd = 3\npi = 10\n").unwrap();
        assert!(matches!(resolve(&f, &Overrides::default()), Err(ConfigError::Invalid { .. })));
        let f = FileConfig::parse("[[run]]\np = 5\nd = 1\npi = 25\n").unwrap();
        assert!(resolve(&f, &Overrides::default()).is_err());
        let f = FileConfig::parse("[[run]]\np = 5\nd = 1\nhecke = { pi_e = 35, k = 5, j = 1 }\n").unwrap();
        assert!(resolve(&f, &Overrides::default()).is_err());
        assert!(FileConfig::parse("[[run]]\np = 5\nd = 1\npi = 10\nbogus = 1\n").is_err());
    }
}
