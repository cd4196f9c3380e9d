//! Run configurations in `key = value` form and report emission.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::{self, ExperimentReport, Format};
use crate::verify::DEFAULT_SEED;
use crate::weights::RadialWeight;

/// The experiments a configuration can name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Classify,
    LpSweep,
    MonomialCurve,
    MeansCheck,
    SumaCheck,
    NormEquiv,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Classify,
        Experiment::LpSweep,
        Experiment::MonomialCurve,
        Experiment::MeansCheck,
        Experiment::SumaCheck,
        Experiment::NormEquiv,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Classify => "classify",
            Experiment::LpSweep => "lp-sweep",
            Experiment::MonomialCurve => "monomial-curve",
            Experiment::MeansCheck => "means-check",
            Experiment::SumaCheck => "suma-check",
            Experiment::NormEquiv => "norm-equiv",
        }
    }

    /// One-line description for `--list-experiments`.
    pub fn about(self) -> &'static str {
        match self {
            Experiment::Classify => "doubling-class curves and verdicts for omega",
            Experiment::LpSweep => "lp_ratio over the default family (omega, mu, p)",
            Experiment::MonomialCurve => "reverse-inequality ratios R_n for n <= n_max",
            Experiment::MeansCheck => "integral-means quantity over r < rho, with a 2x refined grid",
            Experiment::SumaCheck => "lacunary moment sum against 1/hat(mu)^gamma on r = 1 - 2^-i",
            Experiment::NormEquiv => "Bergman norm against block norm at degree and twice the degree",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s.trim())
            .ok_or_else(|| Error::config(None, Some("experiment"), format!("unknown experiment `{}`", s.trim())))
    }
}

/// A validated experiment definition.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub omega: Option<RadialWeight>,
    pub mu: Option<RadialWeight>,
    pub eta: Option<RadialWeight>,
    pub p: f64,
    pub k: usize,
    pub gamma: f64,
    pub n_max: usize,
    /// Largest monomial exponent in the default family.
    pub monomial_max: usize,
    /// Base degree for `norm-equiv`.
    pub degree: usize,
    /// Subdivisions per dyadic step of the integral-means grids.
    pub refine: usize,
    /// Depth of the dyadic r-grid; the experiment default when unset.
    pub r_depth: Option<usize>,
    pub seed: u64,
    /// Run even when a weight is classified out of the required class.
    pub force: bool,
    pub out: Option<PathBuf>,
    /// The text the configuration was parsed from, hashed into `.meta`.
    pub source: String,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            omega: None,
            mu: None,
            eta: None,
            p: 2.0,
            k: 2,
            gamma: 1.0,
            n_max: 10_000,
            monomial_max: 1 << 11,
            degree: 512,
            refine: 1,
            r_depth: None,
            seed: DEFAULT_SEED,
            force: false,
            out: None,
            source: format!("experiment = {experiment}\n"),
        }
    }

    /// Applies one `key = value` setting; `line` is used for error locations.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        let err = |msg: String| Error::config(line, Some(key), msg);
        fn num<T: FromStr>(v: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("cannot parse `{v}`: {e}"))
        }
        let weight = |v: &str| {
            v.parse::<RadialWeight>().map_err(|e| match e {
                Error::Config { message, .. } => err(message),
                other => err(other.to_string()),
            })
        };
        match key {
            "experiment" => self.experiment = value.parse().map_err(|_| err(format!("unknown experiment `{value}`")))?,
            "omega" => self.omega = Some(weight(value)?),
            "mu" => self.mu = Some(weight(value)?),
            "eta" => self.eta = Some(weight(value)?),
            "p" => {
                let p: f64 = num(value).map_err(err)?;
                if !(p > 0.0 && p.is_finite()) {
                    return Err(err(format!("p must be > 0, got {p}")));
                }
                self.p = p;
            }
            "k" => {
                let k: usize = num(value).map_err(err)?;
                if k < 2 {
                    return Err(err(format!("k must be >= 2, got {k}")));
                }
                self.k = k;
            }
            "gamma" => {
                let g: f64 = num(value).map_err(err)?;
                if !(g > 0.0 && g.is_finite()) {
                    return Err(err(format!("gamma must be > 0, got {g}")));
                }
                self.gamma = g;
            }
            "n_max" => {
                let n: usize = num(value).map_err(err)?;
                if n < 8 {
                    return Err(err(format!("n_max must be >= 8, got {n}")));
                }
                self.n_max = n;
            }
            "monomial_max" => {
                let n: usize = num(value).map_err(err)?;
                if !(2..=1 << 20).contains(&n) {
                    return Err(err(format!("monomial_max must lie in 2..=2^20, got {n}")));
                }
                self.monomial_max = n;
            }
            "degree" => {
                let d: usize = num(value).map_err(err)?;
                if !(1..=1 << 20).contains(&d) {
                    return Err(err(format!("degree must lie in 1..=2^20, got {d}")));
                }
                self.degree = d;
            }
            "refine" => {
                let m: usize = num(value).map_err(err)?;
                if !(1..=8).contains(&m) {
                    return Err(err(format!("refine must lie in 1..=8, got {m}")));
                }
                self.refine = m;
            }
            "depth" => {
                let d: usize = num(value).map_err(err)?;
                if !(1..=50).contains(&d) {
                    return Err(err(format!("depth must lie in 1..=50, got {d}")));
                }
                self.r_depth = Some(d);
            }
            "seed" => self.seed = num(value).map_err(err)?,
            "force" => self.force = num(value).map_err(err)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::config(line, Some(other), format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment and `experiment` is
/// required.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: Option<RunConfig> = None;
    let mut pending = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(Some(i + 1), None, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "experiment" {
            let e: Experiment = value
                .parse()
                .map_err(|_| Error::config(Some(i + 1), Some(key), format!("unknown experiment `{value}`")))?;
            cfg = Some(RunConfig::new(e));
        } else {
            pending.push((i + 1, key, value));
        }
    }
    let mut cfg = cfg.ok_or_else(|| Error::config(None, Some("experiment"), "missing `experiment`"))?;
    for (line, key, value) in pending {
        cfg.set(key, value, Some(line))?;
    }
    cfg.source = text.to_owned();
    Ok(cfg)
}

/// Writes the report in the format implied by the extension, with a `.meta`
/// sibling recording the configuration hash and seed.
pub fn emit(report: &ExperimentReport, path: &Path, cfg: &RunConfig) -> Result<()> {
    report::emit(report, Format::from_path(path), path, &cfg.source, cfg.seed)
}
