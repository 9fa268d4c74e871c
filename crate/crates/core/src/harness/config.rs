//! Experiment configuration.
//!
//! Files are flat `key = value` text; `#` starts a comment. Recognized keys:
//!
//! | key         | value                                        | default        |
//! |-------------|----------------------------------------------|----------------|
//! | `algorithm` | comma list of `opl`, `ocl`, `cga`, `metropolis` | required    |
//! | `sizes`     | comma list of problem sizes, each `>= 2`     | required       |
//! | `runs`      | runs per cell                                | `20`           |
//! | `seed`      | master seed (u64)                            | `0`            |
//! | `budget`    | evaluation budget per run                    | `10000000000`  |
//! | `lambda`    | integer or `paper`                           | `paper`        |
//! | `mu`        | integer `>= 2` or `paper`                    | `paper`        |
//! | `alpha`     | positive real (Metropolis)                   | `1`            |
//! | `out`       | output path for the records CSV              | none           |
//!
//! Later assignments win, which is how command-line flags override a file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::algorithms::{Algorithm, AlgorithmId, DEFAULT_BUDGET};
use crate::error::Error;

const LN_ESCAPE_BASE: f64 = 0.458_675_145_387_081_7; // ln(e / (e - 1))

/// `⌈log_{e/(e-1)} n⌉`, the offspring population size used for both EAs.
pub fn lambda_rule(n: usize) -> usize {
    assert!(n >= 2, "lambda_rule needs n >= 2");
    ceil_with_tolerance((n as f64).ln() / LN_ESCAPE_BASE)
}

/// `2⌈√n · ln n / 4⌉`, the (even) cGA population size.
pub fn mu_rule(n: usize) -> usize {
    assert!(n >= 2, "mu_rule needs n >= 2");
    let n = n as f64;
    2 * ceil_with_tolerance(0.25 * n.sqrt() * n.ln())
}

/// Ceiling that does not round an integral value up because of a trailing
/// floating-point error.
fn ceil_with_tolerance(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// An explicit parameter value or the default rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParamRule {
    #[default]
    Rule,
    Fixed(usize),
}

impl ParamRule {
    pub fn resolve(self, n: usize, rule: fn(usize) -> usize) -> usize {
        match self {
            ParamRule::Rule => rule(n),
            ParamRule::Fixed(v) => v,
        }
    }
}

impl FromStr for ParamRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "paper" {
            return Ok(ParamRule::Rule);
        }
        s.parse()
            .map(ParamRule::Fixed)
            .map_err(|_| Error::Config(format!("expected an integer or `paper`, got {s:?}")))
    }
}

impl fmt::Display for ParamRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamRule::Rule => f.write_str("paper"),
            ParamRule::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgorithmId>,
    pub sizes: Vec<usize>,
    pub lambda: ParamRule,
    pub mu: ParamRule,
    pub alpha: f64,
    pub runs: usize,
    pub seed: u64,
    pub budget: u64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A config with defaults for everything but algorithms and sizes.
    pub fn new(algorithms: Vec<AlgorithmId>, sizes: Vec<usize>) -> Self {
        Self {
            algorithms,
            sizes,
            lambda: ParamRule::Rule,
            mu: ParamRule::Rule,
            alpha: 1.0,
            runs: 20,
            seed: 0,
            budget: DEFAULT_BUDGET,
            out: None,
        }
    }

    /// Builds a config from `(key, value)` assignments; later ones win.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut config = Self::new(Vec::new(), Vec::new());
        for (key, value) in pairs {
            config.set(key.as_ref(), value.as_ref())?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Parses file contents into `(key, value)` assignments.
    pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, Error> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::from_pairs(Self::parse_pairs(text)?)
    }

    pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_pairs(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let bad = |what: &str| Error::Config(format!("{key}: invalid {what} {value:?}"));
        match key {
            "algorithm" | "algo" => {
                self.algorithms = split_list(value)
                    .map(|s| s.parse().map_err(|_| bad("algorithm")))
                    .collect::<Result<_, _>>()?;
            }
            "sizes" | "n" => {
                self.sizes = split_list(value)
                    .map(|s| s.parse().map_err(|_| bad("size")))
                    .collect::<Result<_, _>>()?;
            }
            "runs" => self.runs = value.parse().map_err(|_| bad("run count"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "budget" => self.budget = parse_count(value).ok_or_else(|| bad("budget"))?,
            "lambda" => self.lambda = value.parse()?,
            "mu" => self.mu = value.parse()?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("alpha"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm given".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("no problem sizes given".into()));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("problem size {n} is below 2")));
        }
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.lambda == ParamRule::Fixed(0) {
            return Err(Error::Config("lambda must be at least 1".into()));
        }
        if matches!(self.mu, ParamRule::Fixed(m) if m < 2) {
            return Err(Error::Config("mu must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// The algorithm (with resolved parameter) for one cell.
    pub fn algorithm_for(&self, id: AlgorithmId, n: usize) -> Algorithm {
        match id {
            AlgorithmId::Opl => Algorithm::PlusLambda {
                lambda: self.lambda.resolve(n, lambda_rule),
            },
            AlgorithmId::Ocl => Algorithm::CommaLambda {
                lambda: self.lambda.resolve(n, lambda_rule),
            },
            AlgorithmId::Cga => Algorithm::Cga {
                mu: self.mu.resolve(n, mu_rule),
            },
            AlgorithmId::Metropolis => Algorithm::Metropolis { alpha: self.alpha },
        }
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Accepts plain integers and `1e8`-style powers of ten.
fn parse_count(value: &str) -> Option<u64> {
    if let Ok(v) = value.parse() {
        return Some(v);
    }
    let (mantissa, exp) = value.split_once(['e', 'E'])?;
    let mantissa: u64 = mantissa.parse().ok()?;
    let exp: u32 = exp.parse().ok()?;
    mantissa.checked_mul(10u64.checked_pow(exp)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_rule_values() {
        assert_eq!(lambda_rule(500), 14);
        assert_eq!(lambda_rule(100), 11);
        assert_eq!(lambda_rule(50), 9);
        assert_eq!(lambda_rule(30), 8);
        assert_eq!(lambda_rule(80), 10);
        assert_eq!(lambda_rule(130), 11);
        assert_eq!(lambda_rule(2), 2);
    }

    #[test]
    fn lambda_rule_integral_ratio_is_not_rounded_up() {
        assert_eq!(ceil_with_tolerance(3.0 + 1e-13), 3);
        assert_eq!(ceil_with_tolerance(3.0 - 1e-13), 3);
        assert_eq!(ceil_with_tolerance(3.01), 4);
    }

    #[test]
    fn mu_rule_values() {
        assert_eq!(mu_rule(500), 70);
        assert_eq!(mu_rule(1000), 110);
        assert_eq!(mu_rule(50), 14);
        assert_eq!(mu_rule(100), 24);
        assert_eq!(mu_rule(200), 38);
    }

    #[test]
    fn rules_are_monotone_and_mu_even() {
        let mut last = (0, 0);
        for n in 2..5000 {
            let (l, m) = (lambda_rule(n), mu_rule(n));
            assert!(l >= last.0 && m >= last.1, "n = {n}");
            assert_eq!(m % 2, 0);
            last = (l, m);
        }
    }

    #[test]
    fn parse_file() {
        let text = "\
# Fig. 1 style preset
algorithm = ocl, cga
sizes = 100,200
runs = 5
seed = 42
budget = 1e8
lambda = paper
mu = 30
out = records.csv
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.algorithms, vec![AlgorithmId::Ocl, AlgorithmId::Cga]);
        assert_eq!(c.sizes, vec![100, 200]);
        assert_eq!((c.runs, c.seed, c.budget), (5, 42, 100_000_000));
        assert_eq!(c.lambda, ParamRule::Rule);
        assert_eq!(c.mu, ParamRule::Fixed(30));
        assert_eq!(c.out, Some(PathBuf::from("records.csv")));
        assert_eq!(
            c.algorithm_for(AlgorithmId::Ocl, 100),
            Algorithm::CommaLambda { lambda: 11 }
        );
        assert_eq!(
            c.algorithm_for(AlgorithmId::Cga, 100),
            Algorithm::Cga { mu: 30 }
        );
    }

    #[test]
    fn later_assignments_override() {
        let mut pairs =
            ExperimentConfig::parse_pairs("algorithm = opl\nsizes = 10\nruns = 3").unwrap();
        pairs.push(("runs".into(), "7".into()));
        assert_eq!(ExperimentConfig::from_pairs(pairs).unwrap().runs, 7);
    }

    #[test]
    fn invalid_configs_rejected() {
        for text in [
            "sizes = 10",
            "algorithm = opl",
            "algorithm = opl\nsizes = 1",
            "algorithm = opl\nsizes = 10\nruns = 0",
            "algorithm = opl\nsizes = 10\nbudget = 0",
            "algorithm = cga\nsizes = 10\nmu = 1",
            "algorithm = opl\nsizes = 10\nlambda = 0",
            "algorithm = metropolis\nsizes = 10\nalpha = -1",
            "algorithm = ea\nsizes = 10",
            "algorithm = opl\nsizes = 10\ncolour = red",
            "algorithm opl",
        ] {
            assert!(
                matches!(ExperimentConfig::parse(text), Err(Error::Config(_))),
                "{text:?}"
            );
        }
    }
}
