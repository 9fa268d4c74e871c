//! Self-checks over the operators, steppers and oracle.
//!
//! Every check is seeded, so a report is reproducible. `Fast` keeps the
//! whole suite to seconds; `Full` uses larger samples and adds Monte Carlo
//! cross-checks of the simulators against the exact chains at `n = 3`.

use std::fmt;
use std::str::FromStr;

use crate::algorithms::{
    acceptance_probability, run, Algorithm, AlgorithmId, CgaState, CommaLambdaEa, CompactGa,
    PairState, PlusLambdaEa, StopPolicy,
};
use crate::bits::BitString;
use crate::error::Error;
use crate::mutation::mutate;
use crate::oracle::{
    absorption_probabilities, best_of_lambda_kernel, build_chain, expected_hitting_time,
    mutation_kernel, uniform_start, ChainAlgorithm, StateIndex,
};
use crate::problem::{is_global_optimum, onemax01n};
use crate::random::RandomStream;
use crate::stagnation::{classify_bits, detect_event_i_bits, detect_event_ii_bits, OutcomeClass};

use super::config::{mu_rule, ExperimentConfig};
use super::experiment::{run_experiment_with, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl FromStr for VerifyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            other => Err(Error::Config(format!(
                "unknown verify level `{other}`, expected fast or full"
            ))),
        }
    }
}

/// Deliberately broken components, for testing that the suite notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Run the cGA without clamping frequencies to `[1/n, 1 - 1/n]`.
    pub missing_clamp: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        )
    }
}

pub fn verify(level: VerifyLevel) -> VerifyReport {
    verify_with(level, Faults::default())
}

pub fn verify_with(level: VerifyLevel, faults: Faults) -> VerifyReport {
    let scale = match level {
        VerifyLevel::Fast => 1,
        VerifyLevel::Full => 10,
    };
    let mut checks = vec![
        fitness_exhaustive(),
        stagnation_partition(),
        mutation_flip_rate(10_000 * scale),
        opl_absorption(1_000 * scale),
        elitist_monotonicity(),
        ocl_escape_probability(20_000 * scale),
        metropolis_acceptance(),
    ];
    checks.extend(cga_invariants(10_000 * scale, faults));
    checks.push(oracle_row_stochastic());
    checks.push(determinism());
    if level == VerifyLevel::Full {
        checks.push(oracle_opl_absorption(100_000));
        checks.push(oracle_ocl_hitting_time(1_000_000));
    }
    VerifyReport { level, checks }
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail: detail.into(),
    }
}

fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << n).map(move |i| BitString::from_index(i, n).unwrap())
}

fn fitness_exhaustive() -> CheckResult {
    let mut bad = Vec::new();
    for n in 1..=10 {
        let mut optima = 0;
        for curr in all_strings(n) {
            for prev_first in [false, true] {
                let ones = (0..n).filter(|&i| curr.get(i)).count() as i64;
                let expected = ones - if prev_first { n as i64 } else { 0 };
                if onemax01n(prev_first, &curr) != expected {
                    bad.push(format!("n={n} prev1={} curr={curr}", u8::from(prev_first)));
                }
                optima += usize::from(is_global_optimum(prev_first, &curr));
            }
        }
        if optima != 1 {
            bad.push(format!("n={n} has {optima} optima"));
        }
    }
    check(
        "fitness-exhaustive",
        bad.is_empty(),
        if bad.is_empty() {
            "all (prev1, curr) for n <= 10 agree, one optimum each".to_string()
        } else {
            format!("{} mismatches, first {}", bad.len(), bad[0])
        },
    )
}

fn stagnation_partition() -> CheckResult {
    let mut bad = None;
    'outer: for n in 1..=10 {
        for curr in all_strings(n) {
            for prev_first in [false, true] {
                let flags = [
                    is_global_optimum(prev_first, &curr),
                    detect_event_i_bits(prev_first, &curr),
                    detect_event_ii_bits(prev_first, &curr),
                ];
                let expected = match flags {
                    [true, false, false] => OutcomeClass::Optimum,
                    [false, true, false] => OutcomeClass::EventI,
                    [false, false, true] => OutcomeClass::EventII,
                    [false, false, false] => OutcomeClass::Running,
                    _ => {
                        bad = Some(format!("overlapping classes at n={n} curr={curr}"));
                        break 'outer;
                    }
                };
                if classify_bits(prev_first, &curr) != expected {
                    bad = Some(format!("classify disagrees at n={n} curr={curr}"));
                    break 'outer;
                }
            }
        }
    }
    check(
        "stagnation-partition",
        bad.is_none(),
        bad.unwrap_or_else(|| "optimum, event1, event2, running partition n <= 10".into()),
    )
}

fn mutation_flip_rate(samples: usize) -> CheckResult {
    let mut rng = RandomStream::new(0x6d75_7461);
    let mut worst = 0.0f64;
    for n in [10usize, 100] {
        let parent = BitString::zeros(n).unwrap();
        let mut flips = vec![0usize; n];
        for _ in 0..samples {
            let child = mutate(&parent, &mut rng);
            for (i, count) in flips.iter_mut().enumerate() {
                *count += usize::from(child.get(i));
            }
        }
        let p = 1.0 / n as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        for &c in &flips {
            worst = worst.max((c as f64 / samples as f64 - p).abs() / se);
        }
    }
    check(
        "mutation-flip-rate",
        worst <= 4.0,
        format!("largest per-position deviation {worst:.2} SE over {samples} mutations (limit 4)"),
    )
}

fn opl_absorption(generations: usize) -> CheckResult {
    let mut rng = RandomStream::new(0x6162_736f);
    let mut bad = None;
    for n in [5usize, 20] {
        let mut event1_curr = BitString::ones(n).unwrap();
        event1_curr.set(n - 1, false);
        let states = [
            (BitString::zeros(n).unwrap(), event1_curr),
            (BitString::ones(n).unwrap(), BitString::ones(n).unwrap()),
        ];
        for (prev, curr) in states {
            let mut ea = PlusLambdaEa::new(n, 3).unwrap();
            let mut state = PairState::new(prev.clone(), curr.clone()).unwrap();
            for _ in 0..generations {
                ea.step(&mut state, &mut rng);
                if state.prev != prev || state.curr != curr {
                    bad = Some(format!(
                        "n={n} pair ({prev}, {curr}) moved to ({}, {})",
                        state.prev, state.curr
                    ));
                    break;
                }
            }
        }
    }
    check(
        "opl-absorption",
        bad.is_none(),
        bad.unwrap_or_else(|| {
            format!("event pairs unchanged for {generations} generations, n in {{5, 20}}")
        }),
    )
}

fn elitist_monotonicity() -> CheckResult {
    let mut rng = RandomStream::new(0x6d6f_6e6f);
    let mut bad = None;
    for _ in 0..20 {
        let mut state = PairState::random(20, &mut rng).unwrap();
        let mut ea = PlusLambdaEa::new(20, 4).unwrap();
        for _ in 0..2_000 {
            let before = state.fitness();
            ea.step(&mut state, &mut rng);
            if state.fitness() < before {
                bad = Some(format!("fitness fell from {before} to {}", state.fitness()));
            }
        }
    }
    check(
        "elitist-monotonicity",
        bad.is_none(),
        bad.unwrap_or_else(|| {
            "f(prev1, curr) never decreases over 20 runs of 2000 generations".into()
        }),
    )
}

fn ocl_escape_probability(generations: usize) -> CheckResult {
    let mut rng = RandomStream::new(0x6573_6370);
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (n, lambda) in [(10usize, 3usize), (20, 5)] {
        let ones = BitString::ones(n).unwrap();
        let start = PairState::new(ones.clone(), ones.clone()).unwrap();
        let mut ea = CommaLambdaEa::new(n, lambda).unwrap();
        let mut changed = 0usize;
        for _ in 0..generations {
            let mut state = start.clone();
            ea.step(&mut state, &mut rng);
            changed += usize::from(state.curr != ones);
        }
        let exact = (1.0 - (1.0 - 1.0 / n as f64).powi(n as i32)).powi(lambda as i32);
        let observed = changed as f64 / generations as f64;
        let se = (exact * (1.0 - exact) / generations as f64).sqrt();
        let z = (observed - exact).abs() / se;
        worst = worst.max(z);
        detail.push(format!("(n={n}, λ={lambda}) {observed:.5} vs {exact:.5}"));
    }
    check(
        "ocl-escape-probability",
        worst <= 4.0,
        format!("{}; largest deviation {worst:.2} SE", detail.join(", ")),
    )
}

fn metropolis_acceptance() -> CheckResult {
    let ok = (0..=30).all(|d| acceptance_probability(1.0, d) == 1.0)
        && (1..=30).all(|d| {
            let p = acceptance_probability(1.0, -d);
            (p - (-(d as f64)).exp()).abs() <= 1e-15
        });
    check(
        "metropolis-acceptance",
        ok,
        "accept with probability 1 for Δ >= 0 and e^{αΔ} otherwise",
    )
}

/// Range and step-size invariants of the cGA model.
fn cga_invariants(steps: usize, faults: Faults) -> Vec<CheckResult> {
    let n = 50;
    let mu = mu_rule(n);
    let mut rng = RandomStream::new(0x6367_6121);
    let mut ga = CompactGa::new();
    if faults.missing_clamp {
        ga = ga.inject_missing_clamp();
    }
    let mut state = CgaState::initial(n, mu, &mut rng).unwrap();
    let (lower, upper) = state.freq.bounds_units();
    let step = state.freq.step_units();
    let mut out_of_range = None;
    let mut bad_delta = None;
    for g in 0..steps {
        let before = state.freq.numerators().to_vec();
        ga.step(&mut state, &mut rng);
        if bad_delta.is_none() {
            if let Some(i) = (0..n).find(|&i| {
                let d = ga.last_proposal()[i] - before[i];
                d != 0 && d.abs() != step
            }) {
                bad_delta = Some(format!("step {g}, position {i}"));
            }
        }
        if out_of_range.is_none() {
            if let Some(i) = state
                .freq
                .numerators()
                .iter()
                .position(|&p| p < lower || p > upper)
            {
                out_of_range = Some(format!(
                    "step {g}: marginal {i} = {} outside [1/{n}, 1 - 1/{n}]",
                    state.freq.marginal(i)
                ));
            }
        }
    }
    vec![
        check(
            "cga-frequency-range",
            out_of_range.is_none(),
            out_of_range.unwrap_or_else(|| {
                format!("marginals stay in [1/{n}, 1 - 1/{n}] over {steps} steps (μ={mu})")
            }),
        ),
        check(
            "cga-marginal-drift",
            bad_delta.is_none(),
            bad_delta
                .map(|s| format!("unclamped delta not in {{0, ±1/μ}} at {s}"))
                .unwrap_or_else(|| format!("unclamped deltas in {{0, ±1/{mu}}}")),
        ),
    ]
}

fn oracle_row_stochastic() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for x in all_strings(n) {
            let kernel = best_of_lambda_kernel(&x, 1).unwrap();
            for (y, &q) in all_strings(n).zip(&kernel) {
                worst = worst.max((q - mutation_kernel(&x, &y)).abs());
            }
        }
        for algorithm in [ChainAlgorithm::Opl, ChainAlgorithm::Ocl] {
            for lambda in 1..=2 {
                let chain = build_chain(algorithm, n, lambda).unwrap();
                for s in 0..chain.states() {
                    let total: f64 = chain.row(StateIndex(s)).iter().sum();
                    worst = worst.max((total - 1.0).abs());
                }
            }
        }
    }
    check(
        "oracle-row-stochastic",
        worst <= 1e-12,
        format!("row sums and λ=1 kernel within {worst:e} of exact, n <= 3"),
    )
}

fn determinism() -> CheckResult {
    let mut config = ExperimentConfig::new(AlgorithmId::ALL.to_vec(), vec![6, 10]);
    config.runs = 3;
    config.seed = 7;
    config.budget = 200_000;
    let serial = run_experiment_with(&config, Execution::Serial);
    let parallel = run_experiment_with(&config, Execution::Parallel);
    let again = run_experiment_with(&config, Execution::Threads(2));
    let ok = match (&serial, &parallel, &again) {
        (Ok(a), Ok(b), Ok(c)) => a == b && b == c,
        _ => false,
    };
    check(
        "determinism",
        ok,
        if ok {
            "serial, parallel and fixed-pool runs give identical records".to_string()
        } else {
            "records differ between execution modes".to_string()
        },
    )
}

fn oracle_opl_absorption(runs: usize) -> CheckResult {
    let n = 3;
    let chain = build_chain(ChainAlgorithm::Opl, n, 1).unwrap();
    let exact = absorption_probabilities(&chain, &uniform_start(n))
        .unwrap()
        .optimum;
    let algorithm = Algorithm::PlusLambda { lambda: 1 };
    let stop = StopPolicy::for_algorithm(AlgorithmId::Opl, u64::MAX);
    let mut rng = RandomStream::new(0x6f70_6c31);
    let hits = (0..runs)
        .filter(|_| run(&algorithm, n, &stop, &mut rng).unwrap().outcome == OutcomeClass::Optimum)
        .count();
    let observed = hits as f64 / runs as f64;
    check(
        "oracle-opl-absorption",
        (observed - exact).abs() <= 0.01,
        format!(
            "(1+1) EA n=3: P[optimum] {observed:.4} vs exact {exact:.4} over {runs} runs (±0.01)"
        ),
    )
}

fn oracle_ocl_hitting_time(runs: usize) -> CheckResult {
    let n = 3;
    let chain = build_chain(ChainAlgorithm::Ocl, n, 2).unwrap();
    let exact = expected_hitting_time(&chain, &uniform_start(n), OutcomeClass::Optimum)
        .unwrap()
        .finite()
        .unwrap_or(f64::INFINITY);
    let algorithm = Algorithm::CommaLambda { lambda: 2 };
    let stop = StopPolicy::for_algorithm(AlgorithmId::Ocl, u64::MAX);
    let mut rng = RandomStream::new(0x6f63_6c32);
    let total: u64 = (0..runs)
        .map(|_| run(&algorithm, n, &stop, &mut rng).unwrap().generations)
        .sum();
    let observed = total as f64 / runs as f64;
    let rel = (observed - exact).abs() / exact;
    check(
        "oracle-ocl-hitting-time",
        rel <= 0.01,
        format!("(1,2) EA n=3: mean generations {observed:.4} vs exact {exact:.4}, relative error {rel:.4} (limit 0.01)"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_level_passes() {
        let report = verify(VerifyLevel::Fast);
        assert!(report.passed(), "{report}");
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "cga-frequency-range"));
    }

    #[test]
    fn missing_clamp_is_named() {
        let report = verify_with(
            VerifyLevel::Fast,
            Faults {
                missing_clamp: true,
            },
        );
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert_eq!(failed, ["cga-frequency-range"], "{report}");
        assert!(report.to_string().contains("FAIL cga-frequency-range"));
    }

    #[test]
    fn level_parsing() {
        assert_eq!("fast".parse::<VerifyLevel>().unwrap(), VerifyLevel::Fast);
        assert_eq!("full".parse::<VerifyLevel>().unwrap(), VerifyLevel::Full);
        assert!(matches!(
            "slow".parse::<VerifyLevel>(),
            Err(Error::Config(_))
        ));
    }
}
