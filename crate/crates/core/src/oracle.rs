//! Exact Markov-chain analysis of the (1+λ) and (1,λ) EA for tiny `n`.
//!
//! The chain lives on the extended space `{0,1} × {0,1}^n`: the first bit of
//! the stored previous solution together with the current solution. That is
//! all the fitness, the selection and the stagnation classes depend on.
//!
//! Everything here is computed by enumeration and direct linear solves, and is
//! meant as ground truth for statistical tests of the simulators.

use std::fmt;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::algorithms::{AlgorithmId, PairState};
use crate::bits::BitString;
use crate::error::Error;
use crate::problem::onemax01n;
use crate::stagnation::{classify_bits, OutcomeClass};

/// Largest `n` for which chains are built.
pub const MAX_CHAIN_N: usize = 4;
/// Largest `λ·n` for which the best-of-λ distribution is enumerated.
pub const MAX_ENUMERATION: usize = 16;
/// Tolerance on linear-solve residuals and on "probability one".
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// Index of `(prev_1, curr)` in `[0, 2^{n+1})`: `prev_1 · 2^n + index(curr)`,
/// where `index(curr)` has position `i` at bit `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex(pub usize);

impl StateIndex {
    pub fn encode(prev_first: bool, curr: &BitString) -> Self {
        let n = curr.len();
        StateIndex((usize::from(prev_first) << n) | curr.to_index() as usize)
    }

    pub fn decode(self, n: usize) -> (bool, BitString) {
        let prev_first = self.0 >> n & 1 == 1;
        let curr = BitString::from_index((self.0 & ((1 << n) - 1)) as u64, n)
            .expect("n is small and positive");
        (prev_first, curr)
    }

    pub fn of_pair(state: &PairState) -> Self {
        Self::encode(state.prev.first(), &state.curr)
    }
}

/// Probability that standard bit-wise mutation turns `x` into `y`.
pub fn mutation_kernel(x: &BitString, y: &BitString) -> f64 {
    let n = x.len();
    let d = x.hamming(y) as i32;
    let p = 1.0 / n as f64;
    p.powi(d) * (1.0 - p).powi(n as i32 - d)
}

fn enumeration_guard(n: usize, lambda: usize) -> Result<(), Error> {
    if lambda == 0 {
        return Err(Error::InvalidParameter("lambda must be at least 1".into()));
    }
    let fits = if lambda == 1 {
        n <= MAX_ENUMERATION
    } else {
        lambda.saturating_mul(n) <= MAX_ENUMERATION
    };
    if fits {
        Ok(())
    } else {
        Err(Error::InstanceTooLarge(format!(
            "lambda * n = {lambda} * {n} exceeds {MAX_ENUMERATION}"
        )))
    }
}

/// Exact distribution of the offspring selected from `λ` mutants of `x`,
/// indexed by [`BitString::to_index`].
///
/// All `(2^n)^λ` joint outcomes are enumerated; within each outcome the
/// selected mutant is uniform over the multiset of mutants with the most
/// ones.
pub fn best_of_lambda_kernel(x: &BitString, lambda: usize) -> Result<Vec<f64>, Error> {
    let n = x.len();
    enumeration_guard(n, lambda)?;
    let size = 1usize << n;
    let single: Vec<f64> = (0..size)
        .map(|y| mutation_kernel(x, &BitString::from_index(y as u64, n).unwrap()))
        .collect();
    if lambda == 1 {
        return Ok(single);
    }
    let ones: Vec<u32> = (0..size as u32).map(u32::count_ones).collect();

    let mut dist = vec![0.0; size];
    let mut digits = vec![0usize; lambda];
    loop {
        let weight: f64 = digits.iter().map(|&y| single[y]).product();
        let best = digits.iter().map(|&y| ones[y]).max().unwrap();
        let ties = digits.iter().filter(|&&y| ones[y] == best).count();
        let share = weight / ties as f64;
        for &y in digits.iter().filter(|&&y| ones[y] == best) {
            dist[y] += share;
        }
        // Odometer over λ base-2^n digits.
        let mut k = 0;
        loop {
            if k == lambda {
                return Ok(dist);
            }
            digits[k] += 1;
            if digits[k] < size {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Algorithms with an exact chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainAlgorithm {
    /// (1+λ) EA; optimum, Event I and Event II states absorb.
    Opl,
    /// (1,λ) EA; only the optimum absorbs.
    Ocl,
}

impl ChainAlgorithm {
    pub fn id(self) -> AlgorithmId {
        match self {
            ChainAlgorithm::Opl => AlgorithmId::Opl,
            ChainAlgorithm::Ocl => AlgorithmId::Ocl,
        }
    }
}

impl TryFrom<AlgorithmId> for ChainAlgorithm {
    type Error = Error;

    fn try_from(id: AlgorithmId) -> Result<Self, Error> {
        match id {
            AlgorithmId::Opl => Ok(ChainAlgorithm::Opl),
            AlgorithmId::Ocl => Ok(ChainAlgorithm::Ocl),
            other => Err(Error::InvalidParameter(format!(
                "no exact chain for {other}; only opl and ocl are supported"
            ))),
        }
    }
}

/// Row-stochastic matrix over [`StateIndex`] with absorbing states tagged by
/// their class.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub n: usize,
    pub lambda: usize,
    pub algorithm: ChainAlgorithm,
    pub matrix: DMatrix<f64>,
    /// `Some(class)` for absorbing states.
    pub absorbing: Vec<Option<OutcomeClass>>,
}

impl TransitionMatrix {
    pub fn states(&self) -> usize {
        self.absorbing.len()
    }

    pub fn row(&self, s: StateIndex) -> Vec<f64> {
        self.matrix.row(s.0).iter().copied().collect()
    }

    fn transient(&self) -> Vec<usize> {
        (0..self.states())
            .filter(|&s| self.absorbing[s].is_none())
            .collect()
    }
}

/// Builds the exact one-generation chain.
pub fn build_chain(
    algorithm: ChainAlgorithm,
    n: usize,
    lambda: usize,
) -> Result<TransitionMatrix, Error> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if n > MAX_CHAIN_N {
        return Err(Error::InstanceTooLarge(format!(
            "chains are limited to n <= {MAX_CHAIN_N}, got {n}"
        )));
    }
    enumeration_guard(n, lambda)?;
    let size = 1usize << n;
    let states = 2 * size;
    let kernels = (0..size)
        .map(|c| best_of_lambda_kernel(&BitString::from_index(c as u64, n).unwrap(), lambda))
        .collect::<Result<Vec<_>, _>>()?;

    let mut matrix = DMatrix::zeros(states, states);
    let mut absorbing = vec![None; states];
    for s in 0..states {
        let (prev_first, curr) = StateIndex(s).decode(n);
        let class = classify_bits(prev_first, &curr);
        let absorbs = match algorithm {
            ChainAlgorithm::Opl => class != OutcomeClass::Running,
            ChainAlgorithm::Ocl => class == OutcomeClass::Optimum,
        };
        if absorbs {
            absorbing[s] = Some(class);
            matrix[(s, s)] = 1.0;
            continue;
        }
        let parent_fitness = onemax01n(prev_first, &curr);
        for (y, &q) in kernels[curr.to_index() as usize].iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let child = BitString::from_index(y as u64, n).unwrap();
            let next = StateIndex::encode(curr.first(), &child).0;
            let accept = match algorithm {
                ChainAlgorithm::Ocl => true,
                ChainAlgorithm::Opl => onemax01n(curr.first(), &child) >= parent_fitness,
            };
            let target = if accept { next } else { s };
            matrix[(s, target)] += q;
        }
    }
    Ok(TransitionMatrix {
        n,
        lambda,
        algorithm,
        matrix,
        absorbing,
    })
}

/// Uniform distribution over the extended space, which is the law of
/// `(X^0_1, X^1)` for two independent uniform strings.
pub fn uniform_start(n: usize) -> Vec<f64> {
    let states = 2usize << n;
    vec![1.0 / states as f64; states]
}

/// Point mass on one state.
pub fn point_start(n: usize, prev_first: bool, curr: &BitString) -> Vec<f64> {
    let mut start = vec![0.0; 2usize << n];
    start[StateIndex::encode(prev_first, curr).0] = 1.0;
    start
}

/// Probability of ending in each absorbing class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Absorption {
    pub optimum: f64,
    pub event1: f64,
    pub event2: f64,
}

impl Absorption {
    pub fn get(&self, class: OutcomeClass) -> f64 {
        match class {
            OutcomeClass::Optimum => self.optimum,
            OutcomeClass::EventI => self.event1,
            OutcomeClass::EventII => self.event2,
            _ => 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.optimum + self.event1 + self.event2
    }
}

const CLASSES: [OutcomeClass; 3] = [
    OutcomeClass::Optimum,
    OutcomeClass::EventI,
    OutcomeClass::EventII,
];

/// Solves `(I - Q) X = B` over the transient states, checking the residual.
fn solve_transient(
    chain: &TransitionMatrix,
    transient: &[usize],
    rhs: DMatrix<f64>,
) -> Result<DMatrix<f64>, Error> {
    let t = transient.len();
    let system = DMatrix::from_fn(t, t, |i, j| {
        let q = chain.matrix[(transient[i], transient[j])];
        if i == j {
            1.0 - q
        } else {
            -q
        }
    });
    let solution =
        system.clone().lu().solve(&rhs).ok_or_else(|| {
            Error::SingularSystem("transient block I - Q is not invertible".into())
        })?;
    let residual = (&system * &solution - &rhs).amax();
    if !residual.is_finite() || residual > SOLVE_TOLERANCE {
        return Err(Error::SingularSystem(format!(
            "residual {residual:e} exceeds {SOLVE_TOLERANCE:e}; absorption may be unreachable"
        )));
    }
    Ok(solution)
}

fn check_start(chain: &TransitionMatrix, start: &[f64]) -> Result<(), Error> {
    if start.len() != chain.states() {
        return Err(Error::InvalidParameter(format!(
            "start distribution has {} entries, chain has {} states",
            start.len(),
            chain.states()
        )));
    }
    let total: f64 = start.iter().sum();
    if start.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > SOLVE_TOLERANCE {
        return Err(Error::InvalidParameter(
            "start distribution must be non-negative and sum to 1".into(),
        ));
    }
    Ok(())
}

/// Probability of absorption into each class from `start`.
pub fn absorption_probabilities(
    chain: &TransitionMatrix,
    start: &[f64],
) -> Result<Absorption, Error> {
    check_start(chain, start)?;
    let transient = chain.transient();
    let mut result = [0.0; 3];
    for (s, &p) in start.iter().enumerate() {
        if let Some(class) = chain.absorbing[s] {
            let k = CLASSES.iter().position(|&c| c == class).unwrap();
            result[k] += p;
        }
    }
    if !transient.is_empty() {
        let rhs = DMatrix::from_fn(transient.len(), 3, |i, k| {
            (0..chain.states())
                .filter(|&a| chain.absorbing[a] == Some(CLASSES[k]))
                .map(|a| chain.matrix[(transient[i], a)])
                .sum()
        });
        let b = solve_transient(chain, &transient, rhs)?;
        for (i, &s) in transient.iter().enumerate() {
            for (k, r) in result.iter_mut().enumerate() {
                *r += start[s] * b[(i, k)];
            }
        }
    }
    Ok(Absorption {
        optimum: result[0],
        event1: result[1],
        event2: result[2],
    })
}

/// Expected number of generations until the target class is hit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HittingTime {
    Finite(f64),
    /// The target is missed with positive probability.
    Infinite,
}

impl HittingTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            HittingTime::Finite(t) => Some(t),
            HittingTime::Infinite => None,
        }
    }
}

impl fmt::Display for HittingTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HittingTime::Finite(t) => write!(f, "{t}"),
            HittingTime::Infinite => f.write_str("inf"),
        }
    }
}

pub fn expected_hitting_time(
    chain: &TransitionMatrix,
    start: &[f64],
    target: OutcomeClass,
) -> Result<HittingTime, Error> {
    let absorption = absorption_probabilities(chain, start)?;
    if absorption.get(target) < 1.0 - SOLVE_TOLERANCE {
        return Ok(HittingTime::Infinite);
    }
    let transient = chain.transient();
    if transient.is_empty() {
        return Ok(HittingTime::Finite(0.0));
    }
    let ones = DMatrix::from_element(transient.len(), 1, 1.0);
    let t = solve_transient(chain, &transient, ones)?;
    let steps = DVector::from_iterator(transient.len(), t.column(0).iter().copied());
    let expected = transient
        .iter()
        .enumerate()
        .map(|(i, &s)| start[s] * steps[i])
        .sum();
    Ok(HittingTime::Finite(expected))
}

/// Absorption and hitting-time summary for one chain from the uniform start.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub algorithm: ChainAlgorithm,
    pub n: usize,
    pub lambda: usize,
    pub absorption: Absorption,
    pub hitting_time: HittingTime,
}

pub const REPORT_HEADER: &str = "algo,n,lambda,p_optimum,p_event1,p_event2,expected_generations";

impl OracleReport {
    pub fn compute(algorithm: ChainAlgorithm, n: usize, lambda: usize) -> Result<Self, Error> {
        let chain = build_chain(algorithm, n, lambda)?;
        let start = uniform_start(n);
        Ok(Self {
            algorithm,
            n,
            lambda,
            absorption: absorption_probabilities(&chain, &start)?,
            hitting_time: expected_hitting_time(&chain, &start, OutcomeClass::Optimum)?,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.12},{:.12},{:.12},{}",
            self.algorithm.id(),
            self.n,
            self.lambda,
            self.absorption.optimum,
            self.absorption.event1,
            self.absorption.event2,
            match self.hitting_time {
                HittingTime::Finite(t) => format!("{t:.9}"),
                HittingTime::Infinite => "inf".into(),
            }
        )
    }
}

/// Writes reports as CSV to `out`.
pub fn write_reports<W: Write>(reports: &[OracleReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_reports_to_path(reports: &[OracleReport], path: &Path) -> Result<(), Error> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_reports(reports, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}
