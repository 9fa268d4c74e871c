use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::random::RandomStream;
use crate::stagnation::{classify_bits, OutcomeClass};

use super::cga::{CgaState, CompactGa};
use super::pair::{CommaLambdaEa, Metropolis, PairState, PlusLambdaEa};

/// Default evaluation budget for a run.
pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmId {
    /// (1+λ) EA
    #[serde(rename = "opl")]
    Opl,
    /// (1,λ) EA
    #[serde(rename = "ocl")]
    Ocl,
    #[serde(rename = "cga")]
    Cga,
    #[serde(rename = "metropolis")]
    Metropolis,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 4] = [
        AlgorithmId::Opl,
        AlgorithmId::Ocl,
        AlgorithmId::Cga,
        AlgorithmId::Metropolis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Opl => "opl",
            AlgorithmId::Ocl => "ocl",
            AlgorithmId::Cga => "cga",
            AlgorithmId::Metropolis => "metropolis",
        }
    }

    /// Elitist runs stop as soon as Event I or Event II is detected.
    pub fn is_elitist(self) -> bool {
        matches!(self, AlgorithmId::Opl)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown algorithm {s:?} (expected opl, ocl, cga or metropolis)"
                ))
            })
    }
}

/// An algorithm together with its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    PlusLambda { lambda: usize },
    CommaLambda { lambda: usize },
    Cga { mu: usize },
    Metropolis { alpha: f64 },
}

impl Algorithm {
    pub fn id(&self) -> AlgorithmId {
        match self {
            Algorithm::PlusLambda { .. } => AlgorithmId::Opl,
            Algorithm::CommaLambda { .. } => AlgorithmId::Ocl,
            Algorithm::Cga { .. } => AlgorithmId::Cga,
            Algorithm::Metropolis { .. } => AlgorithmId::Metropolis,
        }
    }

    /// λ, μ or α as a number, for records.
    pub fn param(&self) -> f64 {
        match *self {
            Algorithm::PlusLambda { lambda } | Algorithm::CommaLambda { lambda } => lambda as f64,
            Algorithm::Cga { mu } => mu as f64,
            Algorithm::Metropolis { alpha } => alpha,
        }
    }

    /// Fitness evaluations per generation.
    pub fn evaluations_per_generation(&self) -> u64 {
        match *self {
            Algorithm::PlusLambda { lambda } | Algorithm::CommaLambda { lambda } => lambda as u64,
            Algorithm::Cga { .. } => 2,
            Algorithm::Metropolis { .. } => 1,
        }
    }
}

/// When a run stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopPolicy {
    /// A generation is only started if its evaluations fit in the budget.
    pub budget: u64,
    /// Stop at the first Event I/II detection.
    pub stop_on_events: bool,
}

impl StopPolicy {
    /// Events terminate elitist runs only.
    pub fn for_algorithm(id: AlgorithmId, budget: u64) -> Self {
        Self {
            budget,
            stop_on_events: id.is_elitist(),
        }
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: OutcomeClass,
    pub evaluations: u64,
    pub generations: u64,
    pub first_event1_gen: Option<u64>,
    pub first_event2_gen: Option<u64>,
    /// First bit of the stored previous solution at the end of the run.
    pub final_prev_first: bool,
    /// Current solution at the end of the run.
    pub final_curr: BitString,
}

#[derive(Default)]
struct EventLog {
    event1: Option<u64>,
    event2: Option<u64>,
}

impl EventLog {
    fn note(&mut self, class: OutcomeClass, generation: u64) {
        match class {
            OutcomeClass::EventI => {
                self.event1.get_or_insert(generation);
            }
            OutcomeClass::EventII => {
                self.event2.get_or_insert(generation);
            }
            _ => {}
        }
    }
}

/// Initializes `algorithm` on dimension `n` and runs it to termination.
pub fn run(
    algorithm: &Algorithm,
    n: usize,
    stop: &StopPolicy,
    rng: &mut RandomStream,
) -> Result<RunResult, Error> {
    if stop.budget < 1 {
        // Not even the initial evaluation fits.
        algorithm_check(algorithm, n)?;
        return Ok(RunResult {
            outcome: OutcomeClass::Censored,
            evaluations: 0,
            generations: 0,
            first_event1_gen: None,
            first_event2_gen: None,
            final_prev_first: false,
            final_curr: BitString::zeros(n)?,
        });
    }
    match *algorithm {
        Algorithm::Cga { mu } => {
            let state = CgaState::initial(n, mu, rng)?;
            Ok(run_cga_from(state, stop, rng))
        }
        _ => {
            let state = PairState::random(n, rng)?;
            run_pair_from(algorithm, state, stop, rng)
        }
    }
}

fn algorithm_check(algorithm: &Algorithm, n: usize) -> Result<(), Error> {
    match *algorithm {
        Algorithm::PlusLambda { lambda } => PlusLambdaEa::new(n, lambda).map(drop),
        Algorithm::CommaLambda { lambda } => CommaLambdaEa::new(n, lambda).map(drop),
        Algorithm::Cga { mu } => super::cga::FrequencyVector::new(n, mu).map(drop),
        Algorithm::Metropolis { alpha } => Metropolis::new(alpha).map(drop),
    }
}

enum PairStepper {
    Plus(PlusLambdaEa),
    Comma(CommaLambdaEa),
    Metropolis(Metropolis),
}

/// Runs a pair-based algorithm from a given state. The state's counters are
/// kept, so a freshly constructed pair starts at one evaluation.
pub fn run_pair_from(
    algorithm: &Algorithm,
    mut state: PairState,
    stop: &StopPolicy,
    rng: &mut RandomStream,
) -> Result<RunResult, Error> {
    let n = state.n();
    let mut stepper = match *algorithm {
        Algorithm::PlusLambda { lambda } => PairStepper::Plus(PlusLambdaEa::new(n, lambda)?),
        Algorithm::CommaLambda { lambda } => PairStepper::Comma(CommaLambdaEa::new(n, lambda)?),
        Algorithm::Metropolis { alpha } => PairStepper::Metropolis(Metropolis::new(alpha)?),
        Algorithm::Cga { .. } => {
            return Err(Error::InvalidParameter(
                "the cGA does not run on a solution pair".into(),
            ))
        }
    };
    let cost = algorithm.evaluations_per_generation();
    let mut events = EventLog::default();

    let outcome = loop {
        let class = state.classify();
        events.note(class, state.generation);
        if class == OutcomeClass::Optimum || (stop.stop_on_events && class.is_event()) {
            break class;
        }
        if state.evaluations.saturating_add(cost) > stop.budget {
            break OutcomeClass::Censored;
        }
        match &mut stepper {
            PairStepper::Plus(ea) => {
                ea.step(&mut state, rng);
            }
            PairStepper::Comma(ea) => ea.step(&mut state, rng),
            PairStepper::Metropolis(m) => {
                m.step(&mut state, rng);
            }
        }
    };

    Ok(RunResult {
        outcome,
        evaluations: state.evaluations,
        generations: state.generation,
        first_event1_gen: events.event1,
        first_event2_gen: events.event2,
        final_prev_first: state.prev.first(),
        final_curr: state.curr,
    })
}

/// Runs the cGA from a given state until the optimum is sampled or the budget
/// runs out. Event configurations of (old winner, new winner) are logged.
pub fn run_cga_from(mut state: CgaState, stop: &StopPolicy, rng: &mut RandomStream) -> RunResult {
    let mut ga = CompactGa::new();
    let mut events = EventLog::default();
    let mut prev_first = false;

    let outcome = loop {
        if state.evaluations.saturating_add(2) > stop.budget {
            break OutcomeClass::Censored;
        }
        let step = ga.step(&mut state, rng);
        prev_first = step.context_first;
        let class = classify_bits(prev_first, &state.stored_winner);
        events.note(class, state.generation);
        if class == OutcomeClass::Optimum || (stop.stop_on_events && class.is_event()) {
            break class;
        }
    };

    RunResult {
        outcome,
        evaluations: state.evaluations,
        generations: state.generation,
        first_event1_gen: events.event1,
        first_event2_gen: events.event2,
        final_prev_first: prev_first,
        final_curr: state.stored_winner,
    }
}
