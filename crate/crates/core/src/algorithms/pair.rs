//! Steppers that keep a `(previous, current)` pair of solutions: the
//! time-linkage (1+λ) EA, (1,λ) EA and the Metropolis algorithm.

use rand::Rng;

use crate::bits::BitString;
use crate::error::Error;
use crate::mutation::{uniform_random, FlipSampler};
use crate::problem::{onemax01n, FitnessValue};
use crate::stagnation::{classify_bits, OutcomeClass};

/// Stored previous solution plus current solution.
///
/// `fitness` caches `f(prev_1, curr)`; the function is deterministic, so it is
/// never re-evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairState {
    pub prev: BitString,
    pub curr: BitString,
    pub generation: u64,
    pub evaluations: u64,
    fitness: FitnessValue,
}

impl PairState {
    /// Pair after initialization: generation 0, one evaluation of
    /// `f(prev, curr)`.
    pub fn new(prev: BitString, curr: BitString) -> Result<Self, Error> {
        if prev.len() != curr.len() {
            return Err(Error::InvalidParameter(format!(
                "pair lengths differ: {} vs {}",
                prev.len(),
                curr.len()
            )));
        }
        let fitness = onemax01n(prev.first(), &curr);
        Ok(Self {
            prev,
            curr,
            generation: 0,
            evaluations: 1,
            fitness,
        })
    }

    /// Two independent uniform strings.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, Error> {
        let prev = uniform_random(n, rng)?;
        let curr = uniform_random(n, rng)?;
        Self::new(prev, curr)
    }

    pub fn n(&self) -> usize {
        self.curr.len()
    }

    /// `f(prev_1, curr)`.
    pub fn fitness(&self) -> FitnessValue {
        self.fitness
    }

    pub fn classify(&self) -> OutcomeClass {
        classify_bits(self.prev.first(), &self.curr)
    }

    /// `prev <- curr`, `curr <- curr` with `flips` applied.
    fn shift(&mut self, flips: &[usize], fitness: FitnessValue) {
        std::mem::swap(&mut self.prev, &mut self.curr);
        self.curr.clone_from(&self.prev);
        for &i in flips {
            self.curr.flip(i);
        }
        self.fitness = fitness;
    }
}

/// Fitness of the last offspring batch under the parent's stored context,
/// and which candidate was selected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OffspringBatch {
    pub fitness: Vec<FitnessValue>,
    pub selected: usize,
}

/// Generates λ mutants and picks one uniformly among the fittest.
///
/// Mutants are kept as flip lists; only the selected one is materialized by
/// the caller.
#[derive(Clone, Debug)]
struct Selector {
    sampler: FlipSampler,
    candidate: Vec<usize>,
    best: Vec<usize>,
    batch: OffspringBatch,
}

impl Selector {
    fn new(n: usize) -> Result<Self, Error> {
        Ok(Self {
            sampler: FlipSampler::new(n)?,
            candidate: Vec::new(),
            best: Vec::new(),
            batch: OffspringBatch::default(),
        })
    }

    /// Leaves the selected mutant's flips in `self.best` and returns its
    /// fitness `f(parent_1, mutant)`.
    fn select<R: Rng + ?Sized>(
        &mut self,
        parent: &BitString,
        lambda: usize,
        rng: &mut R,
    ) -> FitnessValue {
        debug_assert_eq!(parent.len(), self.sampler.n());
        let base = onemax01n(parent.first(), parent);
        let mut best_fitness = FitnessValue::MIN;
        let mut ties = 0u64;
        self.batch.fitness.clear();
        for i in 0..lambda {
            self.sampler.sample(rng, &mut self.candidate);
            // The first bit may flip, but f(parent_1, .) is evaluated with
            // the parent's first bit as context, so only |x| changes.
            let delta: FitnessValue = self
                .candidate
                .iter()
                .map(|&j| if parent.get(j) { -1 } else { 1 })
                .sum();
            let fitness = base + delta;
            self.batch.fitness.push(fitness);
            // Reservoir sampling over the argmax multiset.
            let take = if fitness > best_fitness {
                ties = 1;
                true
            } else if fitness == best_fitness {
                ties += 1;
                rng.gen_range(0..ties) == 0
            } else {
                false
            };
            if take {
                best_fitness = fitness;
                std::mem::swap(&mut self.best, &mut self.candidate);
                self.batch.selected = i;
            }
        }
        best_fitness
    }
}

/// Time-linkage (1+λ) EA.
///
/// The best mutant replaces the pair's current solution only if
/// `f(curr_1, mutant) >= f(prev_1, curr)`; otherwise the stored pair is left
/// as it was.
#[derive(Clone, Debug)]
pub struct PlusLambdaEa {
    lambda: usize,
    selector: Selector,
}

impl PlusLambdaEa {
    pub fn new(n: usize, lambda: usize) -> Result<Self, Error> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            selector: Selector::new(n)?,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// One generation. Returns whether the selected mutant was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut PairState, rng: &mut R) -> bool {
        let fitness = self.selector.select(&state.curr, self.lambda, rng);
        state.evaluations += self.lambda as u64;
        state.generation += 1;
        let accept = fitness >= state.fitness;
        if accept {
            state.shift(&self.selector.best, fitness);
        }
        accept
    }

    pub fn last_batch(&self) -> &OffspringBatch {
        &self.selector.batch
    }
}

/// Time-linkage (1,λ) EA: the best mutant always replaces the parent.
#[derive(Clone, Debug)]
pub struct CommaLambdaEa {
    lambda: usize,
    selector: Selector,
}

impl CommaLambdaEa {
    pub fn new(n: usize, lambda: usize) -> Result<Self, Error> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            selector: Selector::new(n)?,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut PairState, rng: &mut R) {
        let fitness = self.selector.select(&state.curr, self.lambda, rng);
        state.evaluations += self.lambda as u64;
        state.generation += 1;
        state.shift(&self.selector.best, fitness);
    }

    pub fn last_batch(&self) -> &OffspringBatch {
        &self.selector.batch
    }
}

/// Time-linkage Metropolis algorithm with single-bit moves.
///
/// A worse move with fitness change `delta < 0` is accepted with probability
/// `exp(alpha * delta)`; on rejection the pair is kept.
#[derive(Clone, Debug)]
pub struct Metropolis {
    alpha: f64,
}

impl Metropolis {
    pub fn new(alpha: f64) -> Result<Self, Error> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive finite number, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Fitness change of flipping position `i`.
    pub fn delta(state: &PairState, i: usize) -> FitnessValue {
        let curr = &state.curr;
        let gain = if curr.get(i) { -1 } else { 1 };
        onemax01n(curr.first(), curr) + gain - state.fitness
    }

    /// One move; returns whether it was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut PairState, rng: &mut R) -> bool {
        let i = rng.gen_range(0..state.n());
        let delta = Self::delta(state, i);
        state.evaluations += 1;
        state.generation += 1;
        let accept = delta >= 0 || rng.gen::<f64>() < acceptance_probability(self.alpha, delta);
        if accept {
            let fitness = state.fitness + delta;
            state.shift(&[i], fitness);
        }
        accept
    }
}

/// `1` for non-negative `delta`, else `exp(alpha * delta)`.
pub fn acceptance_probability(alpha: f64, delta: FitnessValue) -> f64 {
    if delta >= 0 {
        1.0
    } else {
        (alpha * delta as f64).exp()
    }
}

fn check_lambda(lambda: usize) -> Result<(), Error> {
    if lambda == 0 {
        return Err(Error::InvalidParameter("lambda must be at least 1".into()));
    }
    Ok(())
}

/// One (1+λ) EA generation with a fresh stepper.
pub fn opl_step<R: Rng + ?Sized>(state: &mut PairState, lambda: usize, rng: &mut R) -> bool {
    PlusLambdaEa::new(state.n(), lambda)
        .expect("lambda >= 1")
        .step(state, rng)
}

/// One (1,λ) EA generation with a fresh stepper.
pub fn ocl_step<R: Rng + ?Sized>(state: &mut PairState, lambda: usize, rng: &mut R) {
    CommaLambdaEa::new(state.n(), lambda)
        .expect("lambda >= 1")
        .step(state, rng)
}

/// One Metropolis move.
pub fn metropolis_step<R: Rng + ?Sized>(state: &mut PairState, alpha: f64, rng: &mut R) -> bool {
    Metropolis::new(alpha).expect("alpha > 0").step(state, rng)
}
