//! Time-linkage compact genetic algorithm.
//!
//! Marginals are stored as exact integers over the common denominator
//! `2·n·μ`, so the initial value 1/2, the step 1/μ and the borders 1/n and
//! 1 − 1/n are all representable and the update arithmetic is exact.

use rand::Rng;

use crate::bits::BitString;
use crate::error::Error;
use crate::problem::onemax01n;

/// One marginal probability per position, in units of `1 / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyVector {
    numerators: Vec<i64>,
    denominator: i64,
    step: i64,
    lower: i64,
    upper: i64,
}

impl FrequencyVector {
    /// All marginals at 1/2.
    pub fn new(n: usize, mu: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        if mu < 2 {
            return Err(Error::InvalidParameter(format!(
                "cGA population size must be at least 2, got {mu}"
            )));
        }
        let (n64, mu64) = (n as i64, mu as i64);
        let denominator = 2 * n64 * mu64;
        Ok(Self {
            numerators: vec![n64 * mu64; n],
            denominator,
            step: 2 * n64,
            lower: 2 * mu64,
            upper: 2 * (n64 - 1) * mu64,
        })
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn marginal(&self, i: usize) -> f64 {
        self.numerators[i] as f64 / self.denominator as f64
    }

    pub fn marginals(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.marginal(i))
    }

    /// Raw numerators; `marginal(i) = numerators()[i] / denominator()`.
    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// 1/μ in numerator units.
    pub fn step_units(&self) -> i64 {
        self.step
    }

    /// `(1/n, 1 - 1/n)` in numerator units.
    pub fn bounds_units(&self) -> (i64, i64) {
        (self.lower, self.upper)
    }

    /// Sets marginal `i` to `numerator / denominator`. Values outside
    /// `[0, denominator]` are rejected.
    pub fn set_numerator(&mut self, i: usize, numerator: i64) -> Result<(), Error> {
        if !(0..=self.denominator).contains(&numerator) {
            return Err(Error::InvalidParameter(format!(
                "marginal numerator {numerator} outside [0, {}]",
                self.denominator
            )));
        }
        self.numerators[i] = numerator;
        Ok(())
    }

    /// Draws one individual, position `i` being one with probability
    /// `marginal(i)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let n = self.len();
        let mut words = vec![0u64; n.div_ceil(64)];
        for (i, &p) in self.numerators.iter().enumerate() {
            if rng.gen_range(0..self.denominator) < p {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitString::from_words(words, n).expect("n >= 1")
    }

    /// `p' = p + (winner - loser)/μ` without clamping; the proposal is
    /// written to `proposal` (numerator units).
    fn propose(&self, winner: &BitString, loser: &BitString, proposal: &mut Vec<i64>) {
        proposal.clear();
        proposal.extend(
            self.numerators.iter().enumerate().map(|(i, &p)| {
                p + self.step * (i64::from(winner.get(i)) - i64::from(loser.get(i)))
            }),
        );
    }

    fn clamp(&self, value: i64) -> i64 {
        value.clamp(self.lower, self.upper)
    }
}

/// Frequency vector, stored winner and counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CgaState {
    pub freq: FrequencyVector,
    pub stored_winner: BitString,
    pub generation: u64,
    pub evaluations: u64,
    pub mu: usize,
}

impl CgaState {
    /// Marginals at 1/2 and a first sample as the stored winner; the sample
    /// counts as one evaluation.
    pub fn initial<R: Rng + ?Sized>(n: usize, mu: usize, rng: &mut R) -> Result<Self, Error> {
        let freq = FrequencyVector::new(n, mu)?;
        let stored_winner = freq.sample(rng);
        Ok(Self {
            freq,
            stored_winner,
            generation: 0,
            evaluations: 1,
            mu,
        })
    }

    pub fn n(&self) -> usize {
        self.freq.len()
    }
}

/// What one generation did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CgaStep {
    /// First bit of the stored winner used as fitness context.
    pub context_first: bool,
    /// The first sample won (including ties).
    pub first_won: bool,
}

/// cGA stepper holding scratch buffers.
#[derive(Clone, Debug, Default)]
pub struct CompactGa {
    proposal: Vec<i64>,
    skip_clamp: bool,
}

impl CompactGa {
    pub fn new() -> Self {
        Self::default()
    }

    /// Disables the border clamp. Only for checking that invariant suites
    /// catch a broken update.
    #[doc(hidden)]
    pub fn inject_missing_clamp(mut self) -> Self {
        self.skip_clamp = true;
        self
    }

    /// Unclamped marginals proposed in the last step, in numerator units.
    pub fn last_proposal(&self) -> &[i64] {
        &self.proposal
    }

    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut CgaState, rng: &mut R) -> CgaStep {
        let first = state.freq.sample(rng);
        let second = state.freq.sample(rng);
        state.evaluations += 2;
        state.generation += 1;

        let context_first = state.stored_winner.first();
        // Ties go to the first sample.
        let first_won = onemax01n(context_first, &first) >= onemax01n(context_first, &second);
        let (winner, loser) = if first_won {
            (first, second)
        } else {
            (second, first)
        };

        state.freq.propose(&winner, &loser, &mut self.proposal);
        for (p, &proposed) in state.freq.numerators.iter_mut().zip(&self.proposal) {
            *p = if self.skip_clamp {
                proposed
            } else {
                proposed.clamp(state.freq.lower, state.freq.upper)
            };
        }
        debug_assert!(
            self.skip_clamp
                || state
                    .freq
                    .numerators
                    .iter()
                    .all(|&p| p == state.freq.clamp(p))
        );
        state.stored_winner = winner;
        CgaStep {
            context_first,
            first_won,
        }
    }
}

/// One cGA generation with a fresh stepper.
pub fn cga_step<R: Rng + ?Sized>(state: &mut CgaState, rng: &mut R) -> CgaStep {
    CompactGa::new().step(state, rng)
}
