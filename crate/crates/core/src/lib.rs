//! Evolutionary algorithms on the time-linkage `OneMax_(0,1^n)` problem.
//!
//! The crate provides the fitness function, the (1+λ) EA, (1,λ) EA, cGA and
//! Metropolis steppers, classification of the two stagnation configurations,
//! an exact Markov-chain oracle for tiny dimensions, and the experiment
//! harness (seeded parallel runs, summaries, CSV and SVG output).

pub mod algorithms;
pub mod bits;
pub mod error;
pub mod harness;
pub mod mutation;
pub mod oracle;
pub mod problem;
pub mod random;
pub mod stagnation;

pub use algorithms::{Algorithm, AlgorithmId, CgaState, PairState, RunResult, StopPolicy};
pub use bits::BitString;
pub use error::{Error, Result};
pub use problem::{is_global_optimum, onemax, onemax01n, FitnessValue};
pub use random::RandomStream;
pub use stagnation::{classify, OutcomeClass};
