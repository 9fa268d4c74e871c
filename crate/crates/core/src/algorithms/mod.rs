//! One-generation steppers and run loops.
//!
//! Pair-based algorithms keep the stored previous solution next to the
//! current one; the cGA keeps a frequency vector and the last winner.
//! Every fitness evaluation is counted: one for the initial pair (or initial
//! sample), then λ, 2 or 1 per generation.

mod cga;
mod pair;
mod run;

pub use cga::{cga_step, CgaState, CgaStep, CompactGa, FrequencyVector};
pub use pair::{
    acceptance_probability, metropolis_step, ocl_step, opl_step, CommaLambdaEa, Metropolis,
    OffspringBatch, PairState, PlusLambdaEa,
};
pub use run::{
    run, run_cga_from, run_pair_from, Algorithm, AlgorithmId, RunResult, StopPolicy, DEFAULT_BUDGET,
};
