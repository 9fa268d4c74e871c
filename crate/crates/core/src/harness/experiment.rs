use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run, AlgorithmId, RunResult, StopPolicy};
use crate::error::Error;
use crate::random::{derive_seed, RandomStream};
use crate::stagnation::OutcomeClass;

use super::config::ExperimentConfig;

/// One seeded run, as written to the records CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algo: AlgorithmId,
    pub n: usize,
    /// λ, μ or α.
    #[serde(with = "super::csv_io::float_text")]
    pub param: f64,
    pub run: usize,
    pub seed: u64,
    pub outcome: OutcomeClass,
    pub evaluations: u64,
    pub generations: u64,
    pub first_event1_gen: Option<u64>,
    pub first_event2_gen: Option<u64>,
}

impl RunRecord {
    pub fn from_result(
        algo: AlgorithmId,
        n: usize,
        param: f64,
        run: usize,
        seed: u64,
        result: &RunResult,
    ) -> Self {
        Self {
            algo,
            n,
            param,
            run,
            seed,
            outcome: result.outcome,
            evaluations: result.evaluations,
            generations: result.generations,
            first_event1_gen: result.first_event1_gen,
            first_event2_gen: result.first_event2_gen,
        }
    }
}

/// Identifies a cell for seed derivation; independent of the order in which
/// algorithms and sizes are listed.
pub fn cell_id(algo: AlgorithmId, n: usize) -> u64 {
    let k = AlgorithmId::ALL.iter().position(|&a| a == algo).unwrap() as u64;
    (k << 48) | n as u64
}

/// How runs are scheduled. Results do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

struct Job {
    algo: AlgorithmId,
    n: usize,
    run: usize,
    seed: u64,
}

/// Runs every `(algorithm, n)` cell `config.runs` times.
///
/// Records are ordered by algorithm, then `n`, then run index.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, Error> {
    run_experiment_with(config, Execution::default())
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    execution: Execution,
) -> Result<Vec<RunRecord>, Error> {
    config.validate()?;
    let mut cells: Vec<(AlgorithmId, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&a| config.sizes.iter().map(move |&n| (a, n)))
        .collect();
    cells.sort_unstable();
    cells.dedup();

    let jobs: Vec<Job> = cells
        .iter()
        .flat_map(|&(algo, n)| {
            (0..config.runs).map(move |run| Job {
                algo,
                n,
                run,
                seed: derive_seed(config.seed, cell_id(algo, n), run as u64),
            })
        })
        .collect();

    let execute = |job: &Job| -> Result<RunRecord, Error> {
        let algorithm = config.algorithm_for(job.algo, job.n);
        let stop = StopPolicy::for_algorithm(job.algo, config.budget);
        let mut rng = RandomStream::new(job.seed);
        let result = run(&algorithm, job.n, &stop, &mut rng)?;
        Ok(RunRecord::from_result(
            job.algo,
            job.n,
            algorithm.param(),
            job.run,
            job.seed,
            &result,
        ))
    };

    match execution {
        Execution::Serial => jobs.iter().map(execute).collect(),
        Execution::Parallel => jobs.par_iter().map(execute).collect(),
        Execution::Threads(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?;
            pool.install(|| jobs.par_iter().map(execute).collect())
        }
    }
}
