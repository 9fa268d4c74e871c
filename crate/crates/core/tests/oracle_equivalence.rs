use rayon::prelude::*;

use tlinkage::algorithms::{
    acceptance_probability, run, Algorithm, CommaLambdaEa, Metropolis, PairState, PlusLambdaEa,
    StopPolicy,
};
use tlinkage::oracle::{
    absorption_probabilities, best_of_lambda_kernel, build_chain, expected_hitting_time,
    uniform_start, ChainAlgorithm, StateIndex,
};
use tlinkage::{onemax01n, AlgorithmId, BitString, OutcomeClass, RandomStream};

fn pair(prev_first: bool, curr: &BitString) -> PairState {
    let mut prev = BitString::zeros(curr.len()).unwrap();
    prev.set(0, prev_first);
    PairState::new(prev, curr.clone()).unwrap()
}

#[test]
fn best_of_two_selects_all_ones_at_exact_rate() {
    let x: BitString = "000".parse().unwrap();
    let exact = best_of_lambda_kernel(&x, 2).unwrap();
    let target = StateIndex::encode(false, &"111".parse().unwrap()).0;
    let trials = 10_000_000usize;
    let hits: usize = (0..10u64)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = RandomStream::new(0x6b65_726e + chunk);
            let mut ea = CommaLambdaEa::new(3, 2).unwrap();
            let start = pair(false, &x);
            (0..trials / 10)
                .filter(|_| {
                    let mut state = start.clone();
                    ea.step(&mut state, &mut rng);
                    state.curr.to_index() as usize == target
                })
                .count()
        })
        .sum();
    let observed = hits as f64 / trials as f64;
    assert!(
        (observed - exact[7]).abs() <= 3e-4,
        "{observed} vs {}",
        exact[7]
    );
}

#[test]
fn plus_acceptance_rate_matches_kernel() {
    let n = 5;
    let x = BitString::zeros(n).unwrap();
    let parent = onemax01n(false, &x);
    let exact: f64 = best_of_lambda_kernel(&x, 2)
        .unwrap()
        .iter()
        .enumerate()
        .filter(|(y, _)| onemax01n(false, &BitString::from_index(*y as u64, n).unwrap()) >= parent)
        .map(|(_, q)| q)
        .sum();
    let mut rng = RandomStream::new(0x6163_6370);
    let mut ea = PlusLambdaEa::new(n, 2).unwrap();
    let start = pair(false, &x);
    let steps = 100_000;
    let accepted = (0..steps)
        .filter(|_| ea.step(&mut start.clone(), &mut rng))
        .count();
    let observed = accepted as f64 / steps as f64;
    assert!((observed - exact).abs() <= 0.01, "{observed} vs {exact}");
}

/// Rejected proposals leave the pair unchanged, so the acceptance rate of a
/// Δ class is estimated as accepted moves in that class over the expected
/// number of proposals, `trials · |class| / n`.
#[test]
fn metropolis_acceptance_per_delta() {
    let n = 20;
    let alpha = 1.0;
    let trials = 1_000_000usize;
    let mut event1 = BitString::ones(n).unwrap();
    event1.set(n - 1, false);
    let mut interior = BitString::zeros(n).unwrap();
    for i in (1..n).step_by(2) {
        interior.set(i, true);
    }
    for curr in [event1, interior] {
        let start = pair(false, &curr);
        let deltas: Vec<i64> = (0..n).map(|i| Metropolis::delta(&start, i)).collect();
        let mut metropolis = Metropolis::new(alpha).unwrap();
        let mut rng = RandomStream::new(0x6d65_7472);
        let mut accepted = std::collections::BTreeMap::<i64, usize>::new();
        for _ in 0..trials {
            let mut state = start.clone();
            if metropolis.step(&mut state, &mut rng) {
                let i = (0..n).find(|&i| state.curr.get(i) != curr.get(i)).unwrap();
                *accepted.entry(deltas[i]).or_default() += 1;
            }
        }
        let mut classes: Vec<i64> = deltas.clone();
        classes.sort_unstable();
        classes.dedup();
        for delta in classes {
            let size = deltas.iter().filter(|&&d| d == delta).count();
            let proposals = trials as f64 * size as f64 / n as f64;
            let rate = accepted.get(&delta).copied().unwrap_or(0) as f64 / proposals;
            let exact = acceptance_probability(alpha, delta);
            assert!((exact - (alpha * delta as f64).exp().min(1.0)).abs() < 1e-15);
            assert!(
                (rate - exact).abs() <= 0.005,
                "curr={curr} Δ={delta}: {rate} vs {exact}"
            );
        }
    }
}

fn start_state(n: usize, s: usize) -> (bool, BitString) {
    StateIndex(s).decode(n)
}

/// One-step transition frequencies from every state against the chain rows.
#[test]
fn simulator_rows_match_chain() {
    let steps_per_row = 1_000_000 / 16;
    for algorithm in [ChainAlgorithm::Opl, ChainAlgorithm::Ocl] {
        for n in 1..=3 {
            for lambda in 1..=2 {
                let chain = build_chain(algorithm, n, lambda).unwrap();
                let rows: Vec<(usize, Vec<usize>)> = (0..chain.states())
                    .into_par_iter()
                    .filter(|&s| chain.absorbing[s].is_none())
                    .map(|s| {
                        let (prev_first, curr) = start_state(n, s);
                        let start = pair(prev_first, &curr);
                        let mut rng =
                            RandomStream::substream(0x726f_7773, (n * 4 + lambda) as u64, s as u64);
                        let mut counts = vec![0usize; chain.states()];
                        let mut plus = PlusLambdaEa::new(n, lambda).unwrap();
                        let mut comma = CommaLambdaEa::new(n, lambda).unwrap();
                        for _ in 0..steps_per_row {
                            let mut state = start.clone();
                            match algorithm {
                                ChainAlgorithm::Opl => {
                                    plus.step(&mut state, &mut rng);
                                }
                                ChainAlgorithm::Ocl => comma.step(&mut state, &mut rng),
                            }
                            counts[StateIndex::of_pair(&state).0] += 1;
                        }
                        (s, counts)
                    })
                    .collect();
                for (s, counts) in rows {
                    for (t, &c) in counts.iter().enumerate() {
                        let p = chain.matrix[(s, t)];
                        let observed = c as f64 / steps_per_row as f64;
                        let se = (p * (1.0 - p) / steps_per_row as f64).sqrt();
                        assert!(
                            (observed - p).abs() <= 4.0 * se,
                            "{algorithm:?} n={n} λ={lambda} {s}->{t}: {observed} vs {p}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn plus_one_success_probability_matches_absorption() {
    let n = 3;
    let chain = build_chain(ChainAlgorithm::Opl, n, 1).unwrap();
    let exact = absorption_probabilities(&chain, &uniform_start(n))
        .unwrap()
        .optimum;
    let runs = 1_000_000u64;
    let algorithm = Algorithm::PlusLambda { lambda: 1 };
    let stop = StopPolicy::for_algorithm(AlgorithmId::Opl, u64::MAX);
    let hits: usize = (0..runs)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = RandomStream::substream(0x706c_7573, 0, r);
            run(&algorithm, n, &stop, &mut rng).unwrap().outcome == OutcomeClass::Optimum
        })
        .count();
    let observed = hits as f64 / runs as f64;
    assert!((observed - exact).abs() <= 0.002, "{observed} vs {exact}");
}

#[test]
fn comma_hitting_time_matches_chain() {
    let n = 3;
    let chain = build_chain(ChainAlgorithm::Ocl, n, 2).unwrap();
    let exact = expected_hitting_time(&chain, &uniform_start(n), OutcomeClass::Optimum)
        .unwrap()
        .finite()
        .unwrap();
    let runs = 1_000_000u64;
    let algorithm = Algorithm::CommaLambda { lambda: 2 };
    let stop = StopPolicy::for_algorithm(AlgorithmId::Ocl, u64::MAX);
    let total: u64 = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomStream::substream(0x636f_6d6d, 0, r);
            let result = run(&algorithm, n, &stop, &mut rng).unwrap();
            assert_eq!(result.outcome, OutcomeClass::Optimum);
            assert_eq!(result.evaluations, 1 + 2 * result.generations);
            result.generations
        })
        .sum();
    let observed = total as f64 / runs as f64;
    assert!(
        (observed - exact).abs() / exact <= 0.01,
        "{observed} vs {exact}"
    );
}

#[test]
fn comma_reaches_optimum_at_n50() {
    let n = 50;
    let algorithm = Algorithm::CommaLambda { lambda: 9 };
    let stop = StopPolicy::for_algorithm(AlgorithmId::Ocl, 100_000_000);
    let outcomes: Vec<OutcomeClass> = (0..20u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomStream::substream(0x006e_3530, 0, r);
            run(&algorithm, n, &stop, &mut rng).unwrap().outcome
        })
        .collect();
    assert!(
        outcomes.iter().all(|&o| o == OutcomeClass::Optimum),
        "{outcomes:?}"
    );
}
