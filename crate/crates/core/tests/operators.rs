use proptest::prelude::*;
use rand::rngs::mock::StepRng;
use statrs::distribution::{Binomial, Discrete};

use tlinkage::mutation::{mutate, uniform_random};
use tlinkage::{onemax, onemax01n, BitString, RandomStream};

const DRAWS: usize = 100_000;

#[test]
fn uniform_mean_ones_count() {
    let mut rng = RandomStream::new(11);
    let total: usize = (0..DRAWS)
        .map(|_| uniform_random(100, &mut rng).unwrap().ones_count())
        .sum();
    let mean = total as f64 / DRAWS as f64;
    assert!((mean - 50.0).abs() <= 0.5, "mean {mean}");
}

#[test]
fn uniform_single_bit_is_fair() {
    let mut rng = RandomStream::new(12);
    let ones = (0..DRAWS)
        .filter(|_| uniform_random(1, &mut rng).unwrap().get(0))
        .count();
    let freq = ones as f64 / DRAWS as f64;
    assert!((freq - 0.5).abs() <= 0.01, "frequency {freq}");
}

#[test]
fn uniform_all_heads_stream() {
    let mut rng = StepRng::new(u64::MAX, 0);
    assert_eq!(
        uniform_random(4, &mut rng).unwrap(),
        "1111".parse().unwrap()
    );
}

#[test]
fn hamming_distance_is_binomial() {
    let n = 100;
    let parent = BitString::zeros(n).unwrap();
    let mut rng = RandomStream::new(13);
    let mut counts = vec![0usize; n + 1];
    for _ in 0..DRAWS {
        counts[mutate(&parent, &mut rng).hamming(&parent)] += 1;
    }
    let mean = counts
        .iter()
        .enumerate()
        .map(|(d, &c)| d * c)
        .sum::<usize>() as f64
        / DRAWS as f64;
    assert!((mean - 1.0).abs() <= 0.03, "mean {mean}");

    let law = Binomial::new(1.0 / n as f64, n as u64).unwrap();
    for (d, &c) in counts.iter().enumerate().take(6) {
        let p = law.pmf(d as u64);
        let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
        let observed = c as f64 / DRAWS as f64;
        assert!((observed - p).abs() <= 4.0 * se, "d={d}: {observed} vs {p}");
    }
}

#[test]
fn per_position_flip_rate() {
    for n in [10usize, 100] {
        let parent = BitString::ones(n).unwrap();
        let mut rng = RandomStream::new(14 + n as u64);
        let mut flips = vec![0usize; n];
        for _ in 0..DRAWS {
            let child = mutate(&parent, &mut rng);
            for (i, f) in flips.iter_mut().enumerate() {
                *f += usize::from(!child.get(i));
            }
        }
        let p = 1.0 / n as f64;
        let bound = 4.0 * (p * (1.0 - p) / DRAWS as f64).sqrt();
        for (i, &f) in flips.iter().enumerate() {
            let rate = f as f64 / DRAWS as f64;
            assert!((rate - p).abs() <= bound, "n={n} position {i}: {rate}");
        }
    }
}

fn bitstring(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max_len)
        .prop_map(|b| BitString::from_bits(&b).unwrap())
}

proptest! {
    #[test]
    fn mutation_keeps_length_and_replays(x in bitstring(200), seed in any::<u64>()) {
        let a = mutate(&x, &mut RandomStream::new(seed));
        let b = mutate(&x, &mut RandomStream::new(seed));
        prop_assert_eq!(a.len(), x.len());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fitness_ranking_matches_onemax(
        (x, y) in (1usize..80).prop_flat_map(|n| (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
        )),
        prev_first in any::<bool>(),
    ) {
        let x = BitString::from_bits(&x).unwrap();
        let y = BitString::from_bits(&y).unwrap();
        let n = x.len() as i64;
        prop_assert_eq!(
            onemax01n(prev_first, &x).cmp(&onemax01n(prev_first, &y)),
            onemax(&x).cmp(&onemax(&y))
        );
        prop_assert_eq!(onemax01n(false, &x) - onemax01n(true, &x), n);
        prop_assert!((-n..=n).contains(&onemax01n(prev_first, &x)));
    }

    #[test]
    fn substreams_replay(master in any::<u64>(), cell in any::<u64>(), run in any::<u64>()) {
        let a = uniform_random(130, &mut RandomStream::substream(master, cell, run)).unwrap();
        let b = uniform_random(130, &mut RandomStream::substream(master, cell, run)).unwrap();
        prop_assert_eq!(a, b);
    }
}
