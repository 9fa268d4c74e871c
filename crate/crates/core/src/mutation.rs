//! Uniform initialization and standard bit-wise mutation.

use rand::{Rng, RngCore};

use crate::bits::BitString;
use crate::error::Error;

/// Uniformly random string of length `n`, drawn 64 bits at a time.
pub fn uniform_random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<BitString, Error> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BitString::from_words(words, n)
}

/// Samples the positions flipped by standard bit-wise mutation at rate `1/n`.
///
/// Instead of drawing one coin per position, gaps between flips are drawn
/// from the geometric distribution, so the cost is proportional to the number
/// of flips. Positions are written to `out` in increasing order.
#[derive(Clone, Debug)]
pub struct FlipSampler {
    n: usize,
    ln_keep: f64,
}

impl FlipSampler {
    pub fn new(n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        let p = 1.0 / n as f64;
        Ok(Self {
            n,
            ln_keep: (1.0 - p).ln(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        if self.n == 1 {
            // Rate 1/n = 1: the single position always flips.
            out.push(0);
            return;
        }
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.gen();
            // P(skip >= k) = (1 - 1/n)^k
            let skip = ((1.0 - u).ln() / self.ln_keep).floor();
            if skip >= (self.n - pos) as f64 {
                break;
            }
            pos += skip as usize;
            out.push(pos);
            pos += 1;
            if pos >= self.n {
                break;
            }
        }
    }
}

/// Returns a copy of `parent` with each position flipped independently with
/// probability `1/n`.
pub fn mutate<R: Rng + ?Sized>(parent: &BitString, rng: &mut R) -> BitString {
    let sampler = FlipSampler::new(parent.len()).expect("bit strings are never empty");
    let mut flips = Vec::new();
    sampler.sample(rng, &mut flips);
    let mut child = parent.clone();
    for &i in &flips {
        child.flip(i);
    }
    child
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RandomStream;
    use rand::rngs::mock::StepRng;

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RandomStream::new(0);
        assert!(matches!(
            uniform_random(0, &mut rng),
            Err(Error::InvalidDimension(0))
        ));
        assert!(FlipSampler::new(0).is_err());
    }

    #[test]
    fn all_heads_stream_gives_all_ones() {
        let mut rng = StepRng::new(u64::MAX, 0);
        assert_eq!(
            uniform_random(4, &mut rng).unwrap(),
            "1111".parse().unwrap()
        );
    }

    #[test]
    fn single_bit_always_flips() {
        let mut rng = RandomStream::new(1);
        let zero: BitString = "0".parse().unwrap();
        for _ in 0..100 {
            assert_eq!(mutate(&zero, &mut rng).to_string(), "1");
        }
    }

    #[test]
    fn saturated_stream_forces_no_flips() {
        // u just below 1 makes every geometric gap exceed the string length.
        let mut rng = StepRng::new(u64::MAX, 0);
        for s in ["01", "1100101", "0000000000"] {
            let parent: BitString = s.parse().unwrap();
            let child = mutate(&parent, &mut rng);
            assert_eq!(child, parent);
            assert_eq!(child.hamming(&parent), 0);
        }
    }

    #[test]
    fn zero_stream_flips_everything() {
        let mut rng = StepRng::new(0, 0);
        let parent: BitString = "0110".parse().unwrap();
        assert_eq!(mutate(&parent, &mut rng).to_string(), "1001");
    }

    #[test]
    fn flips_are_sorted_and_distinct() {
        let sampler = FlipSampler::new(7).unwrap();
        let mut rng = RandomStream::new(9);
        let mut out = Vec::new();
        for _ in 0..10_000 {
            sampler.sample(&mut rng, &mut out);
            assert!(out.windows(2).all(|w| w[0] < w[1]));
            assert!(out.iter().all(|&i| i < 7));
        }
    }
}
