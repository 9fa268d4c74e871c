//! Fixed-length bit strings, the search points of every algorithm in this crate.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const WORD: usize = 64;

/// A packed, fixed-length binary vector.
///
/// Positions are zero-based in the API; position `0` is the "first bit" that
/// the time-linkage fitness looks at in the previous solution. Unused high
/// bits of the last storage word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    /// All-zeros string of length `len`.
    pub fn zeros(len: usize) -> Result<Self, Error> {
        if len == 0 {
            return Err(Error::InvalidDimension(len));
        }
        Ok(Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        })
    }

    /// All-ones string of length `len`.
    pub fn ones(len: usize) -> Result<Self, Error> {
        let mut s = Self::zeros(len)?;
        s.words.iter_mut().for_each(|w| *w = u64::MAX);
        s.mask_tail();
        Ok(s)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, Error> {
        let mut s = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        Ok(s)
    }

    /// Builds a string from raw storage words; bits past `len` are discarded.
    pub(crate) fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self, Error> {
        if len == 0 {
            return Err(Error::InvalidDimension(len));
        }
        words.resize(len.div_ceil(WORD), 0);
        let mut s = Self { words, len };
        s.mask_tail();
        Ok(s)
    }

    /// Number of positions. Never zero.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// The first position, `x_1` in the usual one-based notation.
    #[inline]
    pub fn first(&self) -> bool {
        self.words[0] & 1 == 1
    }

    /// Number of ones, `|x|`.
    #[inline]
    pub fn ones_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff every position is one.
    pub fn is_all_ones(&self) -> bool {
        self.ones_count() == self.len
    }

    /// True iff positions `1..len` are all ones (the first bit is ignored).
    pub fn tail_all_ones(&self) -> bool {
        self.ones_count() - usize::from(self.first()) == self.len - 1
    }

    /// Number of differing positions.
    ///
    /// Panics if the lengths differ.
    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Interprets the string as an integer with position `i` at bit `i`.
    /// Only meaningful for `len <= 64`; used to index tiny state spaces.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= WORD, "index encoding needs length <= 64");
        self.words[0]
    }

    /// Inverse of [`BitString::to_index`].
    pub fn from_index(index: u64, len: usize) -> Result<Self, Error> {
        if len > WORD {
            return Err(Error::InvalidDimension(len));
        }
        Self::from_words(vec![index], len)
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Free-function form of [`BitString::ones_count`].
pub fn ones_count(x: &BitString) -> usize {
    x.ones_count()
}

/// Free-function form of [`BitString::hamming`].
pub fn hamming(a: &BitString, b: &BitString) -> usize {
    a.hamming(b)
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses strings such as `"10110"`; position 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(&bits)
    }
}
