//! Reproducible uniform sampling of words.
//!
//! Samples are grouped in batches of [`BATCH_SIZE`]; batch `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. A word never shares a
//! random `u64` with another word, so word `i` is a pure function of
//! `(seed, i)` regardless of how batches are scheduled across threads.
//!
//! When `2r` is a power of two, letters are taken `log2(2r)` bits at a time
//! from consecutive `u64` draws (low bits first); otherwise each letter is
//! `random_range(0..2r)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::words::{Letter, Word};

pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64, one stream per batch";
pub const BATCH_SIZE: u64 = 4096;

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Draws uniform letter ordinals for words over `r` generators.
#[derive(Debug, Clone, Copy)]
pub struct LetterSource {
    r: usize,
    bits: Option<u32>,
}

impl LetterSource {
    pub fn new(r: usize) -> Self {
        let q = 2 * r;
        LetterSource {
            r,
            bits: q.is_power_of_two().then(|| q.trailing_zeros()),
        }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Bits per letter when letters are read off raw `u64`s.
    pub fn bits_per_letter(&self) -> Option<u32> {
        self.bits
    }

    /// Fills `out` with `n` letter ordinals in `0..2r`.
    pub fn fill_ordinals(&self, rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<u8>) {
        out.clear();
        match self.bits {
            Some(b) => {
                let per = (64 / b) as usize;
                let mask = (1u64 << b) - 1;
                let mut left = n;
                while left > 0 {
                    let mut x = rng.next_u64();
                    for _ in 0..per.min(left) {
                        out.push((x & mask) as u8);
                        x >>= b;
                    }
                    left = left.saturating_sub(per);
                }
            }
            None => {
                let q = 2 * self.r;
                out.extend((0..n).map(|_| rng.random_range(0..q) as u8));
            }
        }
    }

    pub fn word(&self, rng: &mut ChaCha8Rng, n: usize, scratch: &mut Vec<u8>) -> Word {
        self.fill_ordinals(rng, n, scratch);
        Word::from_letters_unchecked(
            scratch
                .iter()
                .map(|&o| Letter::from_ordinal(o as usize, self.r))
                .collect(),
        )
    }
}

/// Stream of `count` independent uniform words of length `n`.
pub fn sample_words(r: usize, n: usize, count: u64, seed: u64) -> SampleStream {
    SampleStream {
        source: LetterSource::new(r),
        n,
        count,
        seed,
        index: 0,
        rng: batch_rng(seed, 0),
        scratch: Vec::with_capacity(n),
    }
}

#[derive(Debug, Clone)]
pub struct SampleStream {
    source: LetterSource,
    n: usize,
    count: u64,
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
    scratch: Vec<u8>,
}

impl Iterator for SampleStream {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.index >= self.count {
            return None;
        }
        if self.index > 0 && self.index.is_multiple_of(BATCH_SIZE) {
            self.rng = batch_rng(self.seed, self.index / BATCH_SIZE);
        }
        self.index += 1;
        Some(self.source.word(&mut self.rng, self.n, &mut self.scratch))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.index) as usize;
        (left, Some(left))
    }
}

/// Splits `total` samples into batch sizes.
pub fn batches(total: u64) -> Vec<u64> {
    let full = total / BATCH_SIZE;
    let mut v = vec![BATCH_SIZE; full as usize];
    if !total.is_multiple_of(BATCH_SIZE) {
        v.push(total % BATCH_SIZE);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a: Vec<Word> = sample_words(2, 12, 5000, 9).collect();
        let b: Vec<Word> = sample_words(2, 12, 5000, 9).collect();
        assert_eq!(a, b);
        let c: Vec<Word> = sample_words(2, 12, 50, 10).collect();
        assert_ne!(a[..50], c[..]);
        assert!(a.iter().all(|w| w.len() == 12 && !w.is_lazy()));
    }

    #[test]
    fn word_i_depends_only_on_seed_and_index() {
        let all: Vec<Word> = sample_words(3, 7, 2 * BATCH_SIZE + 3, 4).collect();
        let mut rng = batch_rng(4, 2);
        let src = LetterSource::new(3);
        let mut s = Vec::new();
        for i in 0..3 {
            assert_eq!(
                all[(2 * BATCH_SIZE + i) as usize],
                src.word(&mut rng, 7, &mut s)
            );
        }
    }

    #[test]
    fn letter_frequencies_are_uniform() {
        for r in [1usize, 2, 3] {
            let q = 2 * r;
            let words = 20_000u64;
            let n = 10;
            let mut counts = vec![0f64; q];
            for w in sample_words(r, n, words, 77) {
                for l in w.letters() {
                    counts[l.ordinal(r)] += 1.0;
                }
            }
            let total = (words as usize * n) as f64;
            let p = 1.0 / q as f64;
            let sigma = (total * p * (1.0 - p)).sqrt();
            for c in counts {
                assert!(
                    (c - total * p).abs() < 3.0 * sigma,
                    "r={r}: {c} vs {}",
                    total * p
                );
            }
        }
    }

    #[test]
    fn closure_rate_matches_closed_form() {
        // ℤ², n = 10: P(closed) = C(10,5)² / 4¹⁰
        let p = (252.0f64 * 252.0) / 4f64.powi(10);
        let m = 200_000u64;
        let closed = sample_words(2, 10, m, 1)
            .filter(|w| {
                let mut v = [0i64; 2];
                for l in w.letters() {
                    v[l.generator().unwrap() - 1] += l.sign();
                }
                v == [0, 0]
            })
            .count() as f64;
        let sd = (m as f64 * p * (1.0 - p)).sqrt();
        assert!((closed - m as f64 * p).abs() < 3.0 * sd, "{closed}");
    }

    #[test]
    fn batch_split() {
        assert_eq!(batches(0), Vec::<u64>::new());
        assert_eq!(batches(BATCH_SIZE + 1), vec![BATCH_SIZE, 1]);
    }
}
