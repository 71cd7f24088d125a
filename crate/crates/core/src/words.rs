//! Words over a signed alphabet `a_1, a_1⁻¹, ..., a_r, a_r⁻¹`, optionally with
//! a pause symbol `e` (lazy words).
//!
//! Text format: whitespace-separated tokens `a<i>` for a generator, `A<i>` for
//! its inverse and `e` for a pause, e.g. `a1 a2 A1 A2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::binomial::PascalTable;
use crate::{Error, Result};

/// A single letter: generator `a_i`, inverse `a_i⁻¹`, or the pause `e`.
///
/// Stored as a signed generator index; `0` is the pause.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i16);

impl Letter {
    pub const PAUSE: Letter = Letter(0);

    /// Generator `a_index` (1-based) or its inverse.
    pub fn new(index: usize, inverse: bool) -> Letter {
        assert!(
            index >= 1 && index <= i16::MAX as usize,
            "generator index {index}"
        );
        let i = index as i16;
        Letter(if inverse { -i } else { i })
    }

    pub fn gen(index: usize) -> Letter {
        Letter::new(index, false)
    }

    pub fn inv(index: usize) -> Letter {
        Letter::new(index, true)
    }

    pub fn from_signed(value: i16) -> Letter {
        Letter(value)
    }

    pub fn signed(self) -> i16 {
        self.0
    }

    pub fn is_pause(self) -> bool {
        self.0 == 0
    }

    /// 1-based generator index, `None` for the pause.
    pub fn generator(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.unsigned_abs() as usize)
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// `+1`, `-1`, or `0` for the pause.
    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position in the enumeration order `a1 < A1 < a2 < A2 < ... < e`.
    pub fn ordinal(self, r: usize) -> usize {
        match self.generator() {
            None => 2 * r,
            Some(i) => 2 * (i - 1) + usize::from(self.is_inverse()),
        }
    }

    /// Inverse of [`Letter::ordinal`]; ordinal `2r` is the pause.
    pub fn from_ordinal(ordinal: usize, r: usize) -> Letter {
        if ordinal == 2 * r {
            Letter::PAUSE
        } else {
            Letter::new(ordinal / 2 + 1, ordinal % 2 == 1)
        }
    }

    fn sort_key(self) -> (bool, u16, bool) {
        (self.is_pause(), self.0.unsigned_abs(), self.is_inverse())
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.generator() {
            None => f.write_str("e"),
            Some(i) if self.is_inverse() => write!(f, "A{i}"),
            Some(i) => write!(f, "a{i}"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Letter> {
        if s == "e" {
            return Ok(Letter::PAUSE);
        }
        let mut chars = s.chars();
        let inverse = match chars.next() {
            Some('a') => false,
            Some('A') => true,
            _ => return Err(Error::Parse(format!("bad letter token {s:?}"))),
        };
        let index: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad generator index in {s:?}")))?;
        if index == 0 || index > i16::MAX as usize {
            return Err(Error::Parse(format!(
                "generator index out of range in {s:?}"
            )));
        }
        Ok(Letter::new(index, inverse))
    }
}

/// The alphabet `{a_1, ..., a_r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    r: usize,
}

impl Alphabet {
    pub fn new(r: usize) -> Result<Alphabet> {
        if r == 0 {
            return Err(Error::InvalidParameter("alphabet needs r >= 1".into()));
        }
        Ok(Alphabet { r })
    }

    pub fn rank(self) -> usize {
        self.r
    }

    /// The `2r` signed letters in enumeration order.
    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..2 * self.r).map(move |o| Letter::from_ordinal(o, self.r))
    }

    pub fn contains(self, l: Letter) -> bool {
        l.generator().is_none_or(|i| i <= self.r)
    }

    pub fn check(self, w: &Word) -> Result<()> {
        match w.letters.iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::LetterOutOfRange(l.to_string(), self.r)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
    lazy: bool,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    /// A non-lazy word; pauses are rejected.
    pub fn new(letters: Vec<Letter>) -> Result<Word> {
        if letters.iter().any(|l| l.is_pause()) {
            return Err(Error::LazyWord);
        }
        Ok(Word {
            letters,
            lazy: false,
        })
    }

    pub fn lazy(letters: Vec<Letter>) -> Word {
        Word {
            letters,
            lazy: true,
        }
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.iter().all(|l| !l.is_pause()));
        Word {
            letters,
            lazy: false,
        }
    }

    /// Builds a non-lazy word from signed indices (`2` is `a2`, `-1` is `A1`).
    pub fn from_signed(indices: &[i16]) -> Result<Word> {
        Word::new(indices.iter().map(|&i| Letter::from_signed(i)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn is_lazy(&self) -> bool {
        self.lazy
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, 0 for words without generators.
    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .filter_map(|l| l.generator())
            .max()
            .unwrap_or(0)
    }

    /// Formal inverse: letters reversed and inverted. Pauses stay pauses.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            lazy: self.lazy,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            lazy: self.lazy || other.lazy,
        }
    }

    /// The word with pauses deleted.
    pub fn strip_pauses(&self) -> Word {
        Word::from_letters_unchecked(
            self.letters
                .iter()
                .copied()
                .filter(|l| !l.is_pause())
                .collect(),
        )
    }

    pub fn free_reduce(&self) -> Result<Word> {
        free_reduce(self)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses the token format. The result is lazy exactly when it contains a pause.
    fn from_str(s: &str) -> Result<Word> {
        let letters = s
            .split_whitespace()
            .map(Letter::from_str)
            .collect::<Result<Vec<_>>>()?;
        let lazy = letters.iter().any(|l| l.is_pause());
        Ok(Word { letters, lazy })
    }
}

/// Free reduction of a letter slice (no pauses expected).
pub(crate) fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Cancels adjacent `x x⁻¹` pairs until none remain. The length of the result
/// is the free-group length `|w|_F`.
pub fn free_reduce(w: &Word) -> Result<Word> {
    if w.lazy {
        return Err(Error::LazyWord);
    }
    Ok(Word::from_letters_unchecked(reduce_letters(&w.letters)))
}

/// `|w|_A`: number of letters, pauses included.
pub fn length_a(w: &Word) -> usize {
    w.len()
}

/// `(2r)^n`, the number of words of length `n`.
pub fn sphere_size(r: usize, n: usize) -> BigUint {
    BigUint::from(2 * r).pow(n as u32)
}

/// `((2r)^{n+1} - 1) / (2r - 1)`, the number of words of length at most `n`.
pub fn ball_size(r: usize, n: usize) -> BigUint {
    let q = BigUint::from(2 * r);
    (q.pow(n as u32 + 1) - BigUint::one()) / BigUint::from(2 * r - 1)
}

/// `(2r+1)^n`, the number of lazy words of length `n`.
pub fn lazy_count(r: usize, n: usize) -> BigUint {
    BigUint::from(2 * r + 1).pow(n as u32)
}

/// `Σ_m C(n, m) (2r)^m`: lazy words grouped by the number `m` of genuine letters.
pub fn lazy_count_by_expansion(r: usize, n: usize) -> BigUint {
    let mut pascal = PascalTable::new();
    let row = pascal.row(n).to_vec();
    row.iter()
        .enumerate()
        .fold(BigUint::zero(), |acc, (m, c)| acc + c * sphere_size(r, m))
}

/// Odometer over all words of a fixed length, in lexicographic order of
/// letter ordinals (`a1 < A1 < a2 < ...`).
#[derive(Debug, Clone)]
pub struct WordEnumerator {
    r: usize,
    digits: Vec<usize>,
    done: bool,
}

impl WordEnumerator {
    fn new(r: usize, n: usize) -> Self {
        WordEnumerator {
            r,
            digits: vec![0; n],
            done: false,
        }
    }

    fn current(&self) -> Word {
        Word::from_letters_unchecked(
            self.digits
                .iter()
                .map(|&d| Letter::from_ordinal(d, self.r))
                .collect(),
        )
    }
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let w = self.current();
        let base = 2 * self.r;
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(w)
    }
}

/// Every word of length `n` over `r` generators, each exactly once.
///
/// Fails when `(2r)^n` exceeds `budget`.
pub fn enumerate_words(r: usize, n: usize, budget: u64) -> Result<WordEnumerator> {
    Alphabet::new(r)?;
    if sphere_size(r, n) > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            what: "enumeration",
            limit: budget,
        });
    }
    Ok(WordEnumerator::new(r, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        let x = w("a1 a1 A1 a1 a1 a1");
        assert_eq!(length_a(&x), 6);
        let red = free_reduce(&x).unwrap();
        assert_eq!(red, w("a1 a1 a1 a1"));
        assert_eq!(red.len(), 4);
        assert_eq!(free_reduce(&Word::empty()).unwrap(), Word::empty());
        assert!(free_reduce(&w("a1 a2 A2 A1")).unwrap().is_empty());
    }

    #[test]
    fn lazy_words() {
        let x = w("a1 e a2");
        assert!(x.is_lazy());
        assert_eq!(length_a(&x), 3);
        assert_eq!(free_reduce(&x), Err(Error::LazyWord));
        assert_eq!(Word::new(vec![Letter::PAUSE]), Err(Error::LazyWord));
    }

    #[test]
    fn token_format_round_trip() {
        let s = "a1 A1 a2 A2 e";
        assert_eq!(w(s).to_string(), s);
        assert!("b1".parse::<Word>().is_err());
        assert!("a0".parse::<Word>().is_err());
        assert!("a".parse::<Word>().is_err());
    }

    #[test]
    fn cardinalities() {
        assert_eq!(sphere_size(2, 3), BigUint::from(64u32));
        assert_eq!(sphere_size(1, 0), BigUint::from(1u32));
        assert_eq!(sphere_size(2, 10), BigUint::from(1_048_576u32));
        assert_eq!(ball_size(2, 1), BigUint::from(5u32));
        assert_eq!(ball_size(2, 2), BigUint::from(21u32));
        assert_eq!(ball_size(1, 3), BigUint::from(15u32));
        assert_eq!(lazy_count(2, 2), BigUint::from(25u32));
        assert_eq!(lazy_count(2, 0), BigUint::from(1u32));
        assert_eq!(lazy_count(1, 3), BigUint::from(27u32));
    }

    #[test]
    fn lazy_binomial_identity() {
        for r in 1..=4 {
            for n in 0..=20 {
                assert_eq!(
                    lazy_count_by_expansion(r, n),
                    lazy_count(r, n),
                    "r={r} n={n}"
                );
            }
        }
    }

    #[test]
    fn ball_is_sum_of_spheres() {
        for r in 1..=3 {
            let mut acc = BigUint::zero();
            for n in 0..12 {
                acc += sphere_size(r, n);
                assert_eq!(ball_size(r, n), acc);
            }
        }
    }

    #[test]
    fn enumeration_small() {
        let all: Vec<String> = enumerate_words(1, 1, 100)
            .unwrap()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(all, vec!["a1", "A1"]);
        let all: Vec<String> = enumerate_words(2, 1, 100)
            .unwrap()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(all, vec!["a1", "A1", "a2", "A2"]);
        let two: HashSet<Word> = enumerate_words(2, 2, 100).unwrap().collect();
        assert_eq!(two.len(), 16);
        assert_eq!(enumerate_words(2, 0, 1).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            enumerate_words(2, 10, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_counts_and_order() {
        for (r, n) in [(1, 6), (2, 5), (3, 3)] {
            let words: Vec<Word> = enumerate_words(r, n, 1 << 20).unwrap().collect();
            assert_eq!(BigUint::from(words.len()), sphere_size(r, n));
            assert!(words.windows(2).all(|p| p[0].letters() < p[1].letters()));
        }
    }

    #[test]
    fn reduction_over_all_short_words() {
        for n in 0..=10 {
            for x in enumerate_words(2, n, 1 << 20).unwrap() {
                let red = free_reduce(&x).unwrap();
                assert_eq!(free_reduce(&red).unwrap(), red);
                assert!(red.len() <= x.len());
                assert_eq!((x.len() - red.len()) % 2, 0);
            }
        }
    }

    #[test]
    fn letter_order_puts_pause_last() {
        let mut ls = vec![
            Letter::PAUSE,
            Letter::inv(2),
            Letter::gen(2),
            Letter::inv(1),
            Letter::gen(1),
        ];
        ls.sort();
        assert_eq!(Word::lazy(ls).to_string(), "a1 A1 a2 A2 e");
        for o in 0..7 {
            assert_eq!(Letter::from_ordinal(o, 3).ordinal(3), o);
        }
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(v in proptest::collection::vec(prop_oneof![Just(1i16), Just(-1), Just(2), Just(-2), Just(3), Just(-3)], 0..40)) {
            let x = Word::from_signed(&v).unwrap();
            let red = free_reduce(&x).unwrap();
            prop_assert_eq!(free_reduce(&red).unwrap(), red.clone());
            prop_assert_eq!((x.len() - red.len()) % 2, 0);
            prop_assert_eq!(free_reduce(&x.concat(&x.inverse())).unwrap(), Word::empty());
        }

        #[test]
        fn display_parse_round_trip(v in proptest::collection::vec(-5i16..=5, 0..30)) {
            let x = Word::lazy(v.iter().map(|&i| Letter::from_signed(i)).collect());
            let back: Word = x.to_string().parse().unwrap();
            prop_assert_eq!(back.letters(), x.letters());
        }
    }
}
