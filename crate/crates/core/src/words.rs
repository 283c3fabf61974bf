//! Reduced words in a free group on named generators.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }

    /// Position in the alphabet order `a, A, b, B, ...`.
    pub fn code(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }

    pub fn from_code(code: usize) -> Self {
        Self { generator: code / 2, inverse: code % 2 == 1 }
    }
}

/// Freely reduced word. Construction always reduces, so adjacent
/// letter/inverse pairs never occur.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        Self { letters: vec![Letter::new(generator, inverse)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Self {
        Self::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `v w v⁻¹`.
    pub fn conjugate_by(&self, v: &Word) -> Self {
        v.concat(self).concat(&v.inverse())
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inv())
    }

    /// Splits `w = u c u⁻¹` with `c` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        while l.len() >= 2 * (i + 1) && l[i] == l[l.len() - 1 - i].inv() {
            i += 1;
        }
        (
            Word { letters: l[..i].to_vec() },
            Word { letters: l[i..l.len() - i].to_vec() },
        )
    }

    /// Returns `(r, m)` with `w = r^m`, `m ≥ 1` and `r` not a proper power.
    /// Two nontrivial words have the same attracting fixed point in every
    /// boundary exactly when their roots agree.
    pub fn primitive_root(&self) -> (Word, usize) {
        if self.is_empty() {
            return (Word::identity(), 1);
        }
        let (u, c) = self.cyclic_reduction();
        let n = c.len();
        for p in 1..=n {
            if n % p == 0 && (0..n).all(|i| c.letters[i] == c.letters[i % p]) {
                let r = Word { letters: c.letters[..p].to_vec() };
                return (r.conjugate_by(&u), n / p);
            }
        }
        unreachable!("p = n always matches")
    }
}

impl Ord for Word {
    /// Length first, then lexicographic in letter codes.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters
                .iter()
                .map(|l| l.code())
                .cmp(other.letters.iter().map(|l| l.code()))
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Generator names. A name is lowercase ASCII alphanumeric starting with a
/// letter; its inverse is written in uppercase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidArgument("alphabet is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
            if !ok {
                return Err(Error::InvalidArgument(format!("bad generator name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate generator `{n}`")));
            }
        }
        Ok(Self { names })
    }

    /// `a, b, c, ...` for `rank ≤ 26`.
    pub fn standard(rank: usize) -> Self {
        assert!((1..=26).contains(&rank));
        Self { names: (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect() }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let n = &self.names[l.generator];
        if l.inverse {
            n.to_ascii_uppercase()
        } else {
            n.clone()
        }
    }

    /// Renders `w` as dot-separated letters, `e` for the identity.
    pub fn format(&self, w: &Word) -> String {
        if w.is_empty() {
            return "e".into();
        }
        w.letters().iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(".")
    }

    pub fn parse(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split('.') {
            let (tok, forced_inv) = match tok.strip_suffix("^-1") {
                Some(t) => (t, true),
                None => (tok, false),
            };
            let lower = tok.to_ascii_lowercase();
            let g = self
                .names
                .iter()
                .position(|n| *n == lower)
                .ok_or_else(|| Error::UnknownLetter(tok.to_string()))?;
            let upper = tok != lower;
            letters.push(Letter::new(g, upper ^ forced_inv));
        }
        Ok(Word::new(letters))
    }
}

pub struct WordDisplay<'a>(pub &'a Alphabet, pub &'a Word);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}

/// Number of reduced words of length `1..=max_len` on `rank` free generators.
pub fn reduced_word_count(rank: usize, max_len: usize) -> u64 {
    let two_r = 2 * rank as u64;
    let mut total: u64 = 0;
    let mut layer = two_r;
    for _ in 0..max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(two_r.saturating_sub(1).max(1));
    }
    total
}

/// Default hard cap on enumerated words.
pub const WORD_CAP: u64 = 1_000_000;

/// All reduced words of length `1..=max_len`, ordered by length and then
/// lexicographically in the alphabet order `a, A, b, B, ...`.
pub fn enumerate_words(rank: usize, max_len: usize, cap: u64) -> Result<Vec<Word>> {
    if max_len == 0 || rank == 0 {
        return Err(Error::InvalidArgument("rank and max length must be positive".into()));
    }
    let count = reduced_word_count(rank, max_len);
    if count > cap {
        return Err(Error::WordBudget { count, cap });
    }
    let mut out: Vec<Word> = Vec::with_capacity(count as usize);
    let mut layer: Vec<Word> = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * (2 * rank));
        for w in &layer {
            let last = w.letters.last().copied();
            for code in 0..2 * rank {
                let l = Letter::from_code(code);
                if last == Some(l.inv()) {
                    continue;
                }
                let mut letters = w.letters.clone();
                letters.push(l);
                next.push(Word { letters });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// Uniform random reduced word of length `len` on `rank` generators.
pub fn random_word(rank: usize, len: usize, rng: &mut impl rand::Rng) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_code(rng.random_range(0..2 * rank));
        if letters.last() != Some(&l.inv()) {
            letters.push(l);
        }
    }
    Word { letters }
}
