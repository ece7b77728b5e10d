//! Letters and freely reduced words of the free group `F_k`.
//!
//! Generators are written `a, b, c, ...` and their inverses `A, B, C, ...`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported rank; keeps the ASCII alphabet unambiguous.
pub const MAX_RANK: usize = 26;

/// A generator or inverse generator, packed as `2 * generator + inverted`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverted: bool) -> Self {
        assert!(generator < MAX_RANK, "generator index {generator} out of range");
        Letter((2 * generator + usize::from(inverted)) as u8)
    }

    /// Letter with the given packed index in `0..2k`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < 2 * MAX_RANK);
        Letter(index as u8)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }

    pub fn from_char(c: char, rank: usize) -> Option<Self> {
        let (generator, inverted) = match c {
            'a'..='z' => (c as usize - 'a' as usize, false),
            'A'..='Z' => (c as usize - 'A' as usize, true),
            _ => return None,
        };
        (generator < rank).then(|| Letter::new(generator, inverted))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// All `2k` letters of `F_k` in packed-index order `a, A, b, B, ...`.
pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> {
    (0..2 * rank).map(Letter::from_index)
}

/// A freely reduced word: no letter is adjacent to its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord { letters: out }
    }

    /// Wraps letters that are already known to be reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        ReducedWord { letters }
    }

    /// Parses ASCII letters over the rank-`k` alphabet and reduces them.
    /// Whitespace, `.` and `*` are ignored; `e` alone (or the empty string) is the identity
    /// when the rank is below 5.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::malformed(text, format!("unsupported rank {rank}")));
        }
        let trimmed = text.trim();
        if trimmed == "1" || trimmed == "ε" || (trimmed == "e" && rank < 5) {
            return Ok(Self::identity());
        }
        let mut letters = Vec::with_capacity(trimmed.len());
        for c in trimmed.chars() {
            if c.is_whitespace() || c == '.' || c == '*' {
                continue;
            }
            match Letter::from_char(c, rank) {
                Some(l) => letters.push(l),
                None => {
                    return Err(Error::malformed(
                        text,
                        format!("symbol {c:?} is not a letter of F_{rank}"),
                    ))
                }
            }
        }
        Ok(Self::reduce(letters))
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

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Group product `self * other`.
    pub fn mul(&self, other: &ReducedWord) -> Self {
        let mut keep = self.letters.len();
        let mut skip = 0;
        while keep > 0
            && skip < other.letters.len()
            && self.letters[keep - 1] == other.letters[skip].inverse()
        {
            keep -= 1;
            skip += 1;
        }
        let mut letters = Vec::with_capacity(keep + other.letters.len() - skip);
        letters.extend_from_slice(&self.letters[..keep]);
        letters.extend_from_slice(&other.letters[skip..]);
        ReducedWord { letters }
    }

    pub fn pow(&self, exponent: i64) -> Self {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = ReducedWord::identity();
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Length of the longest common prefix with a letter sequence.
    pub fn common_prefix_len(&self, other: &[Letter]) -> usize {
        self.letters
            .iter()
            .zip(other)
            .take_while(|(x, y)| x == y)
            .count()
    }

    /// Cyclically reduced core `c` and conjugator `w` with `self = w c w^-1`.
    pub fn cyclic_reduction(&self) -> (ReducedWord, ReducedWord) {
        let n = self.letters.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i] == self.letters[n - 1 - i].inverse() {
            i += 1;
        }
        (
            ReducedWord {
                letters: self.letters[i..n - i].to_vec(),
            },
            ReducedWord {
                letters: self.letters[..i].to_vec(),
            },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Shortlex order: by length, then letter-wise by packed index.
pub fn shortlex(a: &ReducedWord, b: &ReducedWord) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.letters.cmp(&b.letters))
}
