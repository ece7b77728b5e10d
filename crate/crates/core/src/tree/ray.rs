//! Boundary points of the Cayley tree of `F_k`: infinite reduced rays.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::word::{Letter, ReducedWord};
use crate::error::{Error, Result};

/// An infinite reduced word, either eventually periodic `u v v v ...` or a
/// seeded pseudo-random stream distributed according to the uniform measure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryRay {
    EventuallyPeriodic {
        prefix: ReducedWord,
        period: ReducedWord,
    },
    Sampled {
        rank: usize,
        seed: u64,
        /// Letters generated eagerly; longer prefixes are regenerated from the seed.
        cached: Vec<Letter>,
    },
}

impl BoundaryRay {
    /// Canonical eventually periodic ray `prefix * period^infinity`.
    ///
    /// The result has the shortest possible prefix and a primitive, cyclically
    /// reduced period, so equal rays have equal representations.
    pub fn eventually_periodic(prefix: &ReducedWord, period: &ReducedWord) -> Result<Self> {
        let (core, conj) = period.cyclic_reduction();
        if core.is_empty() {
            return Err(Error::malformed(
                period.to_string(),
                "period reduces to the identity",
            ));
        }
        let mut head: Vec<Letter> = prefix.mul(&conj).letters().to_vec();
        let mut cycle: Vec<Letter> = core.letters().to_vec();
        // absorb cancellation between the prefix and the periodic tail
        while let Some(&last) = head.last() {
            if last == cycle[0].inverse() {
                head.pop();
                cycle.rotate_left(1);
            } else {
                break;
            }
        }
        // shortest prefix
        while let Some(&last) = head.last() {
            if last == *cycle.last().unwrap() {
                head.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        let n = cycle.len();
        let primitive = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| cycle[i] == cycle[i % d]))
            .unwrap_or(n);
        cycle.truncate(primitive);
        Ok(BoundaryRay::EventuallyPeriodic {
            prefix: ReducedWord::from_reduced_unchecked(head),
            period: ReducedWord::from_reduced_unchecked(cycle),
        })
    }

    /// Parses `u(v)` as `u v^infinity`, e.g. `(a)`, `b(a)`, `(ab)`.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let t = text.trim();
        let open = t
            .find('(')
            .ok_or_else(|| Error::malformed(t, "expected prefix(period)"))?;
        if !t.ends_with(')') {
            return Err(Error::malformed(t, "expected a closing ')'"));
        }
        let prefix = ReducedWord::parse(&t[..open], rank)?;
        let period = ReducedWord::parse(&t[open + 1..t.len() - 1], rank)?;
        Self::eventually_periodic(&prefix, &period)
    }

    /// Uniformly distributed random ray: first letter uniform over `2k` symbols,
    /// every later letter uniform over the `2k - 1` non-backtracking symbols.
    pub fn sample_uniform(rank: usize, seed: u64, length: usize) -> Result<Self> {
        if rank < 1 || rank > super::word::MAX_RANK {
            return Err(Error::InvalidParams(format!("unsupported rank {rank}")));
        }
        if length == 0 {
            return Err(Error::InvalidParams("sampled ray length must be >= 1".into()));
        }
        Ok(BoundaryRay::Sampled {
            rank,
            seed,
            cached: sampled_letters(rank, seed, length),
        })
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        match self {
            BoundaryRay::EventuallyPeriodic { prefix, period } => {
                let u = prefix.letters();
                let v = period.letters();
                (0..n)
                    .map(|i| if i < u.len() { u[i] } else { v[(i - u.len()) % v.len()] })
                    .collect()
            }
            BoundaryRay::Sampled {
                rank, seed, cached, ..
            } => {
                if n <= cached.len() {
                    cached[..n].to_vec()
                } else {
                    sampled_letters(*rank, *seed, n)
                }
            }
        }
    }

    pub fn prefix_word(&self, n: usize) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.prefix(n))
    }

    /// Length of the common prefix of `word` with the ray.
    pub fn common_prefix_len(&self, word: &ReducedWord) -> usize {
        word.common_prefix_len(&self.prefix(word.len()))
    }

    /// The ray `g * self`, as a finite prefix of requested length.
    pub fn translated_prefix(&self, g: &ReducedWord, n: usize) -> Vec<Letter> {
        // g * (first |g| + n letters) keeps at least n letters of the ray
        let head = g.mul(&self.prefix_word(g.len() + n));
        head.letters()[..n].to_vec()
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self, BoundaryRay::EventuallyPeriodic { .. })
    }
}

fn sampled_letters(rank: usize, seed: u64, length: usize) -> Vec<Letter> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Letter> = Vec::with_capacity(length);
    for i in 0..length {
        let letter = if i == 0 {
            Letter::from_index(rng.gen_range(0..2 * rank))
        } else {
            let forbidden = out[i - 1].inverse().index();
            let r = rng.gen_range(0..2 * rank - 1);
            Letter::from_index(if r >= forbidden { r + 1 } else { r })
        };
        out.push(letter);
    }
    out
}

impl fmt::Display for BoundaryRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryRay::EventuallyPeriodic { prefix, period } => {
                if !prefix.is_empty() {
                    write!(f, "{prefix}")?;
                }
                write!(f, "({period})")
            }
            BoundaryRay::Sampled { seed, .. } => {
                let head: String = self.prefix(12).iter().map(|l| l.to_char()).collect();
                write!(f, "{head}...[seed={seed}]")
            }
        }
    }
}

impl Serialize for BoundaryRay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
