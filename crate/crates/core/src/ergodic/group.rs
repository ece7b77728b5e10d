//! Normal forms and balls for `Z`, `Z^d`, `Z/n`, `F_k` and their direct products.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Letter, ReducedWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Integers,
    Cyclic(u64),
    Free(usize),
}

impl Factor {
    fn generator_count(self) -> usize {
        match self {
            Factor::Integers | Factor::Cyclic(_) => 1,
            Factor::Free(k) => k,
        }
    }

    fn is_finite(self) -> bool {
        matches!(self, Factor::Cyclic(_))
    }
}

/// A direct product of cyclic and free factors. Generators are named `a, b, c, ...`
/// across the factors in order; upper case letters are inverses.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Int(i64),
    Mod(u64),
    Word(ReducedWord),
}

/// A group element as one normal-form component per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<Component>);

/// Generator `index` of the group, or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub index: usize,
    pub inverse: bool,
}

impl Generator {
    pub fn symbol(self) -> char {
        let c = (b'a' + self.index as u8) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let spec = GroupSpec { factors };
        for f in &spec.factors {
            match *f {
                Factor::Cyclic(0) => {
                    return Err(Error::InvalidParams("Z/0 is not a finite cyclic group".into()))
                }
                Factor::Free(0) => return Err(Error::InvalidParams("F_0 is not supported".into())),
                _ => {}
            }
        }
        if spec.generator_count() > 26 {
            return Err(Error::InvalidParams("at most 26 generators are supported".into()));
        }
        Ok(spec)
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        GroupSpec { factors: vec![] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn generator_count(&self) -> usize {
        self.factors.iter().map(|f| f.generator_count()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|f| f.is_finite())
    }

    pub fn order(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, f| match *f {
            Factor::Cyclic(n) => acc.checked_mul(n),
            _ => None,
        })
    }

    /// `(factor, local generator)` of a global generator index.
    pub fn locate(&self, index: usize) -> Option<(usize, usize)> {
        let mut offset = 0;
        for (i, f) in self.factors.iter().enumerate() {
            let n = f.generator_count();
            if index < offset + n {
                return Some((i, index - offset));
            }
            offset += n;
        }
        None
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.generator_count()).flat_map(|index| {
            [false, true].map(move |inverse| Generator { index, inverse })
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(
            self.factors
                .iter()
                .map(|f| match f {
                    Factor::Integers => Component::Int(0),
                    Factor::Cyclic(_) => Component::Mod(0),
                    Factor::Free(_) => Component::Word(ReducedWord::identity()),
                })
                .collect(),
        )
    }

    /// `x * s` for a generator `s`.
    pub fn mul_generator(&self, x: &GroupElement, s: Generator) -> GroupElement {
        let (factor, local) = self.locate(s.index).expect("generator in range");
        let mut out = x.clone();
        out.0[factor] = match (&self.factors[factor], &x.0[factor]) {
            (Factor::Integers, Component::Int(n)) => Component::Int(n + if s.inverse { -1 } else { 1 }),
            (Factor::Cyclic(m), Component::Mod(k)) => {
                Component::Mod(if s.inverse { (k + m - 1) % m } else { (k + 1) % m })
            }
            (Factor::Free(_), Component::Word(w)) => {
                Component::Word(w.mul(&ReducedWord::reduce([Letter::new(local, s.inverse)])))
            }
            _ => unreachable!("component kinds follow the factors"),
        };
        out
    }

    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            self.factors
                .iter()
                .zip(x.0.iter().zip(&y.0))
                .map(|(f, pair)| match (f, pair) {
                    (Factor::Integers, (Component::Int(a), Component::Int(b))) => Component::Int(a + b),
                    (Factor::Cyclic(m), (Component::Mod(a), Component::Mod(b))) => Component::Mod((a + b) % m),
                    (Factor::Free(_), (Component::Word(a), Component::Word(b))) => Component::Word(a.mul(b)),
                    _ => unreachable!("component kinds follow the factors"),
                })
                .collect(),
        )
    }

    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            self.factors
                .iter()
                .zip(&x.0)
                .map(|(f, c)| match (f, c) {
                    (Factor::Integers, Component::Int(a)) => Component::Int(-a),
                    (Factor::Cyclic(m), Component::Mod(a)) => Component::Mod((m - a) % m),
                    (Factor::Free(_), Component::Word(w)) => Component::Word(w.inverse()),
                    _ => unreachable!("component kinds follow the factors"),
                })
                .collect(),
        )
    }

    /// Parses a word over the generator symbols. The empty string and `1` are the
    /// identity, and so is `e` while fewer than five generators exist.
    pub fn parse_word(&self, text: &str) -> Result<GroupElement> {
        let trimmed = text.trim();
        let mut x = self.identity();
        if trimmed == "1" || (trimmed == "e" && self.generator_count() < 5) {
            return Ok(x);
        }
        for c in trimmed.chars().filter(|c| !c.is_whitespace() && *c != '.') {
            let index = c.to_ascii_lowercase() as usize;
            let index = index.checked_sub('a' as usize).filter(|&i| c.is_ascii_alphabetic() && i < self.generator_count());
            match index {
                Some(index) => {
                    x = self.mul_generator(&x, Generator { index, inverse: c.is_ascii_uppercase() })
                }
                None => {
                    return Err(Error::malformed(
                        text,
                        format!("unknown generator symbol {c:?} for {self}"),
                    ))
                }
            }
        }
        Ok(x)
    }

    /// A word representing `x`, readable back by [`GroupSpec::parse_word`].
    pub fn to_word(&self, x: &GroupElement) -> String {
        let mut out = String::new();
        let mut offset = 0usize;
        for (f, c) in self.factors.iter().zip(&x.0) {
            let symbol = |local: usize, inverse: bool| {
                Generator {
                    index: offset + local,
                    inverse,
                }
                .symbol()
            };
            match c {
                Component::Int(n) => {
                    out.extend(std::iter::repeat(symbol(0, *n < 0)).take(n.unsigned_abs() as usize))
                }
                Component::Mod(k) => out.extend(std::iter::repeat(symbol(0, false)).take(*k as usize)),
                Component::Word(w) => {
                    out.extend(w.letters().iter().map(|l| symbol(l.generator(), l.is_inverse())))
                }
            }
            offset += f.generator_count();
        }
        if out.is_empty() {
            out.push(if self.generator_count() < 5 { 'e' } else { '1' });
        }
        out
    }

    /// `true` when `x` has infinite order.
    pub fn has_infinite_order(&self, x: &GroupElement) -> bool {
        x.0.iter().any(|c| match c {
            Component::Int(n) => *n != 0,
            Component::Mod(_) => false,
            Component::Word(w) => !w.is_empty(),
        })
    }

    /// Word-metric ball of radius `radius`, in breadth-first order (identity first);
    /// duplicate-free and inverse-closed. Fails with a capacity error beyond `cap`
    /// elements.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<Vec<GroupElement>> {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut frontier = 0;
        for _ in 0..radius {
            let end = out.len();
            for i in frontier..end {
                for s in self.generators() {
                    let y = self.mul_generator(&out[i], s);
                    if seen.insert(y.clone()) {
                        out.push(y);
                        if out.len() > cap {
                            return Err(Error::InvalidParams(format!(
                                "ball of radius {radius} in {self} exceeds {cap} elements"
                            )));
                        }
                    }
                }
            }
            if out.len() == end {
                break;
            }
            frontier = end;
        }
        Ok(out)
    }

    /// Largest radius `<= radius` whose ball holds at most `cap` elements, with that ball.
    pub fn ball_within_cap(&self, radius: usize, cap: usize) -> (usize, Vec<GroupElement>) {
        let mut best = (0, vec![self.identity()]);
        for r in 1..=radius {
            match self.ball(r, cap) {
                Ok(b) => {
                    let saturated = b.len() == best.1.len();
                    best = (r, b);
                    if saturated {
                        return (radius, best.1);
                    }
                }
                Err(_) => break,
            }
        }
        best
    }
}

impl GroupElement {
    pub fn components(&self) -> &[Component] {
        &self.0
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| match x {
                Factor::Integers => "Z".to_string(),
                Factor::Cyclic(n) => format!("Z/{n}"),
                Factor::Free(k) => format!("F{k}"),
            })
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `Z`, `Z^d`, `Z/n`, `Fk` (or `F_k`), `1`, joined by `x`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParams(format!("group {s:?}: {why}"));
        let mut factors = Vec::new();
        for part in s.split(['x', '×']).map(str::trim) {
            if part == "1" {
                continue;
            }
            if let Some(n) = part.strip_prefix("Z/") {
                let n: u64 = n.trim().parse().map_err(|_| bad("bad cyclic order"))?;
                factors.push(Factor::Cyclic(n));
            } else if let Some(d) = part.strip_prefix("Z^") {
                let d: usize = d.trim().parse().map_err(|_| bad("bad exponent"))?;
                factors.extend(std::iter::repeat(Factor::Integers).take(d));
            } else if part == "Z" {
                factors.push(Factor::Integers);
            } else if let Some(k) = part.strip_prefix('F') {
                let k: usize = k.trim_start_matches('_').parse().map_err(|_| bad("bad free rank"))?;
                factors.push(Factor::Free(k));
            } else {
                return Err(bad("unknown factor"));
            }
        }
        GroupSpec::new(factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(g("Z x Z/2").to_string(), "Z x Z/2");
        assert_eq!(g("Z^2").factors().len(), 2);
        assert_eq!(g("F_2").to_string(), "F2");
        assert_eq!(g("1").to_string(), "1");
        assert!("Q".parse::<GroupSpec>().is_err());
        assert!("Z/0".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn words_round_trip() {
        let grp = g("Z x Z/3 x F2");
        let x = grp.parse_word("aaBbcdCA").unwrap();
        assert_eq!(grp.to_word(&x), "acdC");
        assert_eq!(grp.parse_word(&grp.to_word(&x)).unwrap(), x);
        let y = grp.parse_word("dcA").unwrap();
        assert_eq!(grp.mul(&x, &grp.inverse(&x)), grp.identity());
        assert_eq!(grp.inverse(&grp.mul(&x, &y)), grp.mul(&grp.inverse(&y), &grp.inverse(&x)));
        assert!(grp.parse_word("f").is_err());
        assert_eq!(grp.parse_word("e").unwrap(), grp.identity());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(g("Z").ball(3, 100).unwrap().len(), 7);
        assert_eq!(g("Z^2").ball(2, 100).unwrap().len(), 13);
        assert_eq!(g("Z/5").ball(10, 100).unwrap().len(), 5);
        assert_eq!(g("Z x Z/2").ball(1, 100).unwrap().len(), 4);
        // free group: 1 + 2k((2k-1)^R - 1)/(2k-2)
        assert_eq!(g("F2").ball(3, 1000).unwrap().len(), 53);
        assert_eq!(g("1").ball(4, 10).unwrap().len(), 1);
        assert!(g("F2").ball(10, 1000).is_err());
    }

    #[test]
    fn balls_are_inverse_closed_and_duplicate_free() {
        for grp in [g("Z x Z/2"), g("F2"), g("Z^2 x Z/3")] {
            let ball = grp.ball(3, 10_000).unwrap();
            let set: HashSet<_> = ball.iter().cloned().collect();
            assert_eq!(set.len(), ball.len());
            assert!(ball.iter().all(|x| set.contains(&grp.inverse(x))));
        }
    }

    #[test]
    fn capped_ball_reports_reached_radius() {
        let (r, ball) = g("F2").ball_within_cap(50, 200);
        assert_eq!((r, ball.len()), (4, 161));
        let (r, ball) = g("Z/4").ball_within_cap(50, 200);
        assert_eq!((r, ball.len()), (50, 4));
    }
}
