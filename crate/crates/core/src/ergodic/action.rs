//! Countable weighted actions: a group acting by translations on copies of `Z` or
//! `Z/m`, with exact rational atom weights.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::group::{Component, Factor, Generator, GroupElement, GroupSpec};
use crate::error::{Error, Result};

/// Exact rational read from JSON as `"p/q"`, `"p"` or an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Rational(BigRational::from_integer(n.into()))),
            Raw::Text(t) => BigRational::from_str(t.trim())
                .map(Rational)
                .map_err(|_| serde::de::Error::custom(format!("{t:?} is not a rational number"))),
        }
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Closed-form atom weights from a fixed catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `scale * ratio^|n|` on `Z`.
    Geometric { scale: Rational, ratio: Rational },
    /// `scale / (1 + |n|)^power` on `Z`.
    Polynomial { scale: Rational, power: u32 },
    /// `scale` on every atom of a finite space.
    UniformFinite { scale: Rational },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default = "one_copy")]
    pub copies: usize,
    /// Positions in `Z/modulus` instead of `Z`.
    #[serde(default)]
    pub modulus: Option<u64>,
}

fn one_copy() -> usize {
    1
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec {
            copies: 1,
            modulus: None,
        }
    }
}

/// JSON description of an action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    /// e.g. `"Z"`, `"Z^2"`, `"Z x Z/2"`, `"F2"`.
    pub group: String,
    #[serde(default)]
    pub space: SpaceSpec,
    /// Translation of each generator; defaults to 1 on generators of infinite
    /// factors (on all generators when the group is finite) and 0 otherwise.
    #[serde(default)]
    pub shifts: Option<Vec<i64>>,
    pub weights: WeightSpec,
    /// Declares `m(gx) = m(x)`; checked.
    #[serde(default)]
    pub invariant: bool,
    /// Declares total mass 1; checked exactly.
    #[serde(default)]
    pub normalized: bool,
    /// Multiplies every weight by a hashed factor in `{1/2, 3/4, ..., 2}`.
    #[serde(default)]
    pub reweight_seed: Option<u64>,
}

/// A point `(copy, position)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub copy: usize,
    pub pos: i64,
}

/// `0, -1, 1, -2, 2, ...`
pub fn zigzag(n: i64) -> u64 {
    if n >= 0 {
        2 * n as u64
    } else {
        2 * n.unsigned_abs() - 1
    }
}

impl Point {
    pub fn new(copy: usize, pos: i64) -> Self {
        Point { copy, pos }
    }

    fn key(&self) -> (usize, u64) {
        (self.copy, zigzag(self.pos))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "{}", self.pos)
        } else {
            write!(f, "{}:{}", self.copy, self.pos)
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Point {
    type Err = Error;

    /// `"5"` (copy 0) or `"1:5"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("{s:?} is not a point label"));
        match s.trim().split_once(':') {
            Some((c, p)) => Ok(Point::new(
                c.trim().parse().map_err(|_| bad())?,
                p.trim().parse().map_err(|_| bad())?,
            )),
            None => Ok(Point::new(0, s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// Size of the stabilizer of a point, decided exactly from the group structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "order")]
pub enum StabilizerClass {
    Trivial,
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug)]
enum Weights {
    Geometric { scale: BigRational, ratio: BigRational },
    Polynomial { scale: BigRational, power: u32 },
    Uniform { scale: BigRational },
}

/// The atomic measured action `G -> Sym(X)` described by an [`ActionSpec`].
#[derive(Clone, Debug)]
pub struct CountableWeightedAction {
    spec: ActionSpec,
    group: GroupSpec,
    shifts: Vec<i64>,
    offsets: Vec<usize>,
    weights: Weights,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl CountableWeightedAction {
    pub fn new(spec: ActionSpec) -> Result<Self> {
        let group: GroupSpec = spec.group.parse()?;
        let bad = |why: String| Err(Error::InvalidAction(why));
        if spec.space.copies == 0 {
            return bad("space needs at least one copy".into());
        }
        if spec.space.modulus == Some(0) {
            return bad("modulus must be positive".into());
        }
        let shifts = match &spec.shifts {
            Some(s) => s.clone(),
            None => {
                let finite = group.is_finite();
                let mut s = Vec::new();
                for f in group.factors() {
                    let n = match f {
                        Factor::Free(k) => *k,
                        _ => 1,
                    };
                    let shift = i64::from(finite || !matches!(f, Factor::Cyclic(_)));
                    s.extend(std::iter::repeat(shift).take(n));
                }
                s
            }
        };
        if shifts.len() != group.generator_count() {
            return bad(format!(
                "{} shifts given for {} generators",
                shifts.len(),
                group.generator_count()
            ));
        }
        let mut offsets = Vec::new();
        let mut offset = 0;
        for f in group.factors() {
            offsets.push(offset);
            if let Factor::Cyclic(n) = f {
                // the shift must be killed by the order of the generator
                let image = (shifts[offset] as i128) * (*n as i128);
                let ok = match spec.space.modulus {
                    None => shifts[offset] == 0,
                    Some(m) => image.rem_euclid(m as i128) == 0,
                };
                if !ok {
                    return bad(format!(
                        "shift {} of the Z/{n} generator is not a homomorphism into the space",
                        shifts[offset]
                    ));
                }
            }
            offset += match f {
                Factor::Free(k) => *k,
                _ => 1,
            };
        }
        let positive = |x: &Rational, what: &str| -> Result<BigRational> {
            if x.0.is_positive() {
                Ok(x.0.clone())
            } else {
                Err(Error::InvalidParams(format!("{what} must be positive")))
            }
        };
        let weights = match &spec.weights {
            WeightSpec::Geometric { scale, ratio } => {
                let ratio = positive(ratio, "geometric ratio")?;
                if ratio >= BigRational::one() {
                    return Err(Error::InvalidParams("geometric ratio must be below 1 (summable weights)".into()));
                }
                if spec.space.modulus.is_some() {
                    return Err(Error::InvalidParams("geometric weights need positions in Z".into()));
                }
                Weights::Geometric {
                    scale: positive(scale, "scale")?,
                    ratio,
                }
            }
            WeightSpec::Polynomial { scale, power } => {
                if *power < 2 {
                    return Err(Error::InvalidParams("polynomial power must be at least 2 (summable weights)".into()));
                }
                if spec.space.modulus.is_some() {
                    return Err(Error::InvalidParams("polynomial weights need positions in Z".into()));
                }
                Weights::Polynomial {
                    scale: positive(scale, "scale")?,
                    power: *power,
                }
            }
            WeightSpec::UniformFinite { scale } => {
                if spec.space.modulus.is_none() {
                    return Err(Error::InvalidParams("uniform weights need a finite space".into()));
                }
                Weights::Uniform {
                    scale: positive(scale, "scale")?,
                }
            }
        };
        Ok(CountableWeightedAction {
            spec,
            group,
            shifts,
            offsets,
            weights,
        })
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn modulus(&self) -> Option<u64> {
        self.spec.space.modulus
    }

    pub fn copies(&self) -> usize {
        self.spec.space.copies
    }

    pub fn is_reweighted(&self) -> bool {
        self.spec.reweight_seed.is_some()
    }

    fn normalize(&self, pos: i64) -> i64 {
        match self.modulus() {
            Some(m) => pos.rem_euclid(m as i64),
            None => pos,
        }
    }

    /// Validates a point label against the space.
    pub fn point(&self, copy: usize, pos: i64) -> Result<Point> {
        if copy >= self.copies() {
            return Err(Error::InvalidParams(format!("copy {copy} does not exist")));
        }
        if let Some(m) = self.modulus() {
            if pos < 0 || pos >= m as i64 {
                return Err(Error::InvalidParams(format!("position {pos} outside Z/{m}")));
            }
        }
        Ok(Point::new(copy, pos))
    }

    /// Translation amount `phi(g)` of a group element.
    pub fn translation(&self, g: &GroupElement) -> i64 {
        let mut total: i64 = 0;
        for ((f, c), &offset) in self.group.factors().iter().zip(g.components()).zip(&self.offsets) {
            let add = match (f, c) {
                (Factor::Integers, Component::Int(n)) => n * self.shifts[offset],
                (Factor::Cyclic(_), Component::Mod(k)) => *k as i64 * self.shifts[offset],
                (Factor::Free(_), Component::Word(w)) => w
                    .letters()
                    .iter()
                    .map(|l| {
                        let s = self.shifts[offset + l.generator()];
                        if l.is_inverse() {
                            -s
                        } else {
                            s
                        }
                    })
                    .sum(),
                _ => unreachable!("component kinds follow the factors"),
            };
            total += add;
        }
        self.normalize(total)
    }

    pub fn generator_shift(&self, s: Generator) -> i64 {
        let v = self.shifts[s.index];
        if s.inverse {
            -v
        } else {
            v
        }
    }

    pub fn act(&self, g: &GroupElement, x: &Point) -> Point {
        Point::new(x.copy, self.normalize(x.pos + self.translation(g)))
    }

    pub fn act_generator(&self, s: Generator, x: &Point) -> Point {
        Point::new(x.copy, self.normalize(x.pos + self.generator_shift(s)))
    }

    /// Hashed factor `u(x) in {1/2, 3/4, ..., 2}`.
    pub fn reweight_factor(&self, x: &Point) -> BigRational {
        match self.spec.reweight_seed {
            None => BigRational::one(),
            Some(seed) => {
                let h = splitmix(seed ^ splitmix(x.copy as u64 ^ splitmix(x.pos as u64)));
                BigRational::new(BigInt::from(2 + h % 7), BigInt::from(4))
            }
        }
    }

    fn base_weight(&self, x: &Point) -> BigRational {
        match &self.weights {
            Weights::Geometric { scale, ratio } => scale * Pow::pow(ratio, x.pos.unsigned_abs() as u32),
            Weights::Polynomial { scale, power } => {
                scale / Pow::pow(q(1 + x.pos.abs()), *power)
            }
            Weights::Uniform { scale } => scale.clone(),
        }
    }

    /// Atom mass `m(x)`.
    pub fn weight(&self, x: &Point) -> BigRational {
        self.base_weight(x) * self.reweight_factor(x)
    }

    fn reweight_bound(&self) -> BigRational {
        if self.is_reweighted() {
            q(2)
        } else {
            BigRational::one()
        }
    }

    /// Upper bound for `m(y)` over all `y` with `|pos| > rho` (infinite spaces).
    pub fn sup_beyond(&self, rho: u64) -> BigRational {
        let b = self.reweight_bound();
        match &self.weights {
            Weights::Geometric { scale, ratio } => b * scale * Pow::pow(ratio, (rho + 1) as u32),
            Weights::Polynomial { scale, power } => {
                b * scale / Pow::pow(BigRational::from_integer(BigInt::from(rho + 2)), *power)
            }
            Weights::Uniform { .. } => BigRational::zero(),
        }
    }

    /// Upper bound for the total mass of `{y : |pos| > rho}` in one copy.
    pub fn tail_beyond(&self, rho: u64) -> BigRational {
        let b = self.reweight_bound();
        match &self.weights {
            Weights::Geometric { scale, ratio } => {
                b * q(2) * scale * Pow::pow(ratio, (rho + 1) as u32) / (BigRational::one() - ratio)
            }
            Weights::Polynomial { scale, power } => {
                // 2 * integral_rho^inf scale (1+x)^-p dx
                let base = BigRational::from_integer(BigInt::from(rho + 1));
                b * q(2) * scale / (Pow::pow(base, power - 1) * q(*power as i64 - 1))
            }
            Weights::Uniform { .. } => BigRational::zero(),
        }
    }

    /// Gap between consecutive points of an orbit (0: orbits are single points).
    pub fn orbit_step(&self) -> u64 {
        let g = self
            .shifts
            .iter()
            .fold(0u64, |acc, &s| acc.gcd(&s.unsigned_abs()));
        match self.modulus() {
            Some(m) => g.gcd(&m),
            None => g,
        }
    }

    /// Minimal canonical label of the orbit of `x`.
    pub fn orbit_representative(&self, x: &Point) -> Point {
        let step = self.orbit_step() as i64;
        if step == 0 {
            return *x;
        }
        let r = x.pos.rem_euclid(step);
        match self.modulus() {
            Some(_) => Point::new(x.copy, r),
            None => {
                let a = Point::new(x.copy, r);
                let b = Point::new(x.copy, r - step);
                if r > 0 && b < a {
                    b
                } else {
                    a
                }
            }
        }
    }

    /// Number of points in each orbit, when finite.
    pub fn orbit_size(&self) -> Option<u64> {
        let step = self.orbit_step();
        match self.modulus() {
            Some(m) => Some(m / step),
            None if step == 0 => Some(1),
            None => None,
        }
    }

    /// All points of the (finite) orbit of `x`, in canonical order.
    pub fn finite_orbit(&self, x: &Point) -> Option<Vec<Point>> {
        let size = self.orbit_size()?;
        let step = self.orbit_step() as i64;
        let mut pts: Vec<Point> = (0..size as i64)
            .map(|k| Point::new(x.copy, self.normalize(x.pos + k * step)))
            .collect();
        pts.sort();
        Some(pts)
    }

    /// Exact `sum_{y in Gx} m(y)` when a closed form exists.
    pub fn orbit_mass_exact(&self, x: &Point) -> Option<BigRational> {
        if let Some(points) = self.finite_orbit(x) {
            return Some(points.iter().map(|p| self.weight(p)).sum());
        }
        if self.is_reweighted() {
            return None;
        }
        match &self.weights {
            Weights::Geometric { scale, ratio } => {
                let g = self.orbit_step();
                let r0 = x.pos.rem_euclid(g as i64) as u32;
                let one = BigRational::one();
                let num = Pow::pow(ratio, r0) + Pow::pow(ratio, g as u32 - r0);
                Some(scale * num / (one - Pow::pow(ratio, g as u32)))
            }
            _ => None,
        }
    }

    /// Exact stabilizer size. The stabilizer of every point is `ker(phi)`.
    pub fn stabilizer(&self) -> StabilizerClass {
        match self.modulus() {
            Some(m) => match self.group.order() {
                None => StabilizerClass::Infinite,
                Some(order) => {
                    let image = m / self.orbit_step();
                    match order / image {
                        1 => StabilizerClass::Trivial,
                        n => StabilizerClass::Finite(n),
                    }
                }
            },
            None => {
                let mut free_rank = 0usize;
                let mut rank_one_shift = 0i64;
                let mut torsion = 1u64;
                for (f, &offset) in self.group.factors().iter().zip(&self.offsets) {
                    match f {
                        Factor::Free(k) if *k >= 2 => return StabilizerClass::Infinite,
                        Factor::Integers | Factor::Free(_) => {
                            free_rank += 1;
                            rank_one_shift = self.shifts[offset];
                        }
                        Factor::Cyclic(n) => torsion *= n,
                    }
                }
                if free_rank >= 2 || (free_rank == 1 && rank_one_shift == 0) {
                    StabilizerClass::Infinite
                } else if torsion == 1 {
                    StabilizerClass::Trivial
                } else {
                    StabilizerClass::Finite(torsion)
                }
            }
        }
    }

    /// Points with `|pos| <= window` in every copy (all points of finite spaces).
    pub fn window(&self, window: u64) -> Vec<Point> {
        let mut pts = Vec::new();
        for copy in 0..self.copies() {
            match self.modulus() {
                Some(m) => pts.extend((0..m as i64).map(|p| Point::new(copy, p))),
                None => pts.extend((-(window as i64)..=window as i64).map(|p| Point::new(copy, p))),
            }
        }
        pts.sort();
        pts
    }

    /// Checks the declared properties on the window: generators act bijectively,
    /// weights are invariant if so declared, and the total mass is one if so declared.
    pub fn check_declarations(&self, window: u64) -> Result<()> {
        let pts = self.window(window);
        for x in &pts {
            for s in self.group.generators() {
                let y = self.act_generator(s, x);
                let back = self.act_generator(Generator { inverse: !s.inverse, ..s }, &y);
                if back != *x {
                    return Err(Error::InvariantViolation(format!(
                        "generator {} is not inverted by {} at {x}",
                        s.symbol(),
                        Generator { inverse: !s.inverse, ..s }.symbol()
                    )));
                }
                if self.spec.invariant && self.weight(&y) != self.weight(x) {
                    return Err(Error::InvariantViolation(format!(
                        "weights declared invariant but m({y}) = {} differs from m({x}) = {} under {}",
                        self.weight(&y),
                        self.weight(x),
                        s.symbol()
                    )));
                }
            }
        }
        if self.spec.normalized {
            let total = self.total_mass().ok_or_else(|| {
                Error::InvalidParams("normalization cannot be checked exactly for these weights".into())
            })?;
            if total != BigRational::one() {
                return Err(Error::InvariantViolation(format!(
                    "weights declared normalized but the total mass is {total}"
                )));
            }
        }
        Ok(())
    }

    /// Exact total mass of the space, when a closed form exists.
    pub fn total_mass(&self) -> Option<BigRational> {
        let copies = q(self.copies() as i64);
        if let Some(m) = self.modulus() {
            let pts = self.window(0);
            debug_assert_eq!(pts.len() as u64, m * self.copies() as u64);
            return Some(pts.iter().map(|p| self.weight(p)).sum());
        }
        if self.is_reweighted() {
            return None;
        }
        match &self.weights {
            Weights::Geometric { scale, ratio } => {
                let one = BigRational::one();
                Some(copies * scale * (&one + ratio) / (one - ratio))
            }
            _ => None,
        }
    }
}
