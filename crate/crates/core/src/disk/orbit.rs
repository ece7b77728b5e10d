use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;

use super::mobius::MobiusMap;
use super::presets::{from_sl2r, GroupPreset, PresetName};
use crate::error::{Error, Result};

pub const DEFAULT_BALL_CAP: usize = 2_000_000;

const RADIUS_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct OrbitElement {
    pub map: MobiusMap,
    /// Generator word found by the search (`e` for the identity).
    pub word: String,
    /// `d(0, g(0))`.
    pub displacement: f64,
}

/// Group elements `g` with `d(0, g(0)) <= radius`, sorted by displacement.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitBall {
    pub preset: PresetName,
    pub radius: f64,
    pub elements: Vec<OrbitElement>,
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements with displacement at most `radius`.
    pub fn within(&self, radius: f64) -> &[OrbitElement] {
        let end = self
            .elements
            .partition_point(|e| e.displacement <= radius + RADIUS_SLACK);
        &self.elements[..end]
    }

    pub fn iter(&self) -> impl Iterator<Item = &OrbitElement> {
        self.elements.iter()
    }
}

fn canonical_sign(m: [i64; 4]) -> [i64; 4] {
    let first = m.iter().copied().find(|&x| x != 0).unwrap_or(1);
    if first < 0 {
        m.map(|x| -x)
    } else {
        m
    }
}

fn int_mul(x: [i64; 4], y: [i64; 4]) -> Result<[i64; 4]> {
    let dot = |p: i64, q: i64, r: i64, s: i64| {
        p.checked_mul(q)
            .zip(r.checked_mul(s))
            .and_then(|(u, v)| u.checked_add(v))
            .ok_or_else(|| Error::Overflow("integer matrix entries exceed i64".into()))
    };
    Ok([
        dot(x[0], y[0], x[1], y[2])?,
        dot(x[0], y[1], x[1], y[3])?,
        dot(x[2], y[0], x[3], y[2])?,
        dot(x[2], y[1], x[3], y[3])?,
    ])
}

/// Breadth-first enumeration of the orbit ball, expanding only elements inside the
/// ball. For both presets the generators are the side pairings of the Dirichlet
/// domain at `0`, which makes the pruned search complete: every prefix of the tile
/// path along the geodesic `[0, g(0)]` is at most as far from `0` as `g(0)`.
///
/// Duplicates are detected at group level: integer matrices up to sign for arithmetic
/// presets, non-backtracking words otherwise (the ping-pong check makes Schottky
/// groups free). Floating matrices are not compared: at displacement `d` their
/// entries carry rounding errors of order `e^{d/2}` ulps.
pub fn orbit_ball(preset: &GroupPreset, radius: f64, cap: usize) -> Result<OrbitBall> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParams(format!("orbit radius {radius} must be positive")));
    }
    let mut elements = vec![OrbitElement {
        map: MobiusMap::IDENTITY,
        word: String::new(),
        displacement: 0.0,
    }];
    // per element: last generator used and (for arithmetic presets) its integer matrix
    let mut last: Vec<Option<usize>> = vec![None];
    let mut integer: Vec<[i64; 4]> = vec![[1, 0, 0, 1]];
    let mut seen: HashSet<[i64; 4]> = HashSet::from([[1, 0, 0, 1]]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (j, label) in preset.labels.iter().enumerate() {
            if last[i] == Some(preset.inverse_of[j]) {
                continue;
            }
            let (map, matrix) = match &preset.integer_generators {
                Some(gens) => {
                    let m = canonical_sign(int_mul(integer[i], gens[j])?);
                    if seen.contains(&m) {
                        continue;
                    }
                    let [a, b, c, d] = m;
                    (from_sl2r(a as f64, b as f64, c as f64, d as f64)?, m)
                }
                None => (elements[i].map.compose(&preset.generators[j]), [0; 4]),
            };
            let displacement = map.displacement();
            if displacement > radius + RADIUS_SLACK {
                continue;
            }
            if preset.integer_generators.is_some() {
                seen.insert(matrix);
            }
            let mut word = elements[i].word.clone();
            word.push(*label);
            queue.push_back(elements.len());
            last.push(Some(j));
            integer.push(matrix);
            elements.push(OrbitElement {
                map,
                word,
                displacement,
            });
            if elements.len() > cap {
                return Err(Error::Capacity {
                    limit: cap,
                    partial: Box::new(finish(preset.name, radius, elements)),
                });
            }
        }
    }
    Ok(finish(preset.name, radius, elements))
}

fn finish(preset: PresetName, radius: f64, mut elements: Vec<OrbitElement>) -> OrbitBall {
    for e in &mut elements {
        if e.word.is_empty() {
            e.word.push('e');
        }
    }
    elements.sort_by(|x, y| x.displacement.total_cmp(&y.displacement));
    OrbitBall {
        preset,
        radius,
        elements,
    }
}

/// Exact size of the modular-group ball of radius `radius` about `2i`, by integer
/// enumeration: `cosh d(2i, g 2i) = (a^2 + b^2/4 + 4c^2 + d^2) / 2` for
/// `g = (a b; c d)`, counted up to sign.
pub fn psl2z_exact_ball_size(radius: f64) -> u64 {
    let bound = (8.0 * radius.cosh() + 1e-6).floor() as i128;
    let mut count: u64 = 0;
    let a_max = ((bound / 4) as f64).sqrt() as i128 + 1;
    let c_max = ((bound / 16) as f64).sqrt() as i128 + 1;
    for a in -a_max..=a_max {
        for c in -c_max..=c_max {
            let rest = bound - 4 * a * a - 16 * c * c;
            if rest < 0 || a.gcd(&c) != 1 {
                continue;
            }
            // a d0 - b0 c = 1
            let eg = a.extended_gcd(&c);
            let (d0, b0) = (eg.x * eg.gcd, -eg.y * eg.gcd);
            debug_assert_eq!(a * d0 - b0 * c, 1);
            let f = |k: i128| {
                let b = b0 + k * a;
                let d = d0 + k * c;
                b * b + 4 * d * d - rest
            };
            let qa = (a * a + 4 * c * c) as f64;
            let qb = (2 * (a * b0 + 4 * c * d0)) as f64;
            let centre = (-qb / (2.0 * qa)).round() as i128;
            if f(centre) > 0 && f(centre - 1) > 0 && f(centre + 1) > 0 {
                continue;
            }
            let start = [centre - 1, centre, centre + 1]
                .into_iter()
                .find(|&k| f(k) <= 0)
                .expect("checked above");
            let mut lo = start;
            while f(lo - 1) <= 0 {
                lo -= 1;
            }
            let mut hi = start;
            while f(hi + 1) <= 0 {
                hi += 1;
            }
            count += (hi - lo + 1) as u64;
        }
    }
    count / 2
}
