//! Geometry-agnostic quantities on Gromov hyperbolic spaces: Gromov products,
//! empirical hyperbolicity constants, Busemann quasi-cocycles and horoballs.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// A hyperbolic space with a basepoint and a way to approach boundary points.
pub trait SpaceModel: Sync {
    type Point: Clone + Send + Sync;
    type Boundary: Clone + Send + Sync;

    fn basepoint(&self) -> Self::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Interior points `z_n` converging to `omega`, with `d(o, z_n) -> infinity`.
    fn boundary_approach(&self, omega: &Self::Boundary, n: usize) -> Result<Self::Point>;

    /// Closed-form Busemann cocycle, when the model has one.
    fn exact_busemann(
        &self,
        _omega: &Self::Boundary,
        _x: &Self::Point,
        _y: &Self::Point,
    ) -> Option<Result<f64>> {
        None
    }

    /// Declared hyperbolicity constant.
    fn delta(&self) -> f64;

    /// Declared quasi-cocycle defect bound `C`; zero for exact cocycles.
    fn defect(&self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "depth")]
pub enum Exactness {
    Exact,
    /// limsup surrogate over the approach window `[depth, 2 depth]`
    ApproximatedAtDepth(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BusemannValue {
    pub value: f64,
    pub exactness: Exactness,
}

/// `(x|y)_o = (d(o,x) + d(o,y) - d(x,y)) / 2`.
pub fn gromov_product<M: SpaceModel>(model: &M, x: &M::Point, y: &M::Point, o: &M::Point) -> f64 {
    0.5 * (model.distance(o, x) + model.distance(o, y) - model.distance(x, y))
}

/// Largest violation `min{(x|y)_o, (y|z)_o} - (x|z)_o` over ordered quadruples of the
/// sample, clamped at zero: an empirical lower bound for `delta`.
pub fn delta_estimate<M: SpaceModel>(model: &M, sample: &[M::Point]) -> f64 {
    let n = sample.len();
    if n == 0 {
        return 0.0;
    }
    let dist: Vec<Vec<f64>> = sample
        .par_iter()
        .map(|x| sample.iter().map(|y| model.distance(x, y)).collect())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|o| {
            let gp: Vec<Vec<f64>> = (0..n)
                .map(|x| {
                    (0..n)
                        .map(|y| 0.5 * (dist[o][x] + dist[o][y] - dist[x][y]))
                        .collect()
                })
                .collect();
            let mut worst = 0.0f64;
            for x in 0..n {
                for z in 0..n {
                    let xz = gp[x][z];
                    let best = (0..n)
                        .map(|y| gp[x][y].min(gp[y][z]))
                        .fold(f64::NEG_INFINITY, f64::max);
                    worst = worst.max(best - xz);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
        .max(0.0)
}

/// `limsup` surrogate: the maximum of `d(y, z_n) - d(x, z_n)` over `n in [depth, 2 depth]`,
/// doubling the window while two consecutive windows disagree by more than `tolerance`.
pub fn busemann_limsup<M: SpaceModel>(
    model: &M,
    omega: &M::Boundary,
    x: &M::Point,
    y: &M::Point,
    depth: usize,
    tolerance: f64,
    max_doublings: usize,
) -> Result<BusemannValue> {
    let depth = depth.max(1);
    let window_max = |lo: usize| -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for n in lo..=2 * lo {
            let z = model.boundary_approach(omega, n)?;
            best = best.max(model.distance(y, &z) - model.distance(x, &z));
        }
        Ok(best)
    };
    let mut lo = depth;
    let mut current = window_max(lo)?;
    for _ in 0..max_doublings {
        let next = window_max(2 * lo)?;
        if (next - current).abs() <= tolerance {
            break;
        }
        lo *= 2;
        current = next;
    }
    Ok(BusemannValue {
        value: current,
        exactness: Exactness::ApproximatedAtDepth(lo),
    })
}

/// `beta_omega(x, y)`, exact when the model provides a closed form.
pub fn busemann<M: SpaceModel>(
    model: &M,
    omega: &M::Boundary,
    x: &M::Point,
    y: &M::Point,
    depth: usize,
) -> Result<BusemannValue> {
    if let Some(exact) = model.exact_busemann(omega, x, y) {
        return Ok(BusemannValue {
            value: exact?,
            exactness: Exactness::Exact,
        });
    }
    busemann_limsup(model, omega, x, y, depth, 1e-9, 0)
}

/// Cyclic sum `beta(x,y) + beta(y,z) + beta(z,x)`; lies in `[0, C]` for the model's `C`.
pub fn quasicocycle_defect<M: SpaceModel>(
    model: &M,
    omega: &M::Boundary,
    x: &M::Point,
    y: &M::Point,
    z: &M::Point,
    depth: usize,
) -> Result<f64> {
    Ok(busemann(model, omega, x, y, depth)?.value
        + busemann(model, omega, y, z, depth)?.value
        + busemann(model, omega, z, x, depth)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HoroballMembership {
    pub inside: bool,
    /// `|beta - t|` fell below the tolerance; `inside` is not trustworthy.
    pub boundary_case: bool,
    pub beta: f64,
}

/// `x` lies in the level-`t` horoball at `omega` through `o`: `beta_omega(o, x) <= t`.
pub fn horoball_member<M: SpaceModel>(
    model: &M,
    omega: &M::Boundary,
    o: &M::Point,
    x: &M::Point,
    t: f64,
    depth: usize,
    tolerance: f64,
) -> Result<HoroballMembership> {
    let beta = busemann(model, omega, o, x, depth)?;
    let boundary_case = match beta.exactness {
        Exactness::Exact => false,
        Exactness::ApproximatedAtDepth(_) => (beta.value - t).abs() < tolerance,
    };
    Ok(HoroballMembership {
        inside: beta.value <= t,
        boundary_case,
        beta: beta.value,
    })
}
