//! The two boundary actions the classifier runs on.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClassifierParams, OccupancyTable, Profile, StreamKind, StreamSpec};
use crate::disk::{orbit_horofunction, orbit_tube_distance, CirclePoint, OrbitBall};
use crate::error::{Error, Result};
use crate::tree::{decide_ep_horospheric, horocycle_counts, BoundaryRay, HoroVerdict, StallingsGraph};

/// A discrete group acting on the boundary of a hyperbolic space, with enough
/// structure to count orbit points in horoballs and tubes.
pub trait BoundaryAction: Sync {
    type Point: Clone + Send + Sync + std::fmt::Display + serde::Serialize;

    /// Checks that `stream` lives on this action's boundary.
    fn check_stream(&self, stream: &StreamSpec) -> Result<()>;

    /// Largest radius the action can count to.
    fn max_radius(&self) -> f64;

    /// Occupancy, series and tube counts of `omega` along the schedule.
    fn profile(&self, omega: &Self::Point, stream: &StreamSpec, params: &ClassifierParams) -> Result<Profile>;

    /// Exact membership of `omega` in the big horospheric limit set, when decidable.
    fn exact_decision(&self, omega: &Self::Point) -> Option<Result<bool>>;

    /// A point distributed according to the basepoint measure.
    fn sample(&self, seed: u64) -> Result<Self::Point>;
}

/// A subgroup `H <= F_k` acting on the boundary of the tree; orbit points are words.
#[derive(Clone, Debug)]
pub struct TreeAction {
    graph: StallingsGraph,
    max_len: usize,
}

impl TreeAction {
    pub fn new(graph: StallingsGraph, max_len: usize) -> Result<Self> {
        if graph.rank() < 2 {
            return Err(Error::InvalidParams("the uniform stream needs rank >= 2".into()));
        }
        Ok(TreeAction { graph, max_len })
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }
}

fn integer_radius(r: f64) -> Result<usize> {
    if r.fract() != 0.0 || r < 0.0 {
        return Err(Error::InvalidParams(format!(
            "tree radii are word lengths; {r} is not a nonnegative integer"
        )));
    }
    Ok(r as usize)
}

impl BoundaryAction for TreeAction {
    type Point = BoundaryRay;

    fn check_stream(&self, stream: &StreamSpec) -> Result<()> {
        match stream.kind {
            StreamKind::TreeUniform { rank } if rank == self.graph.rank() => Ok(()),
            _ => Err(Error::InvalidParams(format!(
                "stream {:?} does not live on the boundary of F_{}",
                stream.kind,
                self.graph.rank()
            ))),
        }
    }

    fn max_radius(&self) -> f64 {
        self.max_len as f64
    }

    fn profile(&self, omega: &BoundaryRay, stream: &StreamSpec, params: &ClassifierParams) -> Result<Profile> {
        let radii = params
            .radius_schedule
            .iter()
            .map(|&r| integer_radius(r))
            .collect::<Result<Vec<_>>>()?;
        let top = *radii.last().expect("validated schedule");
        let counts = horocycle_counts(&self.graph, omega, top)?;
        let counts_of = |f: &dyn Fn(usize) -> u128| radii.iter().map(|&r| f(r)).collect::<Vec<_>>();
        let occupancy: Vec<Vec<u128>> = params
            .thresholds
            .iter()
            .map(|&t| counts_of(&|r| counts.occupancy(t, r)))
            .collect();
        let tube = params
            .tube_widths
            .iter()
            .map(|&c| counts_of(&|r| counts.tube(c, r)))
            .collect();
        // cells (c, l) hold the words h with cp(h, w) = c and |h| = c + l, each with
        // beta_w(h o, o) = c - l in units of log(2k - 1)
        let series = radii
            .iter()
            .map(|&r| counts.series_with_dimension(stream.dimension, r))
            .collect();
        Ok(Profile {
            occupancy: OccupancyTable {
                thresholds: params.thresholds.clone(),
                radii: params.radius_schedule.clone(),
                min: occupancy.clone(),
                max: occupancy,
                flagged: false,
            },
            series,
            tube_widths: params.tube_widths.clone(),
            tube,
        })
    }

    fn exact_decision(&self, omega: &BoundaryRay) -> Option<Result<bool>> {
        omega.is_eventually_periodic().then(|| {
            decide_ep_horospheric(&self.graph, omega).map(|d| d.verdict == HoroVerdict::InBigHorospheric)
        })
    }

    fn sample(&self, seed: u64) -> Result<BoundaryRay> {
        BoundaryRay::sample_uniform(self.graph.rank(), seed, self.max_len + 2)
    }
}

/// A Fuchsian group acting on the circle through an explicit orbit ball.
#[derive(Clone, Debug)]
pub struct DiskAction {
    ball: OrbitBall,
}

/// Counts within this distance of a threshold are reported as uncertain.
pub const HOROBALL_TOLERANCE: f64 = 1e-9;

impl DiskAction {
    pub fn new(ball: OrbitBall) -> Self {
        DiskAction { ball }
    }

    pub fn ball(&self) -> &OrbitBall {
        &self.ball
    }
}

/// `log(sum exp(x_i))` accumulated without overflow.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    const EMPTY: LogSum = LogSum {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    fn add(&mut self, x: f64) {
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    fn merge(&mut self, other: LogSum) {
        if other.scaled > 0.0 {
            self.add(other.max);
            // `add` counted other.max once with weight 1; correct for the rest
            let extra = other.scaled - 1.0;
            self.scaled += extra * (other.max - self.max).exp();
        }
    }

    fn value(self) -> f64 {
        if self.scaled == 0.0 {
            0.0
        } else {
            self.max.exp() * self.scaled
        }
    }
}

impl BoundaryAction for DiskAction {
    type Point = CirclePoint;

    fn check_stream(&self, stream: &StreamSpec) -> Result<()> {
        match stream.kind {
            StreamKind::DiskVisual => Ok(()),
            _ => Err(Error::InvalidParams(format!(
                "stream {:?} does not live on the circle",
                stream.kind
            ))),
        }
    }

    fn max_radius(&self) -> f64 {
        self.ball.radius
    }

    fn profile(&self, xi: &CirclePoint, stream: &StreamSpec, params: &ClassifierParams) -> Result<Profile> {
        let radii = &params.radius_schedule;
        let bounds: Vec<usize> = radii.iter().map(|&r| self.ball.within(r).len()).collect();
        let ts = &params.thresholds;
        let cs = &params.tube_widths;
        let nb = radii.len();
        // per shell: counts by first threshold index certainly / possibly reached
        let mut sure = vec![vec![0u128; ts.len() + 1]; nb];
        let mut maybe = vec![vec![0u128; ts.len() + 1]; nb];
        let mut tube = vec![vec![0u128; cs.len() + 1]; nb];
        let mut logs = vec![LogSum::EMPTY; nb];
        let mut start = 0;
        for (shell, &end) in bounds.iter().enumerate() {
            for i in start..end {
                let g = &self.ball.elements[i].map;
                let beta = orbit_horofunction(g, xi);
                if !beta.is_finite() {
                    return Err(Error::NumericDegeneracy(format!(
                        "orbit point of {} lies on {xi}",
                        self.ball.elements[i].word
                    )));
                }
                sure[shell][ts.partition_point(|&t| t < beta + HOROBALL_TOLERANCE)] += 1;
                maybe[shell][ts.partition_point(|&t| t < beta - HOROBALL_TOLERANCE)] += 1;
                let d = orbit_tube_distance(g, xi);
                tube[shell][cs.partition_point(|&c| c < d)] += 1;
                // e^{D beta_xi(g0, 0)} = e^{-D beta_xi(0, g0)}
                logs[shell].add(-stream.dimension * beta);
            }
            start = end;
        }
        let cumulative = |rows: &[Vec<u128>], k: usize| -> Vec<Vec<u128>> {
            (0..k)
                .map(|j| {
                    let mut acc = 0u128;
                    (0..nb)
                        .map(|s| {
                            acc += rows[s][..=j].iter().sum::<u128>();
                            acc
                        })
                        .collect()
                })
                .collect()
        };
        let min = cumulative(&sure, ts.len());
        let max = cumulative(&maybe, ts.len());
        let flagged = min != max;
        let mut acc = LogSum::EMPTY;
        let series = logs
            .into_iter()
            .map(|l| {
                acc.merge(l);
                acc.value()
            })
            .collect();
        Ok(Profile {
            occupancy: OccupancyTable {
                thresholds: ts.clone(),
                radii: radii.clone(),
                min,
                max,
                flagged,
            },
            series,
            tube_widths: cs.clone(),
            tube: cumulative(&tube, cs.len()),
        })
    }

    fn exact_decision(&self, _omega: &CirclePoint) -> Option<Result<bool>> {
        None
    }

    fn sample(&self, seed: u64) -> Result<CirclePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(CirclePoint::from_angle(rng.gen_range(0.0..TAU)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_matches_direct_sum() {
        let xs = [-3.0, 2.5, 0.0, 10.0, -40.0, 9.9];
        let mut a = LogSum::EMPTY;
        let mut b = LogSum::EMPTY;
        for (i, &x) in xs.iter().enumerate() {
            if i % 2 == 0 {
                a.add(x)
            } else {
                b.add(x)
            }
        }
        a.merge(b);
        let direct: f64 = xs.iter().map(|x| x.exp()).sum();
        assert!((a.value() - direct).abs() < 1e-12 * direct);
        let mut empty = LogSum::EMPTY;
        empty.merge(LogSum::EMPTY);
        assert_eq!(empty.value(), 0.0);
    }
}
