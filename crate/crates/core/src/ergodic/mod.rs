//! Exact Hopf theory on countable weighted actions.
//!
//! Every orbit is atomic, so the continual part is empty and the decomposition is
//! `X = (D \ D_free) ⊔ D_free`, split further by `D_cof`, the points with finite
//! stabilizer. All weights are exact rationals.

mod action;
mod group;

use std::collections::{BTreeSet, HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use action::{
    zigzag, ActionSpec, CountableWeightedAction, Point, Rational, SpaceSpec, StabilizerClass,
    WeightSpec,
};
pub use group::{Component, Factor, Generator, GroupElement, GroupSpec};

use crate::error::{Error, Result};

/// Group balls used by searches are truncated to this many elements.
pub const SEARCH_BALL_CAP: usize = 200_000;

const STABILIZER_LIST: usize = 16;
const MAX_CERTIFIED_RADIUS: u64 = 1 << 20;

/// Thresholds `t` at which `{y : mu_x(y) >= t}` is checked for finiteness.
pub fn threshold_grid() -> Vec<BigRational> {
    [(1, 1), (1, 2), (1, 10), (1, 1000)]
        .iter()
        .map(|&(p, q)| BigRational::new(p.into(), q.into()))
        .collect()
}

/// A finite set of points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetSpec {
    members: Vec<Point>,
}

impl SetSpec {
    /// Sorts the members; duplicates and points outside the space are rejected.
    pub fn new(action: &CountableWeightedAction, mut members: Vec<Point>) -> Result<Self> {
        for p in &members {
            action.point(p.copy, p.pos)?;
        }
        members.sort();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("set members must be distinct".into()));
        }
        Ok(SetSpec { members })
    }

    pub fn parse(action: &CountableWeightedAction, labels: &[String]) -> Result<Self> {
        let pts = labels.iter().map(|l| l.parse()).collect::<Result<Vec<Point>>>()?;
        SetSpec::new(action, pts)
    }

    pub fn members(&self) -> &[Point] {
        &self.members
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.members.binary_search(p).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Atomic Radon-Nikodym derivative `m(gx) / m(x)`.
pub fn rn_derivative(action: &CountableWeightedAction, g: &str, x: &Point) -> Result<BigRational> {
    let x = action.point(x.copy, x.pos)?;
    let g = action.group().parse_word(g)?;
    Ok(action.weight(&action.act(&g, &x)) / action.weight(&x))
}

/// `sum_{y in B_r x} mu_x(y)` for `r = 0..=radius`, each orbit point counted once.
pub fn orbit_measure_partial(
    action: &CountableWeightedAction,
    x: &Point,
    radius: usize,
) -> Result<Vec<BigRational>> {
    let x = action.point(x.copy, x.pos)?;
    let mx = action.weight(&x);
    let steps: BTreeSet<i64> = action
        .group()
        .generators()
        .map(|s| action.generator_shift(s))
        .collect();
    let mut reached: HashSet<i64> = HashSet::from([x.pos]);
    let mut frontier = vec![x.pos];
    let mut total = BigRational::one();
    let mut sums = vec![total.clone()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &p in &frontier {
            for &d in &steps {
                let y = action.act_generator_shift(&Point::new(x.copy, p), d);
                if reached.insert(y.pos) {
                    total += action.weight(&y) / &mx;
                    next.push(y.pos);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        sums.push(total.clone());
    }
    Ok(sums)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Freeness {
    Free,
    Cofinite,
    InfiniteStabilizerSuspected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Dissipative,
    ConservativeNonfree,
}

/// The three cells of the partition, by stabilizer size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HopfCell {
    #[serde(rename = "D_free")]
    Free,
    #[serde(rename = "D_cof\\D_free")]
    CofiniteNonfree,
    #[serde(rename = "D\\D_cof")]
    InfiniteStabilizer,
}

impl HopfCell {
    pub fn name(self) -> &'static str {
        match self {
            HopfCell::Free => "D_free",
            HopfCell::CofiniteNonfree => "D_cof\\D_free",
            HopfCell::InfiniteStabilizer => "D\\D_cof",
        }
    }
}

/// Bounds on the total mass of `mu_x`.
#[derive(Clone, Debug, Serialize)]
pub struct MuTotal {
    pub lower: Rational,
    /// `None` when no tail bound is available.
    pub upper: Option<Rational>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// The truth value is proved by an exact tail bound, not read off a truncation.
    pub certified: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdCount {
    pub t: Rational,
    /// `#{y in Gx : mu_x(y) >= t}` when certified finite.
    pub count: Option<usize>,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Conditions {
    /// `mu_x` is finite.
    pub iii: ConditionCheck,
    /// `{y : mu_x(y) >= t}` is finite for every `t` in the grid.
    pub iv: ConditionCheck,
    pub iv_thresholds: Vec<ThresholdCount>,
    /// The set of atoms of maximal `mu_x` is finite and nonempty.
    pub v: ConditionCheck,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Equivalences {
    pub iii_iv: bool,
    pub iv_v: bool,
    pub iii_v: bool,
}

impl Equivalences {
    pub fn all(&self) -> bool {
        self.iii_iv && self.iv_v && self.iii_v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub base_point: Point,
    pub representative: Point,
    /// Words of the nontrivial stabilizer elements found in the search ball (first few).
    pub stabilizer_elements: Vec<String>,
    pub stabilizer_found: usize,
    pub search_radius: usize,
    /// Exact stabilizer size from the group structure.
    pub stabilizer: StabilizerClass,
    pub freeness: Freeness,
    /// The search ball held no witness for a stabilizer the structure says exists.
    pub inconclusive_within_depth: bool,
    pub mu_partial: Vec<Rational>,
    pub mu_total: MuTotal,
    pub conditions: Conditions,
    pub equivalences_checked: Equivalences,
    pub verdict: Verdict,
    pub cell: HopfCell,
}

impl CountableWeightedAction {
    fn act_generator_shift(&self, x: &Point, shift: i64) -> Point {
        let p = x.pos + shift;
        Point::new(
            x.copy,
            match self.modulus() {
                Some(m) => p.rem_euclid(m as i64),
                None => p,
            },
        )
    }

    /// Orbit points of `x` with `|pos| <= rho` (the whole orbit when it is finite).
    fn orbit_within(&self, x: &Point, rho: u64) -> Vec<Point> {
        if let Some(pts) = self.finite_orbit(x) {
            return pts;
        }
        let step = self.orbit_step() as i64;
        let rho = rho as i64;
        let r = x.pos.rem_euclid(step);
        let lo = -rho + (r + rho).rem_euclid(step);
        (0..)
            .map(|k| lo + k * step)
            .take_while(|&p| p <= rho)
            .map(|p| Point::new(x.copy, p))
            .collect()
    }

    /// Smallest power-of-two radius beyond which every weight is below `level`.
    fn radius_below(&self, level: &BigRational) -> Option<u64> {
        let mut rho = 1;
        while rho <= MAX_CERTIFIED_RADIUS {
            if self.sup_beyond(rho) < *level {
                return Some(rho);
            }
            rho *= 2;
        }
        None
    }
}

fn label_cell(stabilizer: StabilizerClass) -> (HopfCell, Freeness, Verdict) {
    match stabilizer {
        StabilizerClass::Trivial => (HopfCell::Free, Freeness::Free, Verdict::Dissipative),
        StabilizerClass::Finite(_) => (
            HopfCell::CofiniteNonfree,
            Freeness::Cofinite,
            Verdict::ConservativeNonfree,
        ),
        StabilizerClass::Infinite => (
            HopfCell::InfiniteStabilizer,
            Freeness::InfiniteStabilizerSuspected,
            Verdict::ConservativeNonfree,
        ),
    }
}

/// Stabilizer search, `mu_x` partial sums and the finiteness conditions on one orbit.
pub fn classify_orbit(action: &CountableWeightedAction, x: &Point, depth: usize) -> Result<OrbitReport> {
    let x = action.point(x.copy, x.pos)?;
    let group = action.group();
    let (search_radius, ball) = group.ball_within_cap(depth, SEARCH_BALL_CAP);
    let identity = group.identity();
    let fixing: Vec<&GroupElement> = ball
        .iter()
        .filter(|g| **g != identity && action.act(g, &x) == x)
        .collect();
    let stabilizer = action.stabilizer();
    let (cell, freeness, verdict) = label_cell(stabilizer);
    let found_infinite = fixing.iter().any(|g| group.has_infinite_order(g));
    let inconclusive_within_depth = match stabilizer {
        StabilizerClass::Trivial => false,
        StabilizerClass::Finite(_) => fixing.is_empty(),
        StabilizerClass::Infinite => !found_infinite,
    };
    if stabilizer == StabilizerClass::Trivial && !fixing.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "{} fixes {x} although the action should be free",
            group.to_word(fixing[0])
        )));
    }

    let mx = action.weight(&x);
    let mu = |y: &Point| action.weight(y) / &mx;
    let mu_partial = orbit_measure_partial(action, &x, depth.min(256))?;

    let mu_total = match action.orbit_mass_exact(&x) {
        Some(total) => {
            let total = Rational(total / &mx);
            MuTotal {
                lower: total.clone(),
                upper: Some(total),
                exact: true,
            }
        }
        None => {
            let rho = (depth as u64).max(x.pos.unsigned_abs());
            let lower: BigRational = action.orbit_within(&x, rho).iter().map(mu).sum();
            let upper = &lower + action.tail_beyond(rho) / &mx;
            MuTotal {
                lower: Rational(lower),
                upper: Some(Rational(upper)),
                exact: false,
            }
        }
    };
    let iii = ConditionCheck {
        holds: mu_total.upper.is_some(),
        certified: mu_total.upper.is_some(),
        detail: match &mu_total.upper {
            Some(u) if mu_total.exact => format!("mu_x total = {}", u.0),
            Some(u) => format!("{} <= mu_x total <= {}", mu_total.lower.0, u.0),
            None => "no tail bound".into(),
        },
    };

    let mut iv_thresholds = Vec::new();
    for t in threshold_grid() {
        let radius = match action.orbit_size() {
            Some(_) => Some(0),
            None => action.radius_below(&(&t * &mx)),
        };
        let count = radius.map(|rho| {
            action
                .orbit_within(&x, rho.max(x.pos.unsigned_abs()))
                .iter()
                .filter(|y| mu(y) >= t)
                .count()
        });
        iv_thresholds.push(ThresholdCount {
            t: Rational(t),
            count,
            certified: count.is_some(),
        });
    }
    let iv_all = iv_thresholds.iter().all(|c| c.certified);
    let iv = ConditionCheck {
        holds: iv_all,
        certified: iv_all,
        detail: iv_thresholds
            .iter()
            .map(|c| match c.count {
                Some(n) => format!("t={}: {n}", c.t.0),
                None => format!("t={}: uncertified", c.t.0),
            })
            .collect::<Vec<_>>()
            .join(", "),
    };

    let v = {
        let near = action.orbit_within(&x, x.pos.unsigned_abs());
        let m0 = near.iter().map(|y| action.weight(y)).max().expect("orbit contains x");
        let rho = match action.orbit_size() {
            Some(_) => Some(0),
            None => action.radius_below(&m0),
        };
        match rho {
            Some(rho) => {
                let pts = action.orbit_within(&x, rho.max(x.pos.unsigned_abs()));
                let top = pts.iter().map(|y| action.weight(y)).max().expect("nonempty");
                let n = pts.iter().filter(|y| action.weight(y) == top).count();
                ConditionCheck {
                    holds: n >= 1,
                    certified: true,
                    detail: format!("{n} atoms of maximal mu_x = {}", top / &mx),
                }
            }
            None => ConditionCheck {
                holds: false,
                certified: false,
                detail: "maximum not certified".into(),
            },
        }
    };

    let equivalences_checked = Equivalences {
        iii_iv: iii.holds == iv.holds,
        iv_v: iv.holds == v.holds,
        iii_v: iii.holds == v.holds,
    };
    Ok(OrbitReport {
        base_point: x,
        representative: action.orbit_representative(&x),
        stabilizer_elements: fixing
            .iter()
            .take(STABILIZER_LIST)
            .map(|g| group.to_word(g))
            .collect(),
        stabilizer_found: fixing.len(),
        search_radius,
        stabilizer,
        freeness,
        inconclusive_within_depth,
        mu_partial: mu_partial.into_iter().map(Rational).collect(),
        mu_total,
        conditions: Conditions { iii, iv, iv_thresholds, v },
        equivalences_checked,
        verdict,
        cell,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub g: String,
    pub h: String,
    /// A point of `gA ∩ hA`.
    pub point: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct WanderingReport {
    pub wandering: bool,
    pub witness: Option<Witness>,
    pub searched_radius: usize,
    /// Decided from the orbit structure, not only from the search ball.
    pub exact: bool,
}

/// `y` lies in the orbit of `x`.
fn same_orbit(action: &CountableWeightedAction, x: &Point, y: &Point) -> bool {
    action.orbit_representative(x) == action.orbit_representative(y)
}

/// Some `g != e` has `gx = y`.
fn nontrivially_reaches(action: &CountableWeightedAction, x: &Point, y: &Point) -> bool {
    same_orbit(action, x, y) && (x != y || action.stabilizer() != StabilizerClass::Trivial)
}

/// Whether the translates `gA`, `g in G`, are pairwise disjoint.
pub fn is_wandering(action: &CountableWeightedAction, set: &SetSpec, radius: usize) -> WanderingReport {
    let group = action.group();
    let (searched_radius, ball) = group.ball_within_cap(radius, SEARCH_BALL_CAP);
    let identity = group.identity();
    // gA ∩ hA ≠ ∅ iff (h^-1 g)A ∩ A ≠ ∅, so h = e suffices
    let witness = ball.iter().filter(|g| **g != identity).find_map(|g| {
        set.members().iter().find_map(|a| {
            let ga = action.act(g, a);
            set.contains(&ga).then(|| Witness {
                g: group.to_word(g),
                h: group.to_word(&identity),
                point: ga,
            })
        })
    });
    let wandering = !set
        .members()
        .iter()
        .any(|a| set.members().iter().any(|b| nontrivially_reaches(action, a, b)));
    debug_assert!(!(wandering && witness.is_some()));
    WanderingReport {
        wandering,
        witness,
        searched_radius,
        exact: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecurrenceMode {
    Once,
    Infinitely,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecurrence {
    pub point: Point,
    pub recurrent: bool,
    /// Shortest `g != e` found with `gx in A`.
    pub witness: Option<String>,
    /// `(r, #{g in B_r \ {e} : gx in A})` along a doubling schedule.
    pub return_counts: Vec<(usize, usize)>,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub mode: RecurrenceMode,
    pub points: Vec<PointRecurrence>,
    /// Every point of the set recurs.
    pub recurrent: bool,
}

/// Returns to `A` from each of its points: at least once, or infinitely often.
pub fn is_recurrent(
    action: &CountableWeightedAction,
    set: &SetSpec,
    mode: RecurrenceMode,
    radius: usize,
) -> RecurrenceReport {
    let group = action.group();
    let (reached, ball) = group.ball_within_cap(radius, SEARCH_BALL_CAP);
    // ball is in breadth-first order; recover word lengths from the BFS layers
    let mut schedule: Vec<usize> = std::iter::successors(Some(reached.max(1)), |r| (*r > 1).then(|| r / 2))
        .collect();
    schedule.reverse();
    let sizes: Vec<usize> = schedule
        .iter()
        .map(|&r| group.ball_within_cap(r, SEARCH_BALL_CAP).1.len())
        .collect();
    let identity = group.identity();
    let stabilizer = action.stabilizer();
    let points = set
        .members()
        .iter()
        .map(|x| {
            let hits: Vec<usize> = ball
                .iter()
                .enumerate()
                .filter(|(_, g)| **g != identity && set.contains(&action.act(g, x)))
                .map(|(i, _)| i)
                .collect();
            let witness = hits.first().map(|&i| group.to_word(&ball[i]));
            let return_counts = schedule
                .iter()
                .zip(&sizes)
                .map(|(&r, &n)| (r, hits.iter().filter(|&&i| i < n).count()))
                .collect();
            let recurrent = match mode {
                RecurrenceMode::Once => set.members().iter().any(|y| nontrivially_reaches(action, x, y)),
                // {g : gx in A} is a finite union of cosets of the stabilizer
                RecurrenceMode::Infinitely => stabilizer == StabilizerClass::Infinite,
            };
            PointRecurrence {
                point: *x,
                recurrent,
                witness,
                return_counts,
                exact: true,
            }
        })
        .collect::<Vec<_>>();
    RecurrenceReport {
        mode,
        recurrent: points.iter().all(|p| p.recurrent),
        points,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WanderingSetReport {
    /// One minimal-label representative per free orbit meeting the window.
    pub members: SetSpec,
    pub enumerated_free: usize,
    pub covered: usize,
    pub overlaps: usize,
    /// Window points with non-free orbits, excluded from the construction.
    pub refused: Vec<Point>,
}

/// Maximal wandering set of the free part: a section of the free orbits through the
/// window `|pos| <= radius`, checked to tile the free window points under `B_radius`.
pub fn maximal_wandering_set(action: &CountableWeightedAction, radius: usize) -> Result<WanderingSetReport> {
    let window = action.window(radius as u64);
    let free = action.stabilizer() == StabilizerClass::Trivial;
    let (free_pts, refused): (Vec<Point>, Vec<Point>) = window.into_iter().partition(|_| free);
    let reps: BTreeSet<Point> = free_pts.iter().map(|p| action.orbit_representative(p)).collect();
    let members = SetSpec::new(action, reps.into_iter().collect())?;
    let targets: HashSet<Point> = free_pts.iter().copied().collect();
    let mut hits: HashMap<Point, usize> = HashMap::new();
    if !members.is_empty() {
        let ball = action.group().ball(radius.max(1) * 2, SEARCH_BALL_CAP)?;
        for r in members.members() {
            for g in &ball {
                let y = action.act(g, r);
                if targets.contains(&y) {
                    *hits.entry(y).or_default() += 1;
                }
            }
        }
    }
    Ok(WanderingSetReport {
        members,
        enumerated_free: targets.len(),
        covered: hits.len(),
        overlaps: hits.values().filter(|&&n| n > 1).count(),
        refused,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Passed,
    Failed,
    Inconclusive,
    /// The cell is empty.
    Vacuous,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cell: HopfCell,
    pub orbits: Vec<Point>,
    pub points: usize,
    pub behavior: CheckOutcome,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfPartition {
    pub group: String,
    pub window: usize,
    pub cells: Vec<CellReport>,
    /// Invariant finite measure with an infinite group: the free part must vanish
    /// and every singleton must recur.
    pub poincare: Option<CheckOutcome>,
    pub reports: Vec<OrbitReport>,
}

impl HopfPartition {
    pub fn cell(&self, cell: HopfCell) -> &CellReport {
        self.cells.iter().find(|c| c.cell == cell).expect("all cells present")
    }

    pub fn all_checks_pass(&self) -> bool {
        self.cells
            .iter()
            .all(|c| matches!(c.behavior, CheckOutcome::Passed | CheckOutcome::Vacuous))
            && self.poincare != Some(CheckOutcome::Failed)
            && self.reports.iter().all(|r| r.equivalences_checked.all())
    }
}

fn behavior(action: &CountableWeightedAction, cell: HopfCell, reps: &[Point], depth: usize) -> (CheckOutcome, String) {
    if reps.is_empty() {
        return (CheckOutcome::Vacuous, "empty cell".into());
    }
    let mut failures = Vec::new();
    for r in reps {
        let single = SetSpec { members: vec![*r] };
        let wandering = is_wandering(action, &single, depth).wandering;
        let once = is_recurrent(action, &single, RecurrenceMode::Once, depth).recurrent;
        let infinitely = is_recurrent(action, &single, RecurrenceMode::Infinitely, depth).recurrent;
        let ok = match cell {
            HopfCell::Free => wandering,
            HopfCell::CofiniteNonfree => once && !infinitely && !wandering,
            HopfCell::InfiniteStabilizer => infinitely,
        };
        if !ok {
            failures.push(format!(
                "{r}: wandering={wandering} once={once} infinitely={infinitely}"
            ));
        }
    }
    let expected = match cell {
        HopfCell::Free => "singleton representatives wander",
        HopfCell::CofiniteNonfree => "singletons recur once, not infinitely, and do not wander",
        HopfCell::InfiniteStabilizer => "singletons recur infinitely",
    };
    if failures.is_empty() {
        (CheckOutcome::Passed, expected.into())
    } else {
        (CheckOutcome::Failed, failures.join("; "))
    }
}

/// Assigns every orbit through the window `|pos| <= depth` to its cell and checks
/// the behavior each cell must have. Declared invariance and normalization are
/// verified first.
pub fn hopf_partition(action: &CountableWeightedAction, depth: usize) -> Result<HopfPartition> {
    action.check_declarations(depth as u64)?;
    let reps: BTreeSet<Point> = action
        .window(depth as u64)
        .iter()
        .map(|p| action.orbit_representative(p))
        .collect();
    let reps: Vec<Point> = reps.into_iter().collect();
    let reports = reps
        .par_iter()
        .map(|r| classify_orbit(action, r, depth))
        .collect::<Result<Vec<_>>>()?;
    let window = action.window(depth as u64);
    let mut cells = Vec::new();
    for cell in [HopfCell::Free, HopfCell::CofiniteNonfree, HopfCell::InfiniteStabilizer] {
        let orbits: Vec<Point> = reports.iter().filter(|r| r.cell == cell).map(|r| r.representative).collect();
        let points = window
            .iter()
            .filter(|p| orbits.contains(&action.orbit_representative(p)))
            .count();
        let (behavior, detail) = behavior(action, cell, &orbits, depth);
        cells.push(CellReport {
            cell,
            orbits,
            points,
            behavior,
            detail,
        });
    }
    let poincare = (action.spec().invariant && action.modulus().is_some() && !action.group().is_finite()).then(|| {
        let free_empty = cells[0].orbits.is_empty();
        let all_recur = window.iter().all(|p| {
            is_recurrent(action, &SetSpec { members: vec![*p] }, RecurrenceMode::Once, depth).recurrent
        });
        if free_empty && all_recur {
            CheckOutcome::Passed
        } else {
            CheckOutcome::Failed
        }
    });
    Ok(HopfPartition {
        group: action.group().to_string(),
        window: depth,
        cells,
        poincare,
        reports,
    })
}

/// Named actions exercising every cell of the partition.
pub fn canonical_battery() -> Vec<(&'static str, ActionSpec)> {
    let specs = [
        (
            "z-translation",
            r#"{"group":"Z","weights":{"kind":"geometric","scale":"1/3","ratio":"1/2"},"normalized":true}"#,
        ),
        (
            "z-rotation-z5",
            r#"{"group":"Z","space":{"modulus":5},"weights":{"kind":"uniform-finite","scale":"1/5"},"invariant":true,"normalized":true}"#,
        ),
        (
            "z-x-z2-on-z",
            r#"{"group":"Z x Z/2","weights":{"kind":"geometric","scale":"1/3","ratio":"1/2"},"normalized":true}"#,
        ),
        (
            "z-two-copies",
            r#"{"group":"Z","space":{"copies":2},"weights":{"kind":"geometric","scale":"1/6","ratio":"1/2"},"normalized":true}"#,
        ),
        (
            "f2-on-z",
            r#"{"group":"F2","weights":{"kind":"polynomial","scale":1,"power":2}}"#,
        ),
        (
            "z5-regular",
            r#"{"group":"Z/5","space":{"modulus":5},"weights":{"kind":"uniform-finite","scale":"1/5"},"invariant":true,"normalized":true}"#,
        ),
        (
            "z-even-shift",
            r#"{"group":"Z","shifts":[2],"weights":{"kind":"polynomial","scale":1,"power":3}}"#,
        ),
    ];
    specs
        .iter()
        .map(|(name, json)| (*name, serde_json::from_str(json).expect("battery specs are valid")))
        .collect()
}

/// Approximate value for tabular output.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `true` when `q` is zero.
pub fn is_zero(q: &BigRational) -> bool {
    q.is_zero()
}
