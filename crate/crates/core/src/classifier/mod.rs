//! Conservative versus dissipative boundary points.
//!
//! The conservative part of the boundary action of a discrete group is its big
//! horospheric limit set, which is also the divergence set of the Poincare-Busemann
//! series `sum_g exp(D beta_w(g o, o))`. Truncated orbits can only bracket both
//! infinitudes, so labels are three-valued: growth of horoball occupancy (or of the
//! series) says conservative, saturation plus Cauchy convergence says dissipative,
//! anything else is inconclusive. Exact decisions override heuristics where the model
//! has them, and a disagreement is an error.

mod actions;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use actions::{BoundaryAction, DiskAction, TreeAction, HOROBALL_TOLERANCE};

use crate::disk::{busemann_poisson, log_visual_density, CirclePoint, MobiusMap, OrbitBall};
use crate::error::{Error, Result};
use crate::tree::{
    conformal_exponent, horocycle_counts, power_of_branching, stream_density, BoundaryRay,
    Letter, ReducedWord, StallingsGraph,
};

/// Tolerance added to the declared defect in stream audits.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// Inconclusive rates above this trigger a low-confidence warning.
pub const LOW_CONFIDENCE_RATE: f64 = 0.2;

const WILSON_Z: f64 = 1.959_963_984_540_054;

pub(crate) fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub(crate) fn key_of<T: Hash + ?Sized>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StreamKind {
    /// Uniform measure on the boundary of the Cayley tree of `F_rank`.
    TreeUniform { rank: usize },
    /// Normalized arc length on the circle, seen from `0`.
    DiskVisual,
}

/// A quasi-conformal stream: `|log density(g, w) - D beta_w(g o, o)| <= C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StreamSpec {
    pub kind: StreamKind,
    pub dimension: f64,
    pub defect: f64,
    /// Multiplies every density by a hashed factor `u(g, w) in [1/2, 2]`, which keeps
    /// the measure class and raises the defect to `log 2`.
    pub reweight_seed: Option<u64>,
}

impl StreamSpec {
    pub fn tree_uniform(rank: usize) -> Self {
        StreamSpec {
            kind: StreamKind::TreeUniform { rank },
            dimension: ((2 * rank - 1) as f64).ln(),
            defect: 0.0,
            reweight_seed: None,
        }
    }

    pub fn disk_visual() -> Self {
        StreamSpec {
            kind: StreamKind::DiskVisual,
            dimension: 1.0,
            defect: 0.0,
            reweight_seed: None,
        }
    }

    pub fn reweighted(self, seed: u64) -> Self {
        StreamSpec {
            defect: self.defect + std::f64::consts::LN_2,
            reweight_seed: Some(seed),
            ..self
        }
    }

    /// The factor `u(g, w)`, 1 unless reweighted.
    pub fn perturbation(&self, element_key: u64, point_key: u64) -> f64 {
        match self.reweight_seed {
            None => 1.0,
            Some(seed) => {
                let h = splitmix(seed ^ splitmix(element_key ^ splitmix(point_key)));
                (2 + h % 7) as f64 / 4.0
            }
        }
    }

    /// Tree density `d(g lambda)/d lambda (w)` from cylinder ratios, times `u`.
    pub fn tree_density(&self, g: &ReducedWord, ray: &BoundaryRay) -> Result<f64> {
        let StreamKind::TreeUniform { rank } = self.kind else {
            return Err(Error::InvalidParams("not a tree stream".into()));
        };
        let (c, l) = tree_cell(g, ray);
        let u = self.perturbation(key_of(&(c, l)), key_of(&ray.to_string()));
        Ok(ratio_to_f64(&stream_density(rank, g, ray)) * u)
    }

    /// Log of the disk density `d(g lambda)/d lambda (xi)`, including `log u`.
    pub fn disk_log_density(&self, g: &MobiusMap, word: &str, xi: &CirclePoint) -> Result<f64> {
        if self.kind != StreamKind::DiskVisual {
            return Err(Error::InvalidParams("not a disk stream".into()));
        }
        let u = self.perturbation(key_of(word), xi.angle().to_bits());
        Ok(log_visual_density(g, xi)? + u.ln())
    }
}

fn tree_cell(g: &ReducedWord, ray: &BoundaryRay) -> (usize, usize) {
    let c = ray.common_prefix_len(g);
    (c, g.len() - c)
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn default_schedule() -> Vec<f64> {
    vec![6.0, 12.0, 18.0, 24.0, 30.0]
}

fn default_thresholds() -> Vec<f64> {
    (-10..=10).map(f64::from).collect()
}

fn default_window() -> u64 {
    1
}

fn default_eps() -> f64 {
    1e-6
}

fn default_tubes() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 4.0]
}

fn default_samples() -> usize {
    1000
}

/// Finite surrogates for the infinitary conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierParams {
    #[serde(default = "default_schedule")]
    pub radius_schedule: Vec<f64>,
    /// Horoball levels `t`, ascending; negative levels feed the small-horoball probe.
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    /// New occupancy hits per schedule step that count as growth.
    #[serde(default = "default_window")]
    pub growth_window: u64,
    /// Series increments below this count as converged.
    #[serde(default = "default_eps")]
    pub cauchy_eps: f64,
    /// Tube widths for the radial probe, ascending.
    #[serde(default = "default_tubes")]
    pub tube_widths: Vec<f64>,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            radius_schedule: default_schedule(),
            thresholds: default_thresholds(),
            growth_window: default_window(),
            cauchy_eps: default_eps(),
            tube_widths: default_tubes(),
            sample_count: default_samples(),
            seed: 0,
        }
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

impl ClassifierParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidParams(why.into()));
        if self.radius_schedule.len() < 2 || !strictly_increasing(&self.radius_schedule) {
            return bad("radius_schedule needs at least two strictly increasing radii");
        }
        if self.radius_schedule[0] < 0.0 {
            return bad("radii must be nonnegative");
        }
        if self.thresholds.is_empty() || !strictly_increasing(&self.thresholds) {
            return bad("thresholds must be nonempty and strictly increasing");
        }
        if !strictly_increasing(&self.tube_widths) {
            return bad("tube_widths must be strictly increasing");
        }
        if !(self.cauchy_eps > 0.0) {
            return bad("cauchy_eps must be positive");
        }
        if self.growth_window == 0 {
            return bad("growth_window must be at least 1");
        }
        Ok(())
    }

    pub fn max_radius(&self) -> f64 {
        *self.radius_schedule.last().expect("validated")
    }

    /// The schedule with every radius doubled.
    pub fn doubled(&self) -> Self {
        ClassifierParams {
            radius_schedule: self.radius_schedule.iter().map(|r| 2.0 * r).collect(),
            ..self.clone()
        }
    }
}

/// `N(t, R)` with a `(min, max)` pair per cell; the two differ only where an orbit
/// point lies within tolerance of a horosphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccupancyTable {
    pub thresholds: Vec<f64>,
    pub radii: Vec<f64>,
    /// Indexed `[threshold][radius]`.
    pub min: Vec<Vec<u128>>,
    pub max: Vec<Vec<u128>>,
    pub flagged: bool,
}

impl OccupancyTable {
    pub fn count(&self, t: usize, r: usize) -> (u128, u128) {
        (self.min[t][r], self.max[t][r])
    }

    /// Certain growth `min N(t, R_i) - max N(t, R_{i-1})` on step `i`.
    fn gain(&self, t: usize, i: usize) -> u128 {
        self.min[t][i].saturating_sub(self.max[t][i - 1])
    }
}

/// Everything the labels are computed from.
#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub occupancy: OccupancyTable,
    /// `S(R)` per schedule radius.
    pub series: Vec<f64>,
    pub tube_widths: Vec<f64>,
    /// `#{g in B_R : d(g o, ray(o, w)) <= c}`, indexed `[width][radius]`.
    pub tube: Vec<Vec<u128>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Conservative,
    Dissipative,
    Inconclusive,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Conservative => "conservative",
            Label::Dissipative => "dissipative",
            Label::Inconclusive => "inconclusive",
        })
    }
}

/// Label read off the occupancy table alone from the first `m` schedule radii:
/// conservative when some level gains at least `growth_window` points on each of
/// the last two steps, dissipative when no level changes after the half-way radius.
pub fn occupancy_label(occ: &OccupancyTable, m: usize, growth_window: u64) -> Label {
    if m < 2 {
        return Label::Inconclusive;
    }
    let nt = occ.thresholds.len();
    let w = u128::from(growth_window);
    let last_steps = if m >= 3 { m - 2..m } else { 1..2 };
    if (0..nt).any(|t| last_steps.clone().all(|i| occ.gain(t, i) >= w)) {
        return Label::Conservative;
    }
    let half = (m - 1) / 2;
    // no orbit point, certain or not, enters after the half-way radius
    if (0..nt).all(|t| occ.max[t][m - 1] == occ.max[t][half]) {
        Label::Dissipative
    } else {
        Label::Inconclusive
    }
}

/// Heuristic label from the first `m` schedule radii: the occupancy label,
/// cross-checked against a Cauchy test on the series partial sums.
pub fn heuristic_label(profile: &Profile, m: usize, params: &ClassifierParams) -> Label {
    if m < 2 {
        return Label::Inconclusive;
    }
    let by_occupancy = occupancy_label(&profile.occupancy, m, params.growth_window);
    let inc = |i: usize| profile.series[i] - profile.series[i - 1];
    let eps = params.cauchy_eps;
    let series_diverges =
        m >= 4 && (m - 3..m).all(|i| inc(i) >= eps) && inc(m - 2) >= inc(m - 3) && inc(m - 1) >= inc(m - 2);
    if by_occupancy == Label::Conservative || series_diverges {
        return Label::Conservative;
    }
    let half = (m - 1) / 2;
    let converges = (half + 1..m).all(|i| inc(i) < eps);
    if by_occupancy == Label::Dissipative && converges {
        Label::Dissipative
    } else {
        Label::Inconclusive
    }
}

/// Occupancy grows on the last schedule step at every level of the grid.
pub fn small_horo_probe(occupancy: &OccupancyTable, growth_window: u64) -> bool {
    let last = occupancy.radii.len() - 1;
    (0..occupancy.thresholds.len()).all(|t| occupancy.gain(t, last) >= u128::from(growth_window))
}

/// Tube counts grow on the last schedule step for some width.
pub fn radial_probe_from(profile: &Profile, growth_window: u64) -> bool {
    let last = profile.occupancy.radii.len() - 1;
    profile
        .tube
        .iter()
        .any(|row| row[last].saturating_sub(row[last - 1]) >= u128::from(growth_window))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub small_horospheric_probe: bool,
    pub radial_probe: bool,
    /// Exact membership in the big horospheric limit set, when decided.
    pub exact_decision: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointVerdict<P> {
    pub point: P,
    pub occupancy: OccupancyTable,
    pub series_partials: Vec<f64>,
    pub tube_widths: Vec<f64>,
    pub tube: Vec<Vec<u128>>,
    pub label: Label,
    pub heuristic_label: Label,
    /// Occupancy-only label on the full schedule.
    pub occupancy_label: Label,
    /// Heuristic label from each prefix of the schedule.
    pub labels_by_radius: Vec<Label>,
    pub flags: Flags,
}

fn check<A: BoundaryAction>(action: &A, stream: &StreamSpec, params: &ClassifierParams) -> Result<()> {
    params.validate()?;
    action.check_stream(stream)?;
    if params.max_radius() > action.max_radius() + 1e-9 {
        return Err(Error::InvalidParams(format!(
            "schedule reaches {} but the orbit is only enumerated to {}",
            params.max_radius(),
            action.max_radius()
        )));
    }
    Ok(())
}

/// `N(t, R)` for `omega`; counts do not depend on the stream.
pub fn occupancy_table<A: BoundaryAction>(
    action: &A,
    stream: &StreamSpec,
    omega: &A::Point,
    params: &ClassifierParams,
) -> Result<OccupancyTable> {
    check(action, stream, params)?;
    Ok(action.profile(omega, stream, params)?.occupancy)
}

/// `S(R) = sum_{g in B_R} e^{D beta_omega(g o, o)}` per schedule radius; the stream
/// supplies `D` only, so bounded reweightings leave it unchanged.
pub fn poincare_partial_sums<A: BoundaryAction>(
    action: &A,
    stream: &StreamSpec,
    omega: &A::Point,
    params: &ClassifierParams,
) -> Result<Vec<f64>> {
    check(action, stream, params)?;
    Ok(action.profile(omega, stream, params)?.series)
}

/// Exact `S(R)` for the uniform stream of `F_k`, for `R = radii`.
pub fn tree_partial_sums_exact(graph: &StallingsGraph, ray: &BoundaryRay, radii: &[usize]) -> Result<Vec<BigRational>> {
    let top = radii.iter().copied().max().unwrap_or(0);
    let counts = horocycle_counts(graph, ray, top)?;
    Ok(radii.iter().map(|&r| counts.series_exact(r)).collect())
}

/// Labels `omega` from its occupancy and series profile, deferring to an exact
/// decision when the model has one.
pub fn classify_point<A: BoundaryAction>(
    action: &A,
    stream: &StreamSpec,
    omega: &A::Point,
    params: &ClassifierParams,
) -> Result<PointVerdict<A::Point>> {
    check(action, stream, params)?;
    let profile = action.profile(omega, stream, params)?;
    let m = params.radius_schedule.len();
    let labels_by_radius: Vec<Label> = (1..=m).map(|k| heuristic_label(&profile, k, params)).collect();
    let heuristic = labels_by_radius[m - 1];
    let exact = action.exact_decision(omega).transpose()?;
    let label = match exact {
        None => heuristic,
        Some(inside) => {
            let expected = if inside { Label::Conservative } else { Label::Dissipative };
            if heuristic != Label::Inconclusive && heuristic != expected {
                return Err(Error::DecisionConflict(format!(
                    "{omega}: exact decision says {expected}, occupancy and series say {heuristic}"
                )));
            }
            expected
        }
    };
    Ok(PointVerdict {
        point: omega.clone(),
        flags: Flags {
            small_horospheric_probe: small_horo_probe(&profile.occupancy, params.growth_window),
            radial_probe: radial_probe_from(&profile, params.growth_window),
            exact_decision: exact,
        },
        occupancy_label: occupancy_label(&profile.occupancy, m, params.growth_window),
        occupancy: profile.occupancy,
        series_partials: profile.series,
        tube_widths: profile.tube_widths,
        tube: profile.tube,
        label,
        heuristic_label: heuristic,
        labels_by_radius,
    })
}

/// Radial-limit-set probe for `omega`.
pub fn radial_probe<A: BoundaryAction>(
    action: &A,
    stream: &StreamSpec,
    omega: &A::Point,
    params: &ClassifierParams,
) -> Result<bool> {
    check(action, stream, params)?;
    Ok(radial_probe_from(&action.profile(omega, stream, params)?, params.growth_window))
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub worst: Option<String>,
    pub defect: f64,
    pub tolerance: f64,
}

fn finish_audit(stream: &StreamSpec, deviations: Vec<(f64, String)>) -> Result<AuditReport> {
    let samples = deviations.len();
    let worst = deviations.into_iter().max_by(|a, b| a.0.total_cmp(&b.0));
    let max_deviation = worst.as_ref().map_or(0.0, |w| w.0);
    let report = AuditReport {
        samples,
        max_deviation,
        worst: worst.map(|w| w.1),
        defect: stream.defect,
        tolerance: AUDIT_TOLERANCE,
    };
    if !(max_deviation <= stream.defect + AUDIT_TOLERANCE) {
        return Err(Error::StreamAudit(format!(
            "deviation {max_deviation:e} exceeds defect {} at {}",
            stream.defect,
            report.worst.as_deref().unwrap_or("?")
        )));
    }
    Ok(report)
}

/// `sup |log density(g, w) - D beta_w(g o, o)|` over tree samples. Unperturbed
/// streams are compared exactly in rational arithmetic.
pub fn audit_tree_stream(stream: &StreamSpec, pairs: &[(ReducedWord, BoundaryRay)]) -> Result<AuditReport> {
    let StreamKind::TreeUniform { rank } = stream.kind else {
        return Err(Error::InvalidParams("not a tree stream".into()));
    };
    let deviations = pairs
        .par_iter()
        .map(|(g, ray)| {
            let exponent = conformal_exponent(g, ray);
            let ratio = stream_density(rank, g, ray) / power_of_branching(rank, exponent);
            let (c, l) = tree_cell(g, ray);
            let u = stream.perturbation(key_of(&(c, l)), key_of(&ray.to_string()));
            let deviation = if ratio.is_one() {
                u.ln().abs()
            } else {
                (ratio_to_f64(&ratio).ln() + u.ln()).abs()
            };
            (deviation, format!("g={g} w={ray}"))
        })
        .collect();
    finish_audit(stream, deviations)
}

/// Disk version of [`audit_tree_stream`] with `beta` from the Poisson kernel.
pub fn audit_disk_stream(stream: &StreamSpec, pairs: &[(MobiusMap, String, CirclePoint)]) -> Result<AuditReport> {
    let deviations = pairs
        .par_iter()
        .map(|(g, word, xi)| {
            let log_density = stream.disk_log_density(g, word, xi)?;
            let beta = busemann_poisson(xi, &g.orbit_point(), &crate::disk::DiskPoint::ORIGIN)?;
            Ok(((log_density - stream.dimension * beta).abs(), format!("g={word} xi={xi}")))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_audit(stream, deviations)
}

/// Random reduced word of length `len`.
pub fn random_word(rank: usize, len: usize, rng: &mut impl Rng) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_index(rng.gen_range(0..2 * rank));
        if letters.last().map_or(true, |p| p.inverse() != l) {
            letters.push(l);
        }
    }
    ReducedWord::reduce(letters)
}

/// Random `(g, w)` pairs: words up to `max_len` against a mix of eventually periodic
/// and sampled rays.
pub fn tree_audit_pairs(rank: usize, count: usize, seed: u64, max_len: usize) -> Vec<(ReducedWord, BoundaryRay)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let g = random_word(rank, rng.gen_range(0..=max_len), &mut rng);
            let ray = if i % 2 == 0 {
                let prefix = random_word(rank, rng.gen_range(0..4), &mut rng);
                let period = loop {
                    let p = random_word(rank, rng.gen_range(1..4), &mut rng);
                    if !p.cyclic_reduction().0.is_empty() {
                        break p;
                    }
                };
                BoundaryRay::eventually_periodic(&prefix, &period).expect("nonempty period")
            } else {
                BoundaryRay::sample_uniform(rank, rng.gen(), max_len + 2).expect("valid rank")
            };
            (g, ray)
        })
        .collect()
}

/// Random `(g, word, xi)` triples with `g` drawn from the ball.
pub fn disk_audit_pairs(ball: &OrbitBall, count: usize, seed: u64) -> Vec<(MobiusMap, String, CirclePoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let e = &ball.elements[rng.gen_range(0..ball.len())];
            let xi = CirclePoint::from_angle(rng.gen_range(0.0..std::f64::consts::TAU));
            (e.map, e.word.clone(), xi)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub point: String,
    pub label: Label,
    pub labels_by_radius: Vec<Label>,
    pub small_horospheric_probe: bool,
    pub radial_probe: bool,
    pub series_top: f64,
    /// `S(R_m) - S(R_{m-1})`.
    pub series_increment_top: f64,
    /// `N(t, R_max)` for the largest grid level `t <= 0`.
    pub occupancy_top: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusFraction {
    pub radius: f64,
    pub fraction: f64,
}

/// Estimated stream mass of the conservative part.
#[derive(Clone, Debug, Serialize)]
pub struct MassEstimate {
    pub samples: usize,
    pub conservative: usize,
    pub dissipative: usize,
    pub inconclusive: usize,
    /// Conservative samples over all samples; inconclusive ones count against it.
    pub fraction: f64,
    /// Wilson 95% interval for the fraction.
    pub interval: [f64; 2],
    pub inconclusive_rate: f64,
    pub low_confidence: bool,
    pub fraction_by_radius: Vec<RadiusFraction>,
    pub records: Vec<SampleRecord>,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    [lo, hi]
}

/// Seed of sample `index` under `master`.
pub fn sample_seed(master: u64, index: usize) -> u64 {
    splitmix(master ^ splitmix(index as u64))
}

/// Classifies `params.sample_count` independent basepoint-measure samples on a pool of
/// `workers` threads (0: all cores). Records are ordered by sample index and do not
/// depend on the worker count.
pub fn monte_carlo_mass<A: BoundaryAction>(
    action: &A,
    stream: &StreamSpec,
    params: &ClassifierParams,
    workers: usize,
) -> Result<MassEstimate>
where
    A::Point: fmt::Display,
{
    check(action, stream, params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    let level = params.thresholds.iter().rposition(|&t| t <= 0.0);
    let records = pool.install(|| {
        (0..params.sample_count)
            .into_par_iter()
            .map(|index| {
                let seed = sample_seed(params.seed, index);
                let omega = action.sample(seed)?;
                let v = classify_point(action, stream, &omega, params)?;
                let top = params.radius_schedule.len() - 1;
                Ok(SampleRecord {
                    index,
                    seed,
                    point: omega.to_string(),
                    label: v.label,
                    labels_by_radius: v.labels_by_radius,
                    small_horospheric_probe: v.flags.small_horospheric_probe,
                    radial_probe: v.flags.radial_probe,
                    series_top: v.series_partials[top],
                    series_increment_top: v.series_partials[top] - v.series_partials[top - 1],
                    occupancy_top: level.map(|t| v.occupancy.min[t][top]),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let n = records.len();
    let count = |l: Label| records.iter().filter(|r| r.label == l).count();
    let conservative = count(Label::Conservative);
    let inconclusive = count(Label::Inconclusive);
    let fraction_by_radius = params
        .radius_schedule
        .iter()
        .enumerate()
        .map(|(i, &radius)| RadiusFraction {
            radius,
            fraction: records
                .iter()
                .filter(|r| r.labels_by_radius[i] == Label::Conservative)
                .count() as f64
                / n.max(1) as f64,
        })
        .collect();
    let inconclusive_rate = inconclusive as f64 / n.max(1) as f64;
    Ok(MassEstimate {
        samples: n,
        conservative,
        dissipative: count(Label::Dissipative),
        inconclusive,
        fraction: conservative as f64 / n.max(1) as f64,
        interval: wilson_interval(conservative, n),
        inconclusive_rate,
        low_confidence: inconclusive_rate > LOW_CONFIDENCE_RATE,
        fraction_by_radius,
        records,
    })
}

#[cfg(test)]
mod tests;
