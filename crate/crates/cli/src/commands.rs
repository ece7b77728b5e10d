use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use horohopf_core::classifier::{
    audit_disk_stream, audit_tree_stream, classify_point, disk_audit_pairs, monte_carlo_mass, poincare_partial_sums,
    random_word, sample_seed, tree_audit_pairs, tree_partial_sums_exact, AuditReport, BoundaryAction, ClassifierParams,
    DiskAction, Label, MassEstimate, PointVerdict, RadiusFraction, StreamSpec, TreeAction,
};
use horohopf_core::disk::{CirclePoint, DiskModel, DiskPoint};
use horohopf_core::ergodic::{hopf_partition, to_f64, CountableWeightedAction, HopfPartition, StabilizerClass};
use horohopf_core::hyperbolic::{busemann_limsup, delta_estimate, quasicocycle_defect, SpaceModel};
use horohopf_core::tree::{BoundaryRay, ReducedWord, TreeModel};
use horohopf_core::{ergodic, Error};

use crate::config::*;
use crate::output::Out;
use crate::{CliError, Flags};

/// What the tree and disk actions need beyond [`BoundaryAction`] to run from a config.
trait CliAction: BoundaryAction {
    fn parse_point(&self, p: &PointSpec) -> Result<Self::Point, CliError>;
    fn audit(&self, stream: &StreamSpec, cfg: &AuditConfig, seed: u64) -> horohopf_core::Result<AuditReport>;
    fn exact_series(&self, _omega: &Self::Point, _radii: &[f64]) -> Result<Option<Vec<String>>, CliError> {
        Ok(None)
    }
}

impl CliAction for TreeAction {
    fn parse_point(&self, p: &PointSpec) -> Result<BoundaryRay, CliError> {
        match p {
            PointSpec::Ray(s) => Ok(BoundaryRay::parse(s, self.graph().rank())?),
            PointSpec::Angle(a) => Err(CliError::Config(format!("{a} is an angle; tree points are rays"))),
        }
    }

    fn audit(&self, stream: &StreamSpec, cfg: &AuditConfig, seed: u64) -> horohopf_core::Result<AuditReport> {
        audit_tree_stream(stream, &tree_audit_pairs(self.graph().rank(), cfg.pairs, seed, cfg.max_len))
    }

    fn exact_series(&self, omega: &BoundaryRay, radii: &[f64]) -> Result<Option<Vec<String>>, CliError> {
        let radii: Vec<usize> = radii.iter().map(|&r| r as usize).collect();
        let sums = tree_partial_sums_exact(self.graph(), omega, &radii)?;
        Ok(Some(sums.iter().map(|q| q.to_string()).collect()))
    }
}

impl CliAction for DiskAction {
    fn parse_point(&self, p: &PointSpec) -> Result<CirclePoint, CliError> {
        let angle = match p {
            PointSpec::Angle(a) => *a,
            PointSpec::Ray(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{s:?} is not an angle")))?,
        };
        if !angle.is_finite() {
            return Err(CliError::Config(format!("angle {angle} is not finite")));
        }
        Ok(CirclePoint::from_angle(angle))
    }

    fn audit(&self, stream: &StreamSpec, cfg: &AuditConfig, seed: u64) -> horohopf_core::Result<AuditReport> {
        audit_disk_stream(stream, &disk_audit_pairs(self.ball(), cfg.pairs, seed))
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

#[derive(Serialize)]
struct AuditOutcome<'a> {
    passed: bool,
    report: Option<&'a AuditReport>,
    error: Option<String>,
}

/// Runs the stream audit and records it; a failed audit ends the run.
fn audit_or_abort<A: CliAction>(
    out: &Out,
    action: &A,
    stream: &StreamSpec,
    cfg: &AuditConfig,
    seed: u64,
) -> Result<AuditReport, CliError> {
    match action.audit(stream, cfg, seed) {
        Ok(report) => {
            out.json(
                "audit.json",
                &AuditOutcome {
                    passed: true,
                    report: Some(&report),
                    error: None,
                },
            )?;
            Ok(report)
        }
        Err(e) => {
            out.json(
                "audit.json",
                &AuditOutcome {
                    passed: false,
                    report: None,
                    error: Some(e.to_string()),
                },
            )?;
            Err(e.into())
        }
    }
}

// ---------------------------------------------------------------- classify

#[derive(Serialize)]
struct VerdictRecord<P> {
    index: usize,
    seed: Option<u64>,
    verdict: PointVerdict<P>,
}

#[derive(Serialize)]
struct ClassifySummary {
    points: usize,
    conservative: usize,
    dissipative: usize,
    inconclusive: usize,
    exact_decisions: usize,
    audit: AuditReport,
}

pub fn classify(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: ClassifyConfig = load(flags.config()?)?;
    if let Some(seed) = flags.seed {
        cfg.params.seed = seed;
    }
    if let Some(r) = flags.radius_max {
        cap_schedule(&mut cfg.params, r)?;
    }
    let out = Out::new(&flags.out, "classify")?;
    out.resolved(&cfg)?;
    cfg.params.validate()?;
    let stream = cfg.model.stream(&cfg.stream);
    match cfg.model.build(cfg.params.max_radius())? {
        Model::Tree(a) => classify_with(&out, &a, &stream, &cfg, flags.workers),
        Model::Disk(a) => classify_with(&out, &a, &stream, &cfg, flags.workers),
    }
}

fn classify_with<A: CliAction>(
    out: &Out,
    action: &A,
    stream: &StreamSpec,
    cfg: &ClassifyConfig,
    workers: usize,
) -> Result<(), CliError> {
    let params = &cfg.params;
    let audit = audit_or_abort(out, action, stream, &cfg.audit, params.seed)?;
    let points: Vec<(Option<u64>, A::Point)> = match &cfg.points {
        Some(list) => list
            .iter()
            .map(|p| Ok((None, action.parse_point(p)?)))
            .collect::<Result<_, CliError>>()?,
        None => (0..params.sample_count)
            .map(|i| {
                let seed = sample_seed(params.seed, i);
                Ok((Some(seed), action.sample(seed)?))
            })
            .collect::<Result<_, CliError>>()?,
    };
    let records = pool(workers)?.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, (seed, omega))| {
                Ok(VerdictRecord {
                    index,
                    seed: *seed,
                    verdict: classify_point(action, stream, omega, params)?,
                })
            })
            .collect::<horohopf_core::Result<Vec<_>>>()
    })?;
    out.jsonl("verdicts.jsonl", &records)?;
    let count = |l: Label| records.iter().filter(|r| r.verdict.label == l).count();
    let summary = ClassifySummary {
        points: records.len(),
        conservative: count(Label::Conservative),
        dissipative: count(Label::Dissipative),
        inconclusive: count(Label::Inconclusive),
        exact_decisions: records.iter().filter(|r| r.verdict.flags.exact_decision.is_some()).count(),
        audit,
    };
    out.json("summary.json", &summary)?;
    println!(
        "classify: {} points, {} conservative, {} dissipative, {} inconclusive",
        summary.points, summary.conservative, summary.dissipative, summary.inconclusive
    );
    Ok(())
}

// ---------------------------------------------------------------- hopf-mass

#[derive(Serialize)]
struct MassSummary<'a> {
    samples: usize,
    conservative: usize,
    dissipative: usize,
    inconclusive: usize,
    fraction: f64,
    interval: [f64; 2],
    inconclusive_rate: f64,
    low_confidence: bool,
    fraction_by_radius: &'a [RadiusFraction],
    audit: AuditReport,
}

pub fn hopf_mass(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: MassConfig = load(flags.config()?)?;
    if let Some(seed) = flags.seed {
        cfg.params.seed = seed;
    }
    if let Some(r) = flags.radius_max {
        cap_schedule(&mut cfg.params, r)?;
    }
    let out = Out::new(&flags.out, "hopf-mass")?;
    out.resolved(&cfg)?;
    cfg.params.validate()?;
    let stream = cfg.model.stream(&cfg.stream);
    let (estimate, audit) = match cfg.model.build(cfg.params.max_radius())? {
        Model::Tree(a) => mass_with(&out, &a, &stream, &cfg, flags.workers)?,
        Model::Disk(a) => mass_with(&out, &a, &stream, &cfg, flags.workers)?,
    };
    out.jsonl("samples.jsonl", &estimate.records)?;
    out.csv("fraction_by_radius.csv", &estimate.fraction_by_radius)?;
    out.json(
        "mass.json",
        &MassSummary {
            samples: estimate.samples,
            conservative: estimate.conservative,
            dissipative: estimate.dissipative,
            inconclusive: estimate.inconclusive,
            fraction: estimate.fraction,
            interval: estimate.interval,
            inconclusive_rate: estimate.inconclusive_rate,
            low_confidence: estimate.low_confidence,
            fraction_by_radius: &estimate.fraction_by_radius,
            audit,
        },
    )?;
    if estimate.low_confidence {
        eprintln!(
            "warning: low confidence, {:.1}% of samples inconclusive",
            100.0 * estimate.inconclusive_rate
        );
    }
    println!(
        "hopf-mass: fraction {:.4} in [{:.4}, {:.4}] over {} samples ({} inconclusive)",
        estimate.fraction, estimate.interval[0], estimate.interval[1], estimate.samples, estimate.inconclusive
    );
    Ok(())
}

fn mass_with<A: CliAction>(
    out: &Out,
    action: &A,
    stream: &StreamSpec,
    cfg: &MassConfig,
    workers: usize,
) -> Result<(MassEstimate, AuditReport), CliError> {
    let audit = audit_or_abort(out, action, stream, &cfg.audit, cfg.params.seed)?;
    Ok((monte_carlo_mass(action, stream, &cfg.params, workers)?, audit))
}

// ---------------------------------------------------------------- series

#[derive(Serialize)]
struct SeriesRow {
    point: String,
    radius: f64,
    partial_sum: f64,
    exact: Option<String>,
}

pub fn series(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: SeriesConfig = load(flags.config()?)?;
    if let Some(r) = flags.radius_max {
        cfg.radii.retain(|&x| x <= r);
    }
    let out = Out::new(&flags.out, "series")?;
    out.resolved(&cfg)?;
    let params = ClassifierParams {
        radius_schedule: cfg.radii.clone(),
        ..ClassifierParams::default()
    };
    params.validate()?;
    let stream = cfg.model.stream(&cfg.stream);
    let rows = match cfg.model.build(params.max_radius())? {
        Model::Tree(a) => series_with(&a, &stream, &cfg, &params)?,
        Model::Disk(a) => series_with(&a, &stream, &cfg, &params)?,
    };
    out.csv("series.csv", &rows)?;
    println!("series: {} rows", rows.len());
    Ok(())
}

fn series_with<A: CliAction>(
    action: &A,
    stream: &StreamSpec,
    cfg: &SeriesConfig,
    params: &ClassifierParams,
) -> Result<Vec<SeriesRow>, CliError> {
    let mut rows = Vec::new();
    for p in &cfg.points {
        let omega = action.parse_point(p)?;
        let sums = poincare_partial_sums(action, stream, &omega, params)?;
        let exact = if stream.reweight_seed.is_none() {
            action.exact_series(&omega, &params.radius_schedule)?
        } else {
            None
        };
        for (i, (&radius, &partial_sum)) in params.radius_schedule.iter().zip(&sums).enumerate() {
            rows.push(SeriesRow {
                point: omega.to_string(),
                radius,
                partial_sum,
                exact: exact.as_ref().map(|e| e[i].clone()),
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------- ergodic-lab

#[derive(Serialize)]
struct OrbitRow {
    action: String,
    base_point: String,
    stabilizer: String,
    freeness: String,
    cell: &'static str,
    verdict: String,
    mu_lower: f64,
    mu_upper: Option<f64>,
    mu_exact: bool,
    iii: bool,
    iv: bool,
    v: bool,
    equivalences: bool,
}

#[derive(Serialize)]
struct LabEntry {
    name: String,
    passed: bool,
    partition: Option<HopfPartition>,
    error: Option<String>,
}

fn label<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

pub fn ergodic_lab(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: ErgodicLabConfig = load(flags.config()?)?;
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(r) = flags.radius_max {
        cfg.depth = r as usize;
    }
    let out = Out::new(&flags.out, "ergodic-lab")?;
    out.resolved(&cfg)?;
    let mut named: Vec<NamedAction> = Vec::new();
    if cfg.battery {
        named.extend(ergodic::canonical_battery().into_iter().map(|(name, action)| NamedAction {
            name: name.into(),
            action,
        }));
    }
    named.extend(cfg.actions.iter().cloned());
    if named.is_empty() {
        return Err(CliError::Config("no actions: set battery or list actions".into()));
    }
    // building every action first separates config errors from invariant failures
    let actions = named
        .iter()
        .map(|n| {
            let mut spec = n.action.clone();
            if cfg.reweight {
                // the hashed factors break invariance and total mass but keep the measure class
                spec.reweight_seed = Some(cfg.seed);
                spec.invariant = false;
                spec.normalized = false;
            }
            CountableWeightedAction::new(spec).map_err(|e| CliError::Config(format!("{}: {e}", n.name)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let results = pool(flags.workers)?.install(|| {
        actions
            .iter()
            .map(|a| hopf_partition(a, cfg.depth))
            .collect::<Vec<_>>()
    });
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for (n, result) in named.iter().zip(results) {
        match result {
            Ok(p) => {
                for r in &p.reports {
                    rows.push(OrbitRow {
                        action: n.name.clone(),
                        base_point: r.base_point.to_string(),
                        stabilizer: match r.stabilizer {
                            StabilizerClass::Trivial => "trivial".into(),
                            StabilizerClass::Finite(n) => format!("finite({n})"),
                            StabilizerClass::Infinite => "infinite".into(),
                        },
                        freeness: label(&r.freeness),
                        cell: r.cell.name(),
                        verdict: label(&r.verdict),
                        mu_lower: to_f64(&r.mu_total.lower.0),
                        mu_upper: r.mu_total.upper.as_ref().map(|q| to_f64(&q.0)),
                        mu_exact: r.mu_total.exact,
                        iii: r.conditions.iii.holds,
                        iv: r.conditions.iv.holds,
                        v: r.conditions.v.holds,
                        equivalences: r.equivalences_checked.all(),
                    });
                }
                let passed = p.all_checks_pass();
                if !passed {
                    violations.push(format!("{}: behavior checks failed", n.name));
                }
                entries.push(LabEntry {
                    name: n.name.clone(),
                    passed,
                    partition: Some(p),
                    error: None,
                });
            }
            Err(e @ Error::InvariantViolation(_)) => {
                violations.push(format!("{}: {e}", n.name));
                entries.push(LabEntry {
                    name: n.name.clone(),
                    passed: false,
                    partition: None,
                    error: Some(e.to_string()),
                });
            }
            Err(e) => return Err(CliError::from(e)),
        }
    }
    out.csv("orbits.csv", &rows)?;
    out.json("partitions.json", &entries)?;
    println!(
        "ergodic-lab: {} actions, {} orbits, {} violations",
        entries.len(),
        rows.len(),
        violations.len()
    );
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(violations.join("; ")))
    }
}

// ---------------------------------------------------------------- delta-check

#[derive(Serialize)]
struct DeltaReport {
    model: &'static str,
    points: usize,
    delta_estimate: f64,
    declared_delta: f64,
    triples: usize,
    max_defect: f64,
    declared_defect: f64,
    /// Largest gap between the closed-form Busemann function and its finite-difference estimate.
    limsup_max_gap: f64,
    passed: bool,
}

const DELTA_TOLERANCE: f64 = 1e-9;
const LIMSUP_TOLERANCE: f64 = 1e-6;

fn random_disk_point(rng: &mut ChaCha8Rng, radius: f64) -> DiskPoint {
    let d = rng.gen_range(0.0..=radius);
    let z = num_complex::Complex64::from_polar((d / 2.0).tanh(), rng.gen_range(0.0..std::f64::consts::TAU));
    DiskPoint::new(z).expect("tanh < 1")
}

fn check_model<M: SpaceModel>(
    name: &'static str,
    model: &M,
    cfg: &DeltaConfig,
    rng: &mut ChaCha8Rng,
    point: impl Fn(&mut ChaCha8Rng) -> M::Point,
    boundary: impl Fn(&mut ChaCha8Rng) -> horohopf_core::Result<M::Boundary>,
) -> Result<DeltaReport, CliError> {
    let sample: Vec<M::Point> = (0..cfg.points).map(|_| point(rng)).collect();
    let delta = delta_estimate(model, &sample);
    let mut max_defect = 0.0f64;
    let mut max_gap = 0.0f64;
    for _ in 0..cfg.triples {
        let omega = boundary(rng)?;
        let (x, y, z) = (point(rng), point(rng), point(rng));
        let c = quasicocycle_defect(model, &omega, &x, &y, &z, cfg.depth)?;
        max_defect = max_defect.max(c.abs());
        if let Some(exact) = model.exact_busemann(&omega, &x, &y) {
            let approx = busemann_limsup(model, &omega, &x, &y, cfg.depth, 0.0, 0)?;
            max_gap = max_gap.max((exact? - approx.value).abs());
        }
    }
    let passed = delta <= model.delta() + DELTA_TOLERANCE
        && max_defect <= model.defect() + DELTA_TOLERANCE
        && max_gap <= LIMSUP_TOLERANCE;
    Ok(DeltaReport {
        model: name,
        points: cfg.points,
        delta_estimate: delta,
        declared_delta: model.delta(),
        triples: cfg.triples,
        max_defect,
        declared_defect: model.defect(),
        limsup_max_gap: max_gap,
        passed,
    })
}

pub fn delta_check(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: DeltaConfig = load(flags.config()?)?;
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(r) = flags.radius_max {
        cfg.radius = r;
    }
    let out = Out::new(&flags.out, "delta-check")?;
    out.resolved(&cfg)?;
    if !(cfg.radius >= 0.0 && cfg.radius.is_finite()) {
        return Err(CliError::Config("radius must be finite and nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let report = match &cfg.model {
        ModelConfig::Tree(t) => {
            let rank = t.rank;
            let max_len = cfg.radius as usize;
            let model = TreeModel { rank };
            check_model(
                "tree",
                &model,
                &cfg,
                &mut rng,
                |r: &mut ChaCha8Rng| -> ReducedWord {
                    let len = r.gen_range(0..=max_len);
                    random_word(rank, len, r)
                },
                |r: &mut ChaCha8Rng| {
                    let seed = r.gen();
                    BoundaryRay::sample_uniform(rank, seed, 2 * max_len + cfg.depth)
                },
            )?
        }
        ModelConfig::Disk(_) => check_model(
            "disk",
            &DiskModel,
            &cfg,
            &mut rng,
            |r: &mut ChaCha8Rng| random_disk_point(r, cfg.radius),
            |r: &mut ChaCha8Rng| Ok(CirclePoint::from_angle(r.gen_range(0.0..std::f64::consts::TAU))),
        )?,
    };
    out.json("delta.json", &report)?;
    println!(
        "delta-check: delta {:.6} (declared {:.6}), defect {:.3e}, limsup gap {:.3e}",
        report.delta_estimate, report.declared_delta, report.max_defect, report.limsup_max_gap
    );
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Invariant("model exceeds its declared constants".into()))
    }
}

// ---------------------------------------------------------------- audit-stream

pub fn audit_stream(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: AuditStreamConfig = load(flags.config()?)?;
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(r) = flags.radius_max {
        cfg.radius = r;
    }
    let out = Out::new(&flags.out, "audit-stream")?;
    out.resolved(&cfg)?;
    let stream = cfg.model.stream(&cfg.stream);
    let radius = match cfg.model {
        ModelConfig::Tree(_) => cfg.audit.max_len as f64,
        ModelConfig::Disk(_) => cfg.radius,
    };
    let report = match cfg.model.build(radius)? {
        Model::Tree(a) => audit_or_abort(&out, &a, &stream, &cfg.audit, cfg.seed)?,
        Model::Disk(a) => audit_or_abort(&out, &a, &stream, &cfg.audit, cfg.seed)?,
    };
    println!(
        "audit-stream: {} samples, max deviation {:.3e} within defect {}",
        report.samples, report.max_deviation, report.defect
    );
    Ok(())
}

// ---------------------------------------------------------------- fold

#[derive(Serialize)]
struct FoldReport {
    rank: usize,
    generators: Vec<String>,
    vertices: usize,
    edges: usize,
    /// Subgroup rank: `edges - vertices + 1`.
    subgroup_rank: usize,
    finite_index: Option<usize>,
    ball_radius: Option<usize>,
    ball_size: Option<usize>,
}

#[derive(Serialize)]
struct BallRow {
    element: String,
    length: usize,
}

pub fn fold(flags: &Flags) -> Result<(), CliError> {
    let mut cfg: FoldConfig = load(flags.config()?)?;
    if let Some(r) = flags.radius_max {
        cfg.ball_radius = Some(r as usize);
    }
    let out = Out::new(&flags.out, "fold")?;
    out.resolved(&cfg)?;
    let graph = TreeConfig {
        rank: cfg.rank,
        generators: cfg.generators.clone(),
        full_group: false,
    }
    .graph()?;
    out.text("graph.txt", &graph.to_adjacency_text())?;
    let ball = cfg.ball_radius.map(|r| graph.enumerate_ball(r));
    if let Some(ball) = &ball {
        let rows: Vec<BallRow> = ball
            .iter()
            .map(|w| BallRow {
                element: if w.is_empty() { "e".into() } else { w.to_string() },
                length: w.len(),
            })
            .collect();
        out.csv("ball.csv", &rows)?;
    }
    let report = FoldReport {
        rank: cfg.rank,
        generators: graph.generators().iter().map(|w| w.to_string()).collect(),
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        subgroup_rank: graph.edge_count() + 1 - graph.vertex_count(),
        finite_index: graph.finite_index(),
        ball_radius: cfg.ball_radius,
        ball_size: ball.as_ref().map(Vec::len),
    };
    out.json("fold.json", &report)?;
    println!(
        "fold: {} vertices, {} edges, index {}",
        report.vertices,
        report.edges,
        report.finite_index.map_or("infinite".to_string(), |i| i.to_string())
    );
    Ok(())
}

