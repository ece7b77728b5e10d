use super::*;
use crate::disk::{orbit_ball, preset, PresetName, DEFAULT_BALL_CAP};

fn w(s: &str) -> ReducedWord {
    ReducedWord::parse(s, 2).unwrap()
}

fn ray(s: &str) -> BoundaryRay {
    BoundaryRay::parse(s, 2).unwrap()
}

fn tree(gens: &[&str], max_len: usize) -> TreeAction {
    let gens: Vec<ReducedWord> = gens.iter().map(|s| w(s)).collect();
    TreeAction::new(StallingsGraph::fold(2, &gens).unwrap(), max_len).unwrap()
}

fn params(schedule: &[f64]) -> ClassifierParams {
    ClassifierParams {
        radius_schedule: schedule.to_vec(),
        ..ClassifierParams::default()
    }
}

fn stream() -> StreamSpec {
    StreamSpec::tree_uniform(2)
}

fn occupancy_at(action: &TreeAction, omega: &str, t: f64, r: f64) -> u128 {
    let p = ClassifierParams {
        radius_schedule: vec![0.0, r],
        thresholds: vec![t],
        ..ClassifierParams::default()
    };
    let table = occupancy_table(action, &stream(), &ray(omega), &p).unwrap();
    assert_eq!(table.min, table.max);
    table.min[0][1]
}

#[test]
fn occupancy_examples() {
    assert_eq!(occupancy_at(&tree(&["a"], 5), "(a)", 0.0, 5.0), 6);
    assert_eq!(occupancy_at(&tree(&["b"], 9), "(a)", 0.0, 9.0), 1);
    assert_eq!(occupancy_at(&tree(&["a", "b"], 3), "(a)", 0.0, 3.0), 8);
}

#[test]
fn series_examples() {
    let a = tree(&["a"], 40);
    let exact = tree_partial_sums_exact(a.graph(), &ray("(a)"), &[2]).unwrap();
    assert_eq!(exact[0], BigRational::new(121.into(), 9.into()));
    let s = poincare_partial_sums(&a, &stream(), &ray("(a)"), &params(&[1.0, 2.0])).unwrap();
    assert!((s[1] - 121.0 / 9.0).abs() < 1e-12);
    let s = poincare_partial_sums(&a, &stream(), &ray("(b)"), &params(&[10.0, 40.0])).unwrap();
    assert!((s[1] - 2.0).abs() < 1e-9);
    assert!(s[0] < s[1]);
    let trivial = TreeAction::new(StallingsGraph::fold(2, &[]).unwrap(), 10).unwrap();
    let s = poincare_partial_sums(&trivial, &stream(), &ray("(ab)"), &params(&[0.0, 5.0, 10.0])).unwrap();
    assert_eq!(s, vec![1.0, 1.0, 1.0]);
}

#[test]
fn classify_examples() {
    let p = ClassifierParams::default();
    let index2 = tree(&["aa", "ab", "ba"], 30);
    let v = classify_point(&index2, &stream(), &ray("(a)"), &p).unwrap();
    assert_eq!((v.label, v.heuristic_label), (Label::Conservative, Label::Conservative));
    assert_eq!(v.flags.exact_decision, Some(true));

    let a = tree(&["a"], 30);
    let v = classify_point(&a, &stream(), &ray("b(a)"), &p).unwrap();
    assert_eq!(v.label, Label::Dissipative);
    assert_eq!(v.flags.exact_decision, Some(false));

    let trivial = TreeAction::new(StallingsGraph::fold(2, &[]).unwrap(), 30).unwrap();
    let v = classify_point(&trivial, &stream(), &ray("(ab)"), &p).unwrap();
    assert_eq!((v.label, v.heuristic_label), (Label::Dissipative, Label::Dissipative));
}

#[test]
fn exact_conflict_is_an_error() {
    // a^20 followed by b: far beyond the schedule the orbit leaves the ray, but every
    // observed step still shows growth
    let a = tree(&["a"], 18);
    let omega = BoundaryRay::eventually_periodic(&w("a").pow(20), &w("b")).unwrap();
    let r = classify_point(&a, &stream(), &omega, &params(&[6.0, 12.0, 18.0]));
    assert!(matches!(r, Err(Error::DecisionConflict(_))), "{r:?}");
}

#[test]
fn probes() {
    let p = ClassifierParams::default();
    let flags = |gens: &[&str], omega: &str| classify_point(&tree(gens, 30), &stream(), &ray(omega), &p).unwrap().flags;
    assert!(flags(&["a"], "(a)").small_horospheric_probe);
    assert!(!flags(&["b"], "(a)").small_horospheric_probe);
    assert!(flags(&["a", "b"], "(a)").small_horospheric_probe);
    assert!(flags(&["a"], "(a)").radial_probe);
    assert!(!flags(&["a"], "(b)").radial_probe);
    assert!(flags(&["a", "b"], "(ba)").radial_probe);
    assert!(radial_probe(&tree(&["a", "b"], 30), &stream(), &ray("B(ab)"), &p).unwrap());
}

#[test]
fn series_dominates_occupancy() {
    let s = stream();
    for (gens, omega) in [(&["a"][..], "(a)"), (&["aa", "ab"], "b(ab)"), (&["ab"], "(aB)")] {
        let action = tree(gens, 30);
        let p = ClassifierParams::default();
        let profile = action.profile(&ray(omega), &s, &p).unwrap();
        for (ti, &t) in p.thresholds.iter().enumerate().filter(|(_, &t)| t >= 0.0) {
            for ri in 0..p.radius_schedule.len() {
                let n = profile.occupancy.min[ti][ri] as f64;
                let bound = n * (s.dimension * (-t - s.defect)).exp();
                assert!(profile.series[ri] >= bound * (1.0 - 1e-12));
            }
        }
    }
}

#[test]
fn stream_audits() {
    let pairs = tree_audit_pairs(2, 300, 3, 12);
    let report = audit_tree_stream(&stream(), &pairs).unwrap();
    assert_eq!(report.max_deviation, 0.0);
    let identity: Vec<_> = pairs.iter().map(|(_, r)| (ReducedWord::identity(), r.clone())).collect();
    assert_eq!(audit_tree_stream(&stream(), &identity).unwrap().max_deviation, 0.0);

    let noisy = stream().reweighted(5);
    let report = audit_tree_stream(&noisy, &pairs).unwrap();
    assert!(report.max_deviation > 0.1 && report.max_deviation <= std::f64::consts::LN_2 + 1e-12);
    let liar = StreamSpec { defect: 0.0, ..noisy };
    assert!(matches!(audit_tree_stream(&liar, &pairs), Err(Error::StreamAudit(_))));

    for name in [PresetName::LatticePsl2z, PresetName::Schottky] {
        let ball = orbit_ball(&preset(name, None).unwrap(), 12.0, DEFAULT_BALL_CAP).unwrap();
        let report = audit_disk_stream(&StreamSpec::disk_visual(), &disk_audit_pairs(&ball, 500, 9)).unwrap();
        assert!(report.max_deviation <= 1e-9, "{name}: {}", report.max_deviation);
    }
}

#[test]
fn disk_profile_is_monotone() {
    let ball = orbit_ball(&preset(PresetName::LatticePsl2z, None).unwrap(), 8.0, DEFAULT_BALL_CAP).unwrap();
    let action = DiskAction::new(ball);
    let p = params(&[2.0, 4.0, 6.0, 8.0]);
    for k in 0..20 {
        let xi = action.sample(k).unwrap();
        let profile = action.profile(&xi, &StreamSpec::disk_visual(), &p).unwrap();
        let occ = &profile.occupancy;
        for t in 0..occ.thresholds.len() {
            for r in 0..occ.radii.len() {
                assert!(occ.min[t][r] <= occ.max[t][r]);
                if r > 0 {
                    assert!(occ.min[t][r] >= occ.min[t][r - 1]);
                }
                if t > 0 {
                    assert!(occ.min[t][r] >= occ.min[t - 1][r]);
                }
            }
        }
        assert!(profile.series.windows(2).all(|w| w[0] <= w[1]));
        // the identity is in every horoball of level >= 0 and contributes 1
        assert!(profile.series[0] >= 1.0);
    }
}

#[test]
fn disk_series_matches_direct_sum() {
    let ball = orbit_ball(&preset(PresetName::Schottky, None).unwrap(), 16.0, DEFAULT_BALL_CAP).unwrap();
    let xi = CirclePoint::from_angle(0.7);
    let direct: f64 = ball
        .iter()
        .map(|e| crate::disk::visual_density(&e.map, &xi).unwrap())
        .sum();
    let action = DiskAction::new(ball);
    let s = poincare_partial_sums(&action, &StreamSpec::disk_visual(), &xi, &params(&[8.0, 16.0])).unwrap();
    assert!((s[1] - direct).abs() < 1e-12 * direct);
}

#[test]
fn wilson_bounds() {
    assert_eq!(wilson_interval(0, 1000)[0], 0.0);
    assert_eq!(wilson_interval(50, 50)[1], 1.0);
    let [lo, hi] = wilson_interval(500, 1000);
    assert!((lo - 0.469).abs() < 1e-3 && (hi - 0.531).abs() < 1e-3);
}

#[test]
fn monte_carlo_is_deterministic() {
    let action = tree(&["aa", "ab", "ba"], 18);
    let p = ClassifierParams {
        radius_schedule: vec![6.0, 12.0, 18.0],
        sample_count: 64,
        seed: 17,
        ..ClassifierParams::default()
    };
    let one = monte_carlo_mass(&action, &stream(), &p, 1).unwrap();
    let four = monte_carlo_mass(&action, &stream(), &p, 4).unwrap();
    let a = serde_json::to_string(&one.records).unwrap();
    let b = serde_json::to_string(&four.records).unwrap();
    assert_eq!(a, b);
    assert_eq!(one.conservative, 64);
    assert!(!one.low_confidence);
}

#[test]
fn params_are_validated() {
    let mut p = ClassifierParams::default();
    p.radius_schedule = vec![5.0, 3.0];
    assert!(p.validate().is_err());
    let mut p = ClassifierParams::default();
    p.cauchy_eps = 0.0;
    assert!(p.validate().is_err());
    let p = params(&[6.0, 12.5]);
    assert!(classify_point(&tree(&["a"], 30), &stream(), &ray("(a)"), &p).is_err());
    let p = params(&[6.0, 40.0]);
    assert!(classify_point(&tree(&["a"], 30), &stream(), &ray("(a)"), &p).is_err());
    assert!(classify_point(&tree(&["a"], 30), &StreamSpec::disk_visual(), &ray("(a)"), &params(&[1.0, 2.0])).is_err());
    assert!(serde_json::from_str::<ClassifierParams>(r#"{"radius": [1, 2]}"#).is_err());
}
