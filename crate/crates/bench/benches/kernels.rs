use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use horohopf_bench::{disk_action, ray, subgroup, tree_action};
use horohopf_core::classifier::{classify_point, ClassifierParams, StreamSpec};
use horohopf_core::disk::{orbit_ball, preset, CirclePoint, PresetName};
use horohopf_core::tree::{decide_ep_horospheric, horocycle_counts};

fn tree(c: &mut Criterion) {
    let gens = ["aab", "bAba", "abAAB"];
    c.bench_function("fold/three generators", |b| b.iter(|| subgroup(2, black_box(&gens))));
    let graph = subgroup(2, &["aa", "ab", "ba"]);
    let w = ray("b(aB)");
    c.bench_function("horocycle_counts/index 2, length 40", |b| {
        b.iter(|| horocycle_counts(&graph, black_box(&w), 40).unwrap())
    });
    c.bench_function("decide_ep/index 2", |b| b.iter(|| decide_ep_horospheric(&graph, black_box(&w)).unwrap()));
    let action = tree_action(&["aa", "b"], 30);
    let params = ClassifierParams::default();
    let stream = StreamSpec::tree_uniform(2);
    let omega = ray("(ab)");
    c.bench_function("classify_point/tree", |b| {
        b.iter(|| classify_point(&action, &stream, black_box(&omega), &params).unwrap())
    });
}

fn disk(c: &mut Criterion) {
    let group = preset(PresetName::Schottky, None).unwrap();
    let mut g = c.benchmark_group("disk");
    g.sample_size(10);
    g.bench_function("orbit_ball/schottky radius 14", |b| {
        b.iter(|| orbit_ball(&group, black_box(14.0), 1_000_000).unwrap())
    });
    let action = disk_action(PresetName::Schottky, 18.0);
    let params = ClassifierParams {
        radius_schedule: vec![6.0, 10.0, 14.0, 18.0],
        ..ClassifierParams::default()
    };
    let stream = StreamSpec::disk_visual();
    let xi = CirclePoint::from_angle(1.0);
    g.bench_function("classify_point/schottky radius 18", |b| {
        b.iter(|| classify_point(&action, &stream, black_box(&xi), &params).unwrap())
    });
    g.finish();
}

criterion_group!(benches, tree, disk);
criterion_main!(benches);
