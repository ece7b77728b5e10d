//! Fixtures shared by the criterion benchmarks.

use horohopf_core::classifier::{DiskAction, TreeAction};
use horohopf_core::disk::{orbit_ball, preset, PresetName, DEFAULT_BALL_CAP};
use horohopf_core::tree::{BoundaryRay, ReducedWord, StallingsGraph};

pub fn subgroup(rank: usize, generators: &[&str]) -> StallingsGraph {
    let words: Vec<ReducedWord> = generators
        .iter()
        .map(|g| ReducedWord::parse(g, rank).unwrap())
        .collect();
    StallingsGraph::fold(rank, &words).unwrap()
}

pub fn ray(text: &str) -> BoundaryRay {
    BoundaryRay::parse(text, 2).unwrap()
}

pub fn tree_action(generators: &[&str], radius: usize) -> TreeAction {
    let graph = if generators.is_empty() {
        StallingsGraph::full_group(2).unwrap()
    } else {
        subgroup(2, generators)
    };
    TreeAction::new(graph, radius).unwrap()
}

pub fn disk_action(name: PresetName, radius: f64) -> DiskAction {
    let group = preset(name, None).unwrap();
    DiskAction::new(orbit_ball(&group, radius, DEFAULT_BALL_CAP).unwrap())
}
