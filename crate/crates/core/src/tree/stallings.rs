//! Stallings core graphs of finitely generated subgroups `H <= F_k`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::ray::BoundaryRay;
use super::word::{alphabet, shortlex, Letter, ReducedWord};
use crate::error::{Error, Result};

/// Folded, connected core graph with base vertex `0`.
///
/// `edges[v][l]` is the target of the edge labelled by letter index `l` leaving `v`;
/// every edge `v --x--> u` has its inverse `u --x^-1--> v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallingsGraph {
    rank: usize,
    edges: Vec<Vec<Option<u32>>>,
    generators: Vec<ReducedWord>,
}

/// Result of reading a ray from the base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayReading {
    /// `vertices[i]` is the vertex reached after reading `i` letters.
    pub vertices: Vec<u32>,
    /// Position (1-based) of the first unreadable letter, if reading stopped.
    pub exit_position: Option<usize>,
}

impl RayReading {
    pub fn readable_len(&self) -> usize {
        self.vertices.len() - 1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so the base vertex 0 stays a root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

impl StallingsGraph {
    /// Folds the wedge of generator loops into a deterministic core graph.
    /// An empty generator list (or only trivial words) gives the trivial subgroup.
    pub fn fold(rank: usize, generators: &[ReducedWord]) -> Result<Self> {
        if rank == 0 || rank > super::word::MAX_RANK {
            return Err(Error::InvalidParams(format!("unsupported rank {rank}")));
        }
        for g in generators {
            if let Some(l) = g.letters().iter().find(|l| l.generator() >= rank) {
                return Err(Error::malformed(
                    g.to_string(),
                    format!("letter {l} outside F_{rank}"),
                ));
            }
        }
        // wedge of loops: (from, letter, to) with positive and inverse copies
        let mut n_vertices = 1usize;
        let mut raw: Vec<(usize, Letter, usize)> = Vec::new();
        for g in generators.iter().filter(|g| !g.is_empty()) {
            let letters = g.letters();
            let mut prev = 0usize;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() {
                    0
                } else {
                    n_vertices += 1;
                    n_vertices - 1
                };
                raw.push((prev, l, next));
                raw.push((next, l.inverse(), prev));
                prev = next;
            }
        }

        let mut uf = UnionFind((0..n_vertices).collect());
        loop {
            let mut changed = false;
            let mut targets: Vec<Vec<Option<usize>>> = vec![vec![None; 2 * rank]; n_vertices];
            for &(from, l, to) in &raw {
                let (f, t) = (uf.find(from), uf.find(to));
                match targets[f][l.index()] {
                    None => targets[f][l.index()] = Some(t),
                    Some(existing) => {
                        let existing = uf.find(existing);
                        if existing != t && uf.union(existing, t) {
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut adjacency: Vec<Vec<Option<usize>>> = vec![vec![None; 2 * rank]; n_vertices];
        for &(from, l, to) in &raw {
            adjacency[uf.find(from)][l.index()] = Some(uf.find(to));
        }

        // prune hanging non-base vertices until the graph is a core
        let mut alive: Vec<bool> = (0..n_vertices).map(|v| uf.find(v) == v).collect();
        loop {
            let mut pruned = false;
            for v in 1..n_vertices {
                if !alive[v] {
                    continue;
                }
                let degree = adjacency[v].iter().filter(|t| t.is_some()).count();
                if degree <= 1 {
                    alive[v] = false;
                    for l in 0..2 * rank {
                        if let Some(u) = adjacency[v][l].take() {
                            adjacency[u][l ^ 1] = None;
                        }
                    }
                    pruned = true;
                }
            }
            if !pruned {
                break;
            }
        }

        // canonical numbering: breadth-first from the base in letter order
        let mut order: Vec<Option<u32>> = vec![None; n_vertices];
        let mut queue = VecDeque::from([0usize]);
        order[0] = Some(0);
        let mut visit: Vec<usize> = vec![0];
        while let Some(v) = queue.pop_front() {
            for l in 0..2 * rank {
                if let Some(u) = adjacency[v][l] {
                    if order[u].is_none() {
                        order[u] = Some(visit.len() as u32);
                        visit.push(u);
                        queue.push_back(u);
                    }
                }
            }
        }
        let edges = visit
            .iter()
            .map(|&v| {
                adjacency[v]
                    .iter()
                    .map(|t| t.map(|u| order[u].expect("connected")))
                    .collect()
            })
            .collect();

        Ok(StallingsGraph {
            rank,
            edges,
            generators: generators.to_vec(),
        })
    }

    /// Core graph of the whole group `F_k`: one vertex with a loop per generator.
    pub fn full_group(rank: usize) -> Result<Self> {
        let gens: Vec<ReducedWord> = (0..rank)
            .map(|g| ReducedWord::reduce([Letter::new(g, false)]))
            .collect();
        Self::fold(rank, &gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.len()
    }

    pub fn generators(&self) -> &[ReducedWord] {
        &self.generators
    }

    #[inline]
    pub fn step(&self, vertex: u32, letter: Letter) -> Option<u32> {
        self.edges[vertex as usize][letter.index()]
    }

    pub fn degree(&self, vertex: u32) -> usize {
        self.edges[vertex as usize]
            .iter()
            .filter(|t| t.is_some())
            .count()
    }

    /// Number of positive-letter edges (each geometric edge once).
    pub fn edge_count(&self) -> usize {
        self.edges
            .iter()
            .map(|row| row.iter().step_by(2).filter(|t| t.is_some()).count())
            .sum()
    }

    /// Index of `H` in `F_k` when every vertex has full degree `2k`.
    pub fn finite_index(&self) -> Option<usize> {
        (0..self.vertex_count() as u32)
            .all(|v| self.degree(v) == 2 * self.rank)
            .then(|| self.vertex_count())
    }

    /// Membership: `w` reads as a closed path at the base vertex.
    pub fn contains(&self, w: &ReducedWord) -> bool {
        self.read_from(0, w.letters()) == Some(0)
    }

    pub fn read_from(&self, start: u32, letters: &[Letter]) -> Option<u32> {
        letters
            .iter()
            .try_fold(start, |v, &l| self.step(v, l))
    }

    /// Reads up to `max_letters` letters of the ray from the base vertex.
    pub fn read_ray(&self, ray: &BoundaryRay, max_letters: usize) -> RayReading {
        let letters = ray.prefix(max_letters);
        let mut vertices = vec![0u32];
        for (i, &l) in letters.iter().enumerate() {
            match self.step(*vertices.last().unwrap(), l) {
                Some(u) => vertices.push(u),
                None => {
                    return RayReading {
                        vertices,
                        exit_position: Some(i + 1),
                    }
                }
            }
        }
        RayReading {
            vertices,
            exit_position: None,
        }
    }

    /// All `h in H` with `|h| <= radius`, in shortlex order, identity included.
    ///
    /// Reduced words read non-backtracking paths, and folded graphs read each
    /// word along at most one path, so the output is duplicate-free.
    pub fn enumerate_ball(&self, radius: usize) -> Vec<ReducedWord> {
        let mut out = Vec::new();
        let mut stack: Vec<Letter> = Vec::new();
        self.ball_dfs(0, radius, &mut stack, &mut out);
        out.sort_by(shortlex);
        out
    }

    fn ball_dfs(&self, v: u32, budget: usize, stack: &mut Vec<Letter>, out: &mut Vec<ReducedWord>) {
        if v == 0 {
            out.push(ReducedWord::from_reduced_unchecked(stack.clone()));
        }
        if budget == 0 {
            return;
        }
        for l in alphabet(self.rank) {
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            if let Some(u) = self.step(v, l) {
                stack.push(l);
                self.ball_dfs(u, budget - 1, stack, out);
                stack.pop();
            }
        }
    }

    /// Shortest word labelling a path from `from` to the base vertex.
    pub fn return_path(&self, from: u32) -> ReducedWord {
        let n = self.vertex_count();
        let mut parent: Vec<Option<(u32, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from as usize] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == 0 {
                break;
            }
            for l in alphabet(self.rank) {
                if let Some(u) = self.step(v, l) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        parent[u as usize] = Some((v, l));
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut letters = Vec::new();
        let mut cur = 0u32;
        while cur != from {
            let (p, l) = parent[cur as usize].expect("core graphs are connected");
            letters.push(l);
            cur = p;
        }
        letters.reverse();
        ReducedWord::reduce(letters)
    }

    /// Plain adjacency text: a header line, then `from letter to` per positive edge.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = String::new();
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(
            s,
            "# stallings rank={} vertices={} edges={} base=0 generators={}",
            self.rank,
            self.vertex_count(),
            self.edge_count(),
            gens.join(",")
        );
        for (v, row) in self.edges.iter().enumerate() {
            for (l, t) in row.iter().enumerate().step_by(2) {
                if let Some(u) = t {
                    let _ = writeln!(s, "{v} {} {u}", Letter::from_index(l));
                }
            }
        }
        s
    }
}
