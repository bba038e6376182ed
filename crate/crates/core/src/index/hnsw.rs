//! Hierarchical navigable small-world graph over `f32` vectors with squared
//! Euclidean distance.
//!
//! Construction is sequential and seeded, so a given point order and seed
//! always produce the same graph. After construction the graph is read-only;
//! per-query state lives in [`Searcher`].

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::Rng;

use crate::error::{Error, Result};
use crate::haar::seeded_rng;
use crate::math;

const MAX_LEVEL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Scored {
    dist: f32,
    id: u32,
}

impl Eq for Scored {}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[inline]
pub(crate) fn squared_l2(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for i in 0..8 {
            let d = x[i] - y[i];
            acc[i] += d * d;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        let d = x - y;
        tail += d * d;
    }
    acc.iter().sum::<f32>() + tail
}

/// Reusable per-thread scratch for graph traversal.
pub struct Searcher {
    visited: Vec<u32>,
    epoch: u32,
    candidates: BinaryHeap<Reverse<Scored>>,
    results: BinaryHeap<Scored>,
}

impl Searcher {
    pub fn new(points: usize) -> Self {
        Searcher {
            visited: vec![0; points],
            epoch: 0,
            candidates: BinaryHeap::new(),
            results: BinaryHeap::new(),
        }
    }

    fn reset(&mut self, points: usize) {
        if self.visited.len() < points {
            self.visited.resize(points, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.visited.iter_mut().for_each(|v| *v = 0);
            self.epoch = 1;
        }
        self.candidates.clear();
        self.results.clear();
    }

    #[inline]
    fn visit(&mut self, id: u32) -> bool {
        let slot = &mut self.visited[id as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }
}

/// Raw graph arrays, used for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphParts {
    pub max_degree: u32,
    pub levels: Vec<u8>,
    /// `levels.len() * 2 * max_degree` slots; node `i` owns
    /// `layer0[i*cap .. i*cap + layer0_counts[i]]`.
    pub layer0: Vec<u32>,
    pub layer0_counts: Vec<u32>,
    /// `upper[i][l - 1]` lists node `i`'s neighbours on layer `l >= 1`.
    pub upper: Vec<Vec<Vec<u32>>>,
    pub entry: u32,
}

#[derive(Debug, Clone)]
pub struct Hnsw {
    stride: usize,
    max_degree: usize,
    layer0_cap: usize,
    levels: Vec<u8>,
    layer0: Vec<u32>,
    layer0_counts: Vec<u32>,
    upper: Vec<Vec<Vec<u32>>>,
    entry: u32,
    max_level: usize,
}

impl Hnsw {
    /// Builds over `vectors` (row-major, `stride` floats per point).
    pub fn build(vectors: &[f32], stride: usize, max_degree: usize, build_beam: usize, seed: u64) -> Result<Self> {
        if stride == 0 || vectors.len() % stride != 0 || vectors.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if max_degree < 2 {
            return Err(Error::invalid("max_degree", "must be at least 2"));
        }
        let n = vectors.len() / stride;
        if n > u32::MAX as usize {
            return Err(Error::invalid("points", "more than 2^32 points"));
        }
        let level_scale = 1.0 / math::ln(max_degree as f64);
        let mut rng = seeded_rng(seed);
        let levels: Vec<u8> = (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                (math::floor(-math::ln(u) * level_scale) as usize).min(MAX_LEVEL) as u8
            })
            .collect();
        let layer0_cap = 2 * max_degree;
        let mut graph = Hnsw {
            stride,
            max_degree,
            layer0_cap,
            layer0: vec![0; n * layer0_cap],
            layer0_counts: vec![0; n],
            upper: levels.iter().map(|&l| vec![Vec::new(); l as usize]).collect(),
            levels,
            entry: 0,
            max_level: 0,
        };
        graph.max_level = graph.levels[0] as usize;
        let mut searcher = Searcher::new(n);
        let beam = build_beam.max(max_degree);
        for id in 1..n as u32 {
            graph.insert(vectors, id, beam, &mut searcher);
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn neighbors(&self, id: u32, layer: usize) -> &[u32] {
        if layer == 0 {
            let start = id as usize * self.layer0_cap;
            &self.layer0[start..start + self.layer0_counts[id as usize] as usize]
        } else {
            self.upper[id as usize].get(layer - 1).map(Vec::as_slice).unwrap_or(&[])
        }
    }

    fn vector<'v>(&self, vectors: &'v [f32], id: u32) -> &'v [f32] {
        &vectors[id as usize * self.stride..(id as usize + 1) * self.stride]
    }

    fn insert(&mut self, vectors: &[f32], id: u32, beam: usize, searcher: &mut Searcher) {
        let query = self.vector(vectors, id);
        let level = self.levels[id as usize] as usize;
        let mut entry = Scored {
            dist: squared_l2(query, self.vector(vectors, self.entry)),
            id: self.entry,
        };
        for layer in (level + 1..=self.max_level).rev() {
            entry = self.greedy(vectors, query, entry, layer);
        }
        let mut entries = vec![entry];
        for layer in (0..=level.min(self.max_level)).rev() {
            let found = self.search_layer(vectors, query, &entries, beam, layer, searcher);
            let chosen = self.select(vectors, &found, self.max_degree);
            self.set_links(id, layer, chosen.iter().map(|s| s.id).collect());
            for s in &chosen {
                self.link_back(vectors, s.id, id, s.dist, layer);
            }
            entries = found;
        }
        if level > self.max_level {
            self.max_level = level;
            self.entry = id;
        }
    }

    fn set_links(&mut self, id: u32, layer: usize, links: Vec<u32>) {
        if layer == 0 {
            let start = id as usize * self.layer0_cap;
            self.layer0[start..start + links.len()].copy_from_slice(&links);
            self.layer0_counts[id as usize] = links.len() as u32;
        } else {
            self.upper[id as usize][layer - 1] = links;
        }
    }

    fn link_back(&mut self, vectors: &[f32], from: u32, to: u32, dist: f32, layer: usize) {
        let cap = if layer == 0 { self.layer0_cap } else { self.max_degree };
        let current = self.neighbors(from, layer);
        if current.len() < cap {
            let mut links = current.to_vec();
            links.push(to);
            self.set_links(from, layer, links);
            return;
        }
        let base = self.vector(vectors, from);
        let mut pool: Vec<Scored> = current
            .iter()
            .map(|&n| Scored {
                dist: squared_l2(base, self.vector(vectors, n)),
                id: n,
            })
            .collect();
        pool.push(Scored { dist, id: to });
        pool.sort();
        let kept = self.select(vectors, &pool, cap);
        self.set_links(from, layer, kept.iter().map(|s| s.id).collect());
    }

    /// Diversity heuristic: keep a candidate only if it is closer to the base
    /// point than to every neighbour already kept. `sorted` must be ascending.
    fn select(&self, vectors: &[f32], sorted: &[Scored], limit: usize) -> Vec<Scored> {
        let mut kept: Vec<Scored> = Vec::with_capacity(limit);
        for &c in sorted {
            if kept.len() >= limit {
                break;
            }
            let cv = self.vector(vectors, c.id);
            if kept.iter().all(|k| squared_l2(cv, self.vector(vectors, k.id)) > c.dist) {
                kept.push(c);
            }
        }
        kept
    }

    fn greedy(&self, vectors: &[f32], query: &[f32], mut best: Scored, layer: usize) -> Scored {
        loop {
            let mut improved = false;
            for &n in self.neighbors(best.id, layer) {
                let d = squared_l2(query, self.vector(vectors, n));
                let cand = Scored { dist: d, id: n };
                if cand < best {
                    best = cand;
                    improved = true;
                }
            }
            if !improved {
                return best;
            }
        }
    }

    /// Beam search on one layer; returns up to `beam` points, ascending.
    fn search_layer(
        &self,
        vectors: &[f32],
        query: &[f32],
        entries: &[Scored],
        beam: usize,
        layer: usize,
        s: &mut Searcher,
    ) -> Vec<Scored> {
        s.reset(self.len());
        for &e in entries {
            if s.visit(e.id) {
                s.candidates.push(Reverse(e));
                s.results.push(e);
            }
        }
        while s.results.len() > beam {
            s.results.pop();
        }
        while let Some(Reverse(current)) = s.candidates.pop() {
            if let Some(worst) = s.results.peek() {
                if current.dist > worst.dist && s.results.len() >= beam {
                    break;
                }
            }
            for &n in self.neighbors(current.id, layer) {
                if !s.visit(n) {
                    continue;
                }
                let cand = Scored {
                    dist: squared_l2(query, self.vector(vectors, n)),
                    id: n,
                };
                let admit = s.results.len() < beam || s.results.peek().is_some_and(|w| cand < *w);
                if admit {
                    s.candidates.push(Reverse(cand));
                    s.results.push(cand);
                    if s.results.len() > beam {
                        s.results.pop();
                    }
                }
            }
        }
        let mut out: Vec<Scored> = s.results.drain().collect();
        out.sort();
        out
    }

    /// Approximate `beam` nearest points to `query`, ascending by distance.
    pub fn search(&self, vectors: &[f32], query: &[f32], beam: usize, s: &mut Searcher) -> Vec<(f32, u32)> {
        let mut entry = Scored {
            dist: squared_l2(query, self.vector(vectors, self.entry)),
            id: self.entry,
        };
        for layer in (1..=self.max_level).rev() {
            entry = self.greedy(vectors, query, entry, layer);
        }
        self.search_layer(vectors, query, &[entry], beam.max(1), 0, s)
            .into_iter()
            .map(|x| (x.dist, x.id))
            .collect()
    }

    pub fn to_parts(&self) -> GraphParts {
        GraphParts {
            max_degree: self.max_degree as u32,
            levels: self.levels.clone(),
            layer0: self.layer0.clone(),
            layer0_counts: self.layer0_counts.clone(),
            upper: self.upper.clone(),
            entry: self.entry,
        }
    }

    /// Rebuilds a graph from persisted arrays, validating their shape.
    pub fn from_parts(parts: GraphParts, stride: usize) -> Result<Self> {
        let n = parts.levels.len();
        let max_degree = parts.max_degree as usize;
        let cap = 2 * max_degree;
        let bad = |what: &str| Error::invalid("graph", alloc::format!("inconsistent snapshot: {what}"));
        if n == 0 {
            return Err(Error::EmptyIndex);
        }
        if parts.layer0.len() != n * cap || parts.layer0_counts.len() != n || parts.upper.len() != n {
            return Err(bad("array lengths"));
        }
        if parts.entry as usize >= n {
            return Err(bad("entry point"));
        }
        for i in 0..n {
            if parts.layer0_counts[i] as usize > cap || parts.upper[i].len() != parts.levels[i] as usize {
                return Err(bad("node degree"));
            }
            let l0 = &parts.layer0[i * cap..i * cap + parts.layer0_counts[i] as usize];
            if l0
                .iter()
                .chain(parts.upper[i].iter().flatten())
                .any(|&x| x as usize >= n)
            {
                return Err(bad("neighbour id"));
            }
        }
        let max_level = parts.levels[parts.entry as usize] as usize;
        if parts.levels.iter().any(|&l| l as usize > max_level) {
            return Err(bad("entry is not on the top layer"));
        }
        Ok(Hnsw {
            stride,
            max_degree,
            layer0_cap: cap,
            levels: parts.levels,
            layer0: parts.layer0,
            layer0_counts: parts.layer0_counts,
            upper: parts.upper,
            entry: parts.entry,
            max_level,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_points(n: usize, stride: usize, seed: u64) -> Vec<f32> {
        let mut rng = seeded_rng(seed);
        (0..n * stride).map(|_| rng.random::<f32>()).collect()
    }

    fn brute(vectors: &[f32], stride: usize, q: &[f32]) -> u32 {
        (0..vectors.len() / stride)
            .map(|i| (squared_l2(q, &vectors[i * stride..(i + 1) * stride]), i as u32))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .unwrap()
            .1
    }

    #[test]
    fn squared_distance_with_tail() {
        let a = [1.0f32; 11];
        let b = [3.0f32; 11];
        assert_eq!(squared_l2(&a, &b), 44.0);
    }

    #[test]
    fn single_point_graph() {
        let v = vec![0.5f32; 4];
        let g = Hnsw::build(&v, 4, 8, 16, 1).unwrap();
        let mut s = Searcher::new(1);
        let hits = g.search(&v, &[9.0; 4], 5, &mut s);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].1, 0);
    }

    #[test]
    fn high_recall_on_uniform_points() {
        let stride = 8;
        let v = random_points(5000, stride, 2);
        let g = Hnsw::build(&v, stride, 16, 100, 7).unwrap();
        let queries = random_points(200, stride, 3);
        let mut s = Searcher::new(g.len());
        let hits = queries
            .chunks(stride)
            .filter(|q| g.search(&v, q, 32, &mut s)[0].1 == brute(&v, stride, q))
            .count();
        assert!(hits >= 190, "recall {hits}/200");
    }

    #[test]
    fn deterministic_build_and_parts_round_trip() {
        let v = random_points(500, 6, 5);
        let a = Hnsw::build(&v, 6, 8, 40, 11).unwrap();
        let b = Hnsw::build(&v, 6, 8, 40, 11).unwrap();
        assert_eq!(a.to_parts(), b.to_parts());
        let c = Hnsw::from_parts(a.to_parts(), 6).unwrap();
        let mut s = Searcher::new(500);
        assert_eq!(a.search(&v, &v[..6], 10, &mut s), c.search(&v, &v[..6], 10, &mut s));
    }

    #[test]
    fn corrupt_parts_rejected() {
        let v = random_points(50, 4, 5);
        let mut parts = Hnsw::build(&v, 4, 4, 10, 1).unwrap().to_parts();
        parts.layer0[0] = 999;
        parts.layer0_counts[0] = parts.layer0_counts[0].max(1);
        assert!(Hnsw::from_parts(parts, 4).is_err());
    }
}
