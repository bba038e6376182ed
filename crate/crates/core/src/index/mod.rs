//! Phase-invariant nearest-neighbour search over a product set.
//!
//! Every indexed unitary is stored as its determinant-one representative.
//! Euclidean distance between representatives is the Frobenius distance, a
//! proxy for infidelity; the remaining `Z_N` phase ambiguity is handled by
//! querying with all `N` root-of-unity rotations of the target. Final
//! candidates are always reranked by exact 64-bit infidelity.

mod hnsw;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use hnsw::{GraphParts, Hnsw, Searcher};

use crate::error::{Error, Result};
use crate::math;
use crate::metrics::infidelity_from_overlap;
use crate::phase::{canonical_phase, principal_det_root, roots_of_unity};
use crate::unitary::{trace_inner, Unitary};
use crate::word::ProductTable;

/// Infidelities closer than this are ties, broken by the smaller word id.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexMode {
    /// Linear scan; the returned top-1 is the exact infidelity minimizer.
    Exact,
    /// Layered small-world graph with reranking.
    Approximate,
}

impl IndexMode {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexMode::Exact => "exact",
            IndexMode::Approximate => "approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexParams {
    /// Neighbour bound `M` on upper layers; layer 0 allows `2M`.
    pub max_degree: usize,
    pub build_beam: usize,
    pub query_beam: usize,
    /// Candidates kept per rotated sub-query for exact reranking.
    pub rerank: usize,
    pub seed: u64,
}

impl Default for IndexParams {
    fn default() -> Self {
        IndexParams {
            max_degree: 16,
            build_beam: 200,
            query_beam: 64,
            rerank: 8,
            seed: 0,
        }
    }
}

/// Determinant-one representative flattened to interleaved `(re, im)` pairs.
pub fn vectorize(u: &Unitary) -> Vec<f64> {
    canonical_phase(u)
        .representative
        .entries()
        .iter()
        .flat_map(|z| [z.re, z.im])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexedPoint {
    pub vector: Vec<f64>,
    pub word_id: u64,
}

impl IndexedPoint {
    pub fn new(u: &Unitary, word_id: u64) -> Self {
        IndexedPoint {
            vector: vectorize(u),
            word_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub word_id: u64,
    /// Position in the index.
    pub point: usize,
    pub infidelity: f64,
}

/// `true` if `(inf_a, key_a)` beats `(inf_b, key_b)` under the tie rule.
#[inline]
pub(crate) fn better<K: Ord>(inf_a: f64, key_a: K, inf_b: f64, key_b: K) -> bool {
    if math::abs(inf_a - inf_b) < TIE_TOLERANCE {
        key_a < key_b
    } else {
        inf_a < inf_b
    }
}

/// Predicted bytes for an index over `points` unitaries of dimension `dim`:
/// `points * (N^2 * 16 + 8)` for exact data and word ids, plus
/// `points * (2N^2 * 4 + 2M * 4 + 8)` for graph vectors and links.
pub fn index_footprint(points: u64, dim: usize, mode: IndexMode, params: &IndexParams) -> u128 {
    let nn = (dim * dim) as u128;
    let base = nn * 16 + 8;
    let graph = match mode {
        IndexMode::Exact => 0,
        IndexMode::Approximate => 2 * nn * 4 + 2 * params.max_degree as u128 * 4 + 8,
    };
    points as u128 * (base + graph)
}

pub struct NnIndex {
    dim: usize,
    mode: IndexMode,
    params: IndexParams,
    word_ids: Vec<u64>,
    /// Exact determinant-one representatives, `N*N` entries per point.
    exact: Vec<Complex64>,
    /// `f32` copies for the graph, `2N^2` per point (approximate mode only).
    coarse: Vec<f32>,
    graph: Option<Hnsw>,
}

impl core::fmt::Debug for NnIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("NnIndex")
            .field("dim", &self.dim)
            .field("mode", &self.mode)
            .field("params", &self.params)
            .field("points", &self.word_ids.len())
            .finish_non_exhaustive()
    }
}

impl NnIndex {
    /// Indexes every product of `table`; word ids are table indices.
    pub fn build(table: &ProductTable, mode: IndexMode, params: IndexParams, budget_bytes: u64) -> Result<Self> {
        let n = table.len();
        let dim = table.dim();
        check_footprint(n as u64, dim, mode, &params, budget_bytes)?;
        let exact = canonical_entries(table);
        Self::assemble(dim, mode, params, (0..n as u64).collect(), exact)
    }

    /// Indexes explicit points. Vectors must hold determinant-one
    /// representatives, as produced by [`vectorize`].
    pub fn from_points(
        points: &[IndexedPoint],
        mode: IndexMode,
        params: IndexParams,
        budget_bytes: u64,
    ) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyIndex)?;
        let len = first.vector.len();
        let dim = math::sqrt(len as f64 / 2.0) as usize;
        if dim == 0 || 2 * dim * dim != len {
            return Err(Error::invalid("points", "vector length is not 2N^2"));
        }
        check_footprint(points.len() as u64, dim, mode, &params, budget_bytes)?;
        let mut exact = Vec::with_capacity(points.len() * dim * dim);
        for p in points {
            if p.vector.len() != len {
                return Err(Error::DimensionMismatch {
                    left: len,
                    right: p.vector.len(),
                });
            }
            let norm2: f64 = p.vector.iter().map(|x| x * x).sum();
            if math::abs(norm2 - dim as f64) > 1e-8 {
                return Err(Error::invalid("points", "vector norm^2 differs from N"));
            }
            exact.extend(p.vector.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])));
        }
        Self::assemble(dim, mode, params, points.iter().map(|p| p.word_id).collect(), exact)
    }

    fn assemble(
        dim: usize,
        mode: IndexMode,
        params: IndexParams,
        word_ids: Vec<u64>,
        exact: Vec<Complex64>,
    ) -> Result<Self> {
        if word_ids.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let (coarse, graph) = match mode {
            IndexMode::Exact => (Vec::new(), None),
            IndexMode::Approximate => {
                let coarse: Vec<f32> = exact.iter().flat_map(|z| [z.re as f32, z.im as f32]).collect();
                let graph = Hnsw::build(
                    &coarse,
                    2 * dim * dim,
                    params.max_degree,
                    params.build_beam,
                    params.seed,
                )?;
                (coarse, Some(graph))
            }
        };
        Ok(NnIndex {
            dim,
            mode,
            params,
            word_ids,
            exact,
            coarse,
            graph,
        })
    }

    /// Reattaches a persisted graph to the products of `table`. `coarse`
    /// holds the stored `f32` vectors; they must agree with the table, which
    /// catches snapshots taken from a different gate set.
    pub fn with_graph(table: &ProductTable, params: IndexParams, coarse: Vec<f32>, graph: GraphParts) -> Result<Self> {
        let dim = table.dim();
        let exact = canonical_entries(table);
        let n = table.len();
        if coarse.len() != n * 2 * dim * dim || graph.levels.len() != n {
            return Err(Error::invalid(
                "snapshot",
                "point count disagrees with the product table",
            ));
        }
        let drift = exact
            .iter()
            .flat_map(|z| [z.re, z.im])
            .zip(&coarse)
            .map(|(x, &y)| math::abs(x - y as f64))
            .fold(0.0, f64::max);
        if drift > 1e-5 {
            return Err(Error::invalid("snapshot", "stored vectors do not match the gate set"));
        }
        let graph = Hnsw::from_parts(graph, 2 * dim * dim)?;
        Ok(NnIndex {
            dim,
            mode: IndexMode::Approximate,
            params,
            word_ids: (0..n as u64).collect(),
            exact,
            coarse,
            graph: Some(graph),
        })
    }

    pub fn len(&self) -> usize {
        self.word_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    pub fn word_id(&self, point: usize) -> u64 {
        self.word_ids[point]
    }

    pub fn word_ids(&self) -> &[u64] {
        &self.word_ids
    }

    /// Determinant-one representative of a point.
    pub fn representative(&self, point: usize) -> &[Complex64] {
        let nn = self.dim * self.dim;
        &self.exact[point * nn..(point + 1) * nn]
    }

    pub fn coarse_vectors(&self) -> &[f32] {
        &self.coarse
    }

    pub fn graph(&self) -> Option<&Hnsw> {
        self.graph.as_ref()
    }

    /// Per-thread scratch for [`NnIndex::query_with`].
    pub fn searcher(&self) -> Searcher {
        Searcher::new(if self.graph.is_some() { self.len() } else { 0 })
    }

    pub fn query_nearest(&self, target: &Unitary, k: usize) -> Result<Vec<Neighbor>> {
        self.query_with(&mut self.searcher(), target, k)
    }

    /// Top-`k` points by exact infidelity to `target` (not canonicalized).
    pub fn query_with(&self, searcher: &mut Searcher, target: &Unitary, k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if target.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: target.dim(),
            });
        }
        let mut out = match self.mode {
            IndexMode::Exact => self.scan_top_k(target.entries(), k),
            IndexMode::Approximate => self.graph_top_k(searcher, target, k).0,
        };
        out.truncate(k);
        Ok(out)
    }

    fn neighbor(&self, point: usize, target: &[Complex64]) -> Neighbor {
        let overlap = trace_inner(target, self.representative(point)).norm();
        Neighbor {
            word_id: self.word_ids[point],
            point,
            infidelity: infidelity_from_overlap(overlap, self.dim),
        }
    }

    fn scan_top_k(&self, target: &[Complex64], k: usize) -> Vec<Neighbor> {
        let mut top: Vec<Neighbor> = Vec::with_capacity(k + 1);
        for point in 0..self.len() {
            let cand = self.neighbor(point, target);
            let full = top.len() == k;
            if full {
                let worst = top[k - 1];
                if !better(cand.infidelity, cand.word_id, worst.infidelity, worst.word_id) {
                    continue;
                }
            }
            let pos = top
                .iter()
                .position(|t| better(cand.infidelity, cand.word_id, t.infidelity, t.word_id))
                .unwrap_or(top.len());
            top.insert(pos, cand);
            top.truncate(k);
        }
        top
    }

    /// Rotated sub-queries, merged and reranked. Also returns how many
    /// distinct candidates were reranked.
    fn graph_top_k(&self, searcher: &mut Searcher, target: &Unitary, k: usize) -> (Vec<Neighbor>, usize) {
        let graph = self.graph.as_ref().expect("approximate index has a graph");
        let canon = canonical_phase(target).representative;
        let keep = k.max(self.params.rerank);
        let beam = self.params.query_beam.max(keep);
        let mut query = Vec::with_capacity(2 * self.dim * self.dim);
        let mut points: Vec<u32> = Vec::with_capacity(keep * self.dim);
        for root in roots_of_unity(self.dim) {
            query.clear();
            query.extend(canon.entries().iter().flat_map(|z| {
                let r = z * root;
                [r.re as f32, r.im as f32]
            }));
            let hits = graph.search(&self.coarse, &query, beam, searcher);
            points.extend(hits.iter().take(keep).map(|h| h.1));
        }
        points.sort_unstable();
        points.dedup();
        let mut ranked: Vec<Neighbor> = points
            .iter()
            .map(|&p| self.neighbor(p as usize, target.entries()))
            .collect();
        ranked.sort_by(|a, b| {
            if better(a.infidelity, a.word_id, b.infidelity, b.word_id) {
                core::cmp::Ordering::Less
            } else if better(b.infidelity, b.word_id, a.infidelity, a.word_id) {
                core::cmp::Ordering::Greater
            } else {
                core::cmp::Ordering::Equal
            }
        });
        let examined = ranked.len();
        ranked.truncate(k);
        (ranked, examined)
    }

    /// Best match for each of the concatenated `N*N` targets, with the
    /// number of candidates examined for it. Exact mode walks the points
    /// once for the whole batch, which keeps the scan cache friendly.
    pub(crate) fn best_matches(&self, searcher: &mut Searcher, targets: &[Complex64]) -> Vec<(Neighbor, usize)> {
        let nn = self.dim * self.dim;
        match self.mode {
            IndexMode::Exact => {
                let slack = 2.0 * TIE_TOLERANCE * self.dim as f64;
                let gate_for = |n: &Neighbor| square((self.dim as f64 * (1.0 - n.infidelity) - slack).max(0.0));
                let mut best: Vec<Neighbor> = targets.chunks_exact(nn).map(|t| self.neighbor(0, t)).collect();
                let mut gates: Vec<f64> = best.iter().map(gate_for).collect();
                for (point, rep) in self.exact.chunks_exact(nn).enumerate().skip(1) {
                    for (k, target) in targets.chunks_exact(nn).enumerate() {
                        // Only candidates within the tie window of the incumbent can win.
                        if overlap_sqr(target, rep) <= gates[k] {
                            continue;
                        }
                        let cand = self.neighbor(point, target);
                        if better(cand.infidelity, cand.word_id, best[k].infidelity, best[k].word_id) {
                            gates[k] = gate_for(&cand);
                            best[k] = cand;
                        }
                    }
                }
                best.into_iter().map(|b| (b, self.len())).collect()
            }
            IndexMode::Approximate => targets
                .chunks_exact(nn)
                .map(|t| {
                    let u = Unitary::from_entries_unchecked(self.dim, t.to_vec());
                    let (top, examined) = self.graph_top_k(searcher, &u, 1);
                    (top[0], examined)
                })
                .collect(),
        }
    }
}

/// `|sum conj(t) p|^2` with independent accumulators so the sum pipelines.
#[inline]
fn overlap_sqr(t: &[Complex64], p: &[Complex64]) -> f64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let mut tc = t.chunks_exact(4);
    let mut pc = p.chunks_exact(4);
    for (a, b) in (&mut tc).zip(&mut pc) {
        for i in 0..4 {
            re[i] += a[i].re * b[i].re + a[i].im * b[i].im;
            im[i] += a[i].re * b[i].im - a[i].im * b[i].re;
        }
    }
    let tail = trace_inner(tc.remainder(), pc.remainder());
    let re = re.iter().sum::<f64>() + tail.re;
    let im = im.iter().sum::<f64>() + tail.im;
    re * re + im * im
}

/// Determinant-one representatives of every table entry, concatenated.
fn canonical_entries(table: &ProductTable) -> Vec<Complex64> {
    let mut exact = Vec::with_capacity(table.len() * table.dim() * table.dim());
    for i in 0..table.len() {
        let e = table.entries(i);
        let root = principal_det_root(&Unitary::from_entries_unchecked(table.dim(), e.to_vec())).conj();
        exact.extend(e.iter().map(|z| z * root));
    }
    exact
}

fn square(x: f64) -> f64 {
    x * x
}

fn check_footprint(points: u64, dim: usize, mode: IndexMode, params: &IndexParams, budget: u64) -> Result<()> {
    if points == 0 {
        return Err(Error::EmptyIndex);
    }
    let required = index_footprint(points, dim, mode, params);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_random, haar_random_with, seeded_rng};
    use crate::metrics::{frobenius_distance, infidelity};
    use crate::variants::{make_variants, VariantMode};

    const BUDGET: u64 = 1 << 32;

    #[test]
    fn identity_vector() {
        let v = vectorize(&Unitary::identity(4));
        for (i, x) in v.iter().enumerate() {
            let diag_real = i % 2 == 0 && (i / 2) % 5 == 0;
            assert_eq!(*x, if diag_real { 1.0 } else { 0.0 }, "slot {i}");
        }
    }

    #[test]
    fn euclidean_matches_frobenius_of_representatives() {
        let mut rng = seeded_rng(8);
        for _ in 0..100 {
            let a = haar_random_with(4, &mut rng).unwrap();
            let b = haar_random_with(4, &mut rng).unwrap();
            let (va, vb) = (vectorize(&a), vectorize(&b));
            let e = va.iter().zip(&vb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let f =
                frobenius_distance(&canonical_phase(&a).representative, &canonical_phase(&b).representative).unwrap();
            assert!((e - f).abs() < 1e-12);
        }
    }

    #[test]
    fn phased_vector_is_a_root_rotation() {
        let u = haar_random(4, 12).unwrap();
        let v = vectorize(&u.scaled(Complex64::from_polar(1.0, 2.1)));
        let hit = roots_of_unity(4).any(|w| {
            let r = vectorize(&canonical_phase(&u).representative.scaled(w));
            r.iter().zip(&v).all(|(x, y)| (x - y).abs() < 1e-12)
        });
        assert!(hit);
    }

    #[test]
    fn single_point_index() {
        let p = IndexedPoint::new(&haar_random(4, 1).unwrap(), 42);
        for mode in [IndexMode::Exact, IndexMode::Approximate] {
            let idx = NnIndex::from_points(core::slice::from_ref(&p), mode, IndexParams::default(), BUDGET).unwrap();
            for s in 0..5 {
                let hit = idx.query_nearest(&haar_random(4, 100 + s).unwrap(), 3).unwrap();
                assert_eq!(hit.len(), 1);
                assert_eq!(hit[0].word_id, 42);
            }
        }
    }

    #[test]
    fn exact_scan_matches_brute_force() {
        let gs = make_variants(&haar_random(4, 3).unwrap(), VariantMode::Four).unwrap();
        let table = ProductTable::build(&gs, 4, BUDGET).unwrap();
        let idx = NnIndex::build(&table, IndexMode::Exact, IndexParams::default(), BUDGET).unwrap();
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let t = haar_random_with(4, &mut rng).unwrap();
            let brute = (0..table.len())
                .map(|i| (infidelity(&table.unitary(i), &t).unwrap(), i as u64))
                .fold(
                    (2.0, 0),
                    |best, c| if better(c.0, c.1, best.0, best.1) { c } else { best },
                );
            let got = idx.query_nearest(&t, 1).unwrap()[0];
            assert_eq!(got.word_id, brute.1);
            assert!((got.infidelity - brute.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indexed_target_is_found_with_any_phase() {
        let gs = make_variants(&haar_random(4, 4).unwrap(), VariantMode::Four).unwrap();
        let table = ProductTable::build(&gs, 3, BUDGET).unwrap();
        for mode in [IndexMode::Exact, IndexMode::Approximate] {
            let idx = NnIndex::build(&table, mode, IndexParams::default(), BUDGET).unwrap();
            let t = table.unitary(37);
            let plain = idx.query_nearest(&t, 4).unwrap();
            assert_eq!(plain[0].word_id, 37);
            assert!(plain[0].infidelity < 1e-12);
            let phased = idx
                .query_nearest(&t.scaled(Complex64::from_polar(1.0, -0.9)), 4)
                .unwrap();
            assert_eq!(
                plain.iter().map(|n| n.word_id).collect::<Vec<_>>(),
                phased.iter().map(|n| n.word_id).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            NnIndex::from_points(&[], IndexMode::Exact, IndexParams::default(), BUDGET),
            Err(Error::EmptyIndex)
        ));
        let p = IndexedPoint::new(&haar_random(4, 1).unwrap(), 0);
        let idx = NnIndex::from_points(
            core::slice::from_ref(&p),
            IndexMode::Exact,
            IndexParams::default(),
            BUDGET,
        )
        .unwrap();
        assert!(idx.query_nearest(&Unitary::identity(4), 0).is_err());
        assert!(idx.query_nearest(&Unitary::identity(2), 1).is_err());
        assert!(matches!(
            NnIndex::from_points(&[p], IndexMode::Approximate, IndexParams::default(), 10),
            Err(Error::BudgetExceeded { .. })
        ));
        let bad = IndexedPoint {
            vector: alloc::vec![0.5; 32],
            word_id: 0,
        };
        assert!(NnIndex::from_points(&[bad], IndexMode::Exact, IndexParams::default(), BUDGET).is_err());
    }
}
