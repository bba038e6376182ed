//! Meet-in-the-middle compilation and the exhaustive reference search.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{better, IndexMode, IndexParams, NnIndex};
use crate::metrics::{infidelity, infidelity_from_overlap, phase_aligned_frobenius};
use crate::par::{self, Stopwatch};
use crate::unitary::{matmul_into, trace_inner, Unitary};
use crate::variants::GateSet;
use crate::word::{enumerate_partition, product_count, GateWord, ProductTable};

/// Largest product set [`compile_brute`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Default memory budget: 4 GiB.
pub const DEFAULT_BUDGET_BYTES: u64 = 4 << 30;

const QUERY_CHUNKS: usize = 64;
/// Queries sharing one pass over the exact index.
const QUERY_BATCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub mode: IndexMode,
    pub params: IndexParams,
    pub budget_bytes: u64,
    /// Stop scanning once a candidate reaches this infidelity. Results are
    /// then schedule dependent, so leave unset for statistics.
    pub early_exit: Option<f64>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            mode: IndexMode::Exact,
            params: IndexParams::default(),
            budget_bytes: DEFAULT_BUDGET_BYTES,
            early_exit: None,
        }
    }
}

impl CompileOptions {
    pub fn with_mode(mode: IndexMode) -> Self {
        CompileOptions {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompileStats {
    pub index_seconds: f64,
    pub query_seconds: f64,
    /// Size of the half-depth set.
    pub points: u64,
    /// Exact infidelity evaluations performed.
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationResult {
    pub word: GateWord,
    pub infidelity: f64,
    /// Frobenius distance after optimal global phase alignment.
    pub frobenius: f64,
    pub half_depth: usize,
    pub stats: CompileStats,
}

/// A half-depth product set and its index, reusable across targets.
pub struct MitmCompiler<'g> {
    gs: &'g GateSet,
    table: ProductTable,
    index: NnIndex,
    options: CompileOptions,
    index_seconds: f64,
}

impl<'g> MitmCompiler<'g> {
    pub fn new(gs: &'g GateSet, half_depth: usize, options: CompileOptions) -> Result<Self> {
        let clock = Stopwatch::start();
        let table = ProductTable::build(gs, half_depth, options.budget_bytes)?;
        let table_bytes = (table.len() * gs.dim() * gs.dim() * core::mem::size_of::<Complex64>()) as u64;
        let index = NnIndex::build(
            &table,
            options.mode,
            options.params,
            options.budget_bytes.saturating_sub(table_bytes),
        )?;
        Ok(MitmCompiler {
            gs,
            table,
            index,
            options,
            index_seconds: clock.seconds(),
        })
    }

    /// Uses a prebuilt index over the products of `table`, e.g. one loaded
    /// from a snapshot.
    pub fn with_index(gs: &'g GateSet, table: ProductTable, index: NnIndex, options: CompileOptions) -> Result<Self> {
        if table.dim() != gs.dim() || table.base() != gs.len() || index.len() != table.len() {
            return Err(Error::invalid(
                "index",
                "does not cover the product table of this gate set",
            ));
        }
        Ok(MitmCompiler {
            gs,
            table,
            options: CompileOptions {
                mode: index.mode(),
                params: *index.params(),
                ..options
            },
            index,
            index_seconds: 0.0,
        })
    }

    pub fn half_depth(&self) -> usize {
        self.table.depth()
    }

    pub fn points(&self) -> usize {
        self.table.len()
    }

    pub fn index(&self) -> &NnIndex {
        &self.index
    }

    pub fn gate_set(&self) -> &GateSet {
        self.gs
    }

    pub fn compile(&self, target: &Unitary) -> Result<CompilationResult> {
        let n = self.gs.dim();
        if target.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: target.dim(),
            });
        }
        let clock = Stopwatch::start();
        let points = self.table.len();
        let chunks = QUERY_CHUNKS.min(points);
        let stop = AtomicBool::new(false);
        let threshold = self.options.early_exit;
        let gamma = target.entries();

        let partial = par::map_range(chunks, |c| {
            let range = (c * points / chunks)..((c + 1) * points / chunks);
            let mut searcher = self.index.searcher();
            let mut x_adj = alloc::vec![Complex64::new(0.0, 0.0); n * n];
            let mut batch = Vec::with_capacity(QUERY_BATCH * n * n);
            let mut best: Option<(f64, (u64, u64))> = None;
            let mut examined = 0u64;
            let mut start = range.start;
            while start < range.end && !stop.load(Ordering::Relaxed) {
                let end = (start + QUERY_BATCH).min(range.end);
                batch.clear();
                for x in start..end {
                    adjoint_into(n, self.table.entries(x), &mut x_adj);
                    let offset = batch.len();
                    batch.resize(offset + n * n, Complex64::new(0.0, 0.0));
                    matmul_into(n, gamma, &x_adj, &mut batch[offset..]);
                }
                let hits = self.index.best_matches(&mut searcher, &batch);
                for (x, (hit, count)) in (start..end).zip(hits) {
                    examined += count as u64;
                    let key = (x as u64, hit.word_id);
                    if best.is_none_or(|(inf, k)| better(hit.infidelity, key, inf, k)) {
                        best = Some((hit.infidelity, key));
                        if threshold.is_some_and(|t| hit.infidelity <= t) {
                            stop.store(true, Ordering::Relaxed);
                        }
                    }
                }
                start = end;
            }
            (best, examined)
        });

        let mut best: Option<(f64, (u64, u64))> = None;
        let mut candidates = 0;
        for (cand, examined) in partial {
            candidates += examined;
            if let Some((inf, key)) = cand {
                if best.is_none_or(|(b, bk)| better(inf, key, b, bk)) {
                    best = Some((inf, key));
                }
            }
        }
        let (_, (x, p)) = best.expect("half-depth set is nonempty");
        let word = self.table.word(x as usize).concat(&self.table.word(p as usize));

        // Reported values come from the product itself, not the search metric.
        let nn = n * n;
        let mut product = alloc::vec![Complex64::new(0.0, 0.0); nn];
        matmul_into(
            n,
            self.table.entries(p as usize),
            self.table.entries(x as usize),
            &mut product,
        );
        let overlap = trace_inner(&product, gamma).norm();
        Ok(CompilationResult {
            word,
            infidelity: infidelity_from_overlap(overlap, n),
            frobenius: frobenius_from_overlap(overlap, n),
            half_depth: self.table.depth(),
            stats: CompileStats {
                index_seconds: self.index_seconds,
                query_seconds: clock.seconds(),
                points: points as u64,
                candidates,
            },
        })
    }
}

/// Best word of length `2 * half_depth` for `target`.
///
/// With [`IndexMode::Exact`] this is the global optimum over all products of
/// that length, with ties going to the lexicographically smallest word.
pub fn compile_mitm(
    gs: &GateSet,
    target: &Unitary,
    half_depth: usize,
    options: CompileOptions,
) -> Result<CompilationResult> {
    if target.dim() != gs.dim() {
        return Err(Error::DimensionMismatch {
            left: gs.dim(),
            right: target.dim(),
        });
    }
    MitmCompiler::new(gs, half_depth, options)?.compile(target)
}

/// Exhaustive search over every word of length `depth`.
pub fn compile_brute(gs: &GateSet, target: &Unitary, depth: usize) -> Result<CompilationResult> {
    if target.dim() != gs.dim() {
        return Err(Error::DimensionMismatch {
            left: gs.dim(),
            right: target.dim(),
        });
    }
    let count = product_count(gs.len(), depth).unwrap_or(u64::MAX);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(
            "depth",
            alloc::format!("{count} products exceed the exhaustive limit of {BRUTE_FORCE_LIMIT}"),
        ));
    }
    let clock = Stopwatch::start();
    let n = gs.dim();
    let leading: Vec<usize> = if depth == 0 {
        alloc::vec![0]
    } else {
        (0..gs.len()).collect()
    };
    let partial = par::map_range(leading.len(), |i| -> Result<Option<(f64, GateWord)>> {
        let letter = leading[i];
        let mut best: Option<(f64, GateWord)> = None;
        for (word, u) in enumerate_partition(gs, depth, letter..letter + 1, u64::MAX)? {
            let overlap = trace_inner(u.entries(), target.entries()).norm();
            let inf = infidelity_from_overlap(overlap, n);
            if best.as_ref().is_none_or(|(b, bw)| better(inf, &word, *b, bw)) {
                best = Some((inf, word));
            }
        }
        Ok(best)
    });
    let mut best: Option<(f64, GateWord)> = None;
    for cand in partial {
        if let Some((inf, word)) = cand? {
            if best.as_ref().is_none_or(|(b, bw)| better(inf, &word, *b, bw)) {
                best = Some((inf, word));
            }
        }
    }
    let (_, word) = best.expect("at least one word");
    let u = crate::word::evaluate_word(gs, &word)?;
    Ok(CompilationResult {
        infidelity: infidelity(&u, target)?,
        frobenius: phase_aligned_frobenius(&u, target)?,
        half_depth: depth / 2,
        word,
        stats: CompileStats {
            index_seconds: 0.0,
            query_seconds: clock.seconds(),
            points: count,
            candidates: count,
        },
    })
}

fn adjoint_into(n: usize, a: &[Complex64], out: &mut [Complex64]) {
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
}

fn frobenius_from_overlap(abs_trace: f64, dim: usize) -> f64 {
    crate::math::sqrt((2.0 * dim as f64 - 2.0 * abs_trace).max(0.0))
}
