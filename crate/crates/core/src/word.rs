//! Gate words and enumeration of the depth-`d` product set.
//!
//! Letters are listed in application order: letter 0 acts first, so the word
//! `[i_1, ..., i_d]` evaluates to `U_{i_d} ... U_{i_1}`. A word's index is its
//! letters read as a base-`|set|` number with the first letter most
//! significant, so lexicographic word order and index order coincide.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::unitary::{matmul_into, Unitary};
use crate::variants::GateSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GateWord {
    letters: Vec<u8>,
}

impl GateWord {
    pub fn new(letters: Vec<u8>, set_size: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= set_size) {
            return Err(Error::LetterOutOfRange {
                letter: bad as usize,
                set_size,
            });
        }
        Ok(GateWord { letters })
    }

    pub fn empty() -> Self {
        GateWord::default()
    }

    /// Parses the base-`set_size` digit string form, e.g. `"0312"`.
    pub fn parse(text: &str, set_size: usize) -> Result<Self> {
        let letters = text
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::invalid("word", alloc::format!("bad letter `{c}`")))
            })
            .collect::<Result<Vec<u8>>>()?;
        GateWord::new(letters, set_size)
    }

    /// Inverse of [`GateWord::index`].
    pub fn from_index(mut index: u64, depth: usize, base: usize) -> Self {
        let mut letters = vec![0u8; depth];
        for slot in letters.iter_mut().rev() {
            *slot = (index % base as u64) as u8;
            index /= base as u64;
        }
        GateWord { letters }
    }

    pub fn index(&self, base: usize) -> u64 {
        self.letters.iter().fold(0u64, |acc, &l| acc * base as u64 + l as u64)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    /// `self` followed by `then`; evaluates to `eval(then) * eval(self)`.
    pub fn concat(&self, then: &GateWord) -> GateWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&then.letters);
        GateWord { letters }
    }

    pub fn to_digits(&self) -> String {
        self.letters
            .iter()
            .map(|&l| char::from_digit(l as u32, 10).unwrap_or('?'))
            .collect()
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

pub fn evaluate_word(gs: &GateSet, word: &GateWord) -> Result<Unitary> {
    let n = gs.dim();
    let mut acc = Unitary::identity(n).into_entries();
    let mut scratch = acc.clone();
    for &l in word.letters() {
        let g = gs.variants().get(l as usize).ok_or(Error::LetterOutOfRange {
            letter: l as usize,
            set_size: gs.len(),
        })?;
        matmul_into(n, g.entries(), &acc, &mut scratch);
        core::mem::swap(&mut acc, &mut scratch);
    }
    Ok(Unitary::from_entries_unchecked(n, acc))
}

/// `|set|^depth`, or `None` if it does not fit in `u64`.
pub fn product_count(set_size: usize, depth: usize) -> Option<u64> {
    (set_size as u64).checked_pow(u32::try_from(depth).ok()?)
}

fn check_budget(count: u64, bytes_per_item: u64, budget_bytes: u64) -> Result<()> {
    let required = count as u128 * bytes_per_item as u128;
    if required > budget_bytes as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget_bytes,
        });
    }
    Ok(())
}

/// A zeroed buffer of `len` entries, or `BudgetExceeded` if the allocator
/// cannot provide it.
pub(crate) fn try_zeroed<T: Clone + Default>(len: u128, item_bytes: u64, budget_bytes: u64) -> Result<Vec<T>> {
    let refused = Error::BudgetExceeded {
        required: len.saturating_mul(item_bytes as u128),
        budget: budget_bytes,
    };
    let len = usize::try_from(len).map_err(|_| refused.clone())?;
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| refused)?;
    v.resize(len, T::default());
    Ok(v)
}

fn matrix_bytes(dim: usize) -> u64 {
    (dim * dim * core::mem::size_of::<Complex64>()) as u64
}

/// Odometer over words with prefix-product reuse: advancing the word at
/// position `p` recomputes only the prefixes after `p`, so each leaf costs one
/// matrix multiply beyond its parent prefix.
struct Odometer<'a> {
    gs: &'a GateSet,
    letters: Vec<u8>,
    /// `prefixes[k]` is the product of the first `k` letters, flat `N*N` blocks.
    prefixes: Vec<Complex64>,
    leading: Range<usize>,
    started: bool,
    done: bool,
}

impl<'a> Odometer<'a> {
    fn new(gs: &'a GateSet, depth: usize, leading: Range<usize>) -> Self {
        let n = gs.dim();
        let nn = n * n;
        let mut prefixes = vec![Complex64::new(0.0, 0.0); nn * (depth + 1)];
        prefixes[..nn].copy_from_slice(Unitary::identity(n).entries());
        let mut letters = vec![0u8; depth];
        if depth > 0 {
            letters[0] = leading.start as u8;
        }
        let done = depth > 0 && leading.is_empty();
        Odometer {
            gs,
            letters,
            prefixes,
            leading,
            started: false,
            done,
        }
    }

    fn recompute_from(&mut self, pos: usize) {
        let nn = self.gs.dim() * self.gs.dim();
        for k in pos..self.letters.len() {
            let g = self.gs.variants()[self.letters[k] as usize].entries();
            let (head, tail) = self.prefixes.split_at_mut((k + 1) * nn);
            matmul_into(self.gs.dim(), g, &head[k * nn..], &mut tail[..nn]);
        }
    }

    /// Moves to the next word; returns false when exhausted.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            self.recompute_from(0);
            return true;
        }
        let base = self.gs.len() as u8;
        let depth = self.letters.len();
        for p in (0..depth).rev() {
            let limit = if p == 0 { self.leading.end as u8 } else { base };
            if self.letters[p] + 1 < limit {
                self.letters[p] += 1;
                self.letters[p + 1..].iter_mut().for_each(|l| *l = 0);
                self.recompute_from(p);
                return true;
            }
        }
        self.done = true;
        false
    }

    fn current(&self) -> &[Complex64] {
        let nn = self.gs.dim() * self.gs.dim();
        let d = self.letters.len();
        &self.prefixes[d * nn..(d + 1) * nn]
    }
}

/// Streams `(word, product)` pairs in lexicographic word order.
pub struct ProductStream<'a> {
    odometer: Odometer<'a>,
}

impl Iterator for ProductStream<'_> {
    type Item = (GateWord, Unitary);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.odometer.advance() {
            return None;
        }
        let word = GateWord {
            letters: self.odometer.letters.clone(),
        };
        let u = Unitary::from_entries_unchecked(self.odometer.gs.dim(), self.odometer.current().to_vec());
        Some((word, u))
    }
}

/// All `|set|^depth` products. `budget_bytes` bounds the memory a caller would
/// need to hold every yielded matrix and is checked before anything is built.
pub fn enumerate_products(gs: &GateSet, depth: usize, budget_bytes: u64) -> Result<ProductStream<'_>> {
    enumerate_partition(gs, depth, 0..gs.len(), budget_bytes)
}

/// The subtree of words whose first letter lies in `leading`. Partitions by
/// leading letter are disjoint and together cover the full enumeration.
pub fn enumerate_partition(
    gs: &GateSet,
    depth: usize,
    leading: Range<usize>,
    budget_bytes: u64,
) -> Result<ProductStream<'_>> {
    if leading.end > gs.len() || leading.start > leading.end {
        return Err(Error::invalid("leading", "letter range outside the gate set"));
    }
    let per_letter = product_count(gs.len(), depth.saturating_sub(1)).ok_or(Error::BudgetExceeded {
        required: u128::MAX,
        budget: budget_bytes,
    })?;
    let count = if depth == 0 {
        1
    } else {
        per_letter * leading.len() as u64
    };
    check_budget(count, matrix_bytes(gs.dim()), budget_bytes)?;
    Ok(ProductStream {
        odometer: Odometer::new(gs, depth, leading),
    })
}

/// Every product of one depth, stored contiguously in word-index order.
#[derive(Clone)]
pub struct ProductTable {
    dim: usize,
    depth: usize,
    base: usize,
    data: Vec<Complex64>,
}

impl ProductTable {
    pub fn build(gs: &GateSet, depth: usize, budget_bytes: u64) -> Result<Self> {
        let count = product_count(gs.len(), depth).ok_or(Error::BudgetExceeded {
            required: u128::MAX,
            budget: budget_bytes,
        })?;
        check_budget(count, matrix_bytes(gs.dim()), budget_bytes)?;
        let nn = gs.dim() * gs.dim();
        let mut data: Vec<Complex64> = try_zeroed(count as u128 * nn as u128, 16, budget_bytes)?;
        if depth == 0 {
            data.copy_from_slice(Unitary::identity(gs.dim()).entries());
        } else {
            let chunk = data.len() / gs.len();
            let parts: Vec<(usize, &mut [Complex64])> = data.chunks_mut(chunk).enumerate().collect();
            crate::par::for_each(parts, |(letter, out)| {
                let mut odo = Odometer::new(gs, depth, letter..letter + 1);
                let mut offset = 0;
                while odo.advance() {
                    out[offset..offset + nn].copy_from_slice(odo.current());
                    offset += nn;
                }
            });
        }
        Ok(ProductTable {
            dim: gs.dim(),
            depth,
            base: gs.len(),
            data,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len() / (self.dim * self.dim)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn entries(&self, index: usize) -> &[Complex64] {
        let nn = self.dim * self.dim;
        &self.data[index * nn..(index + 1) * nn]
    }

    pub fn unitary(&self, index: usize) -> Unitary {
        Unitary::from_entries_unchecked(self.dim, self.entries(index).to_vec())
    }

    pub fn word(&self, index: usize) -> GateWord {
        GateWord::from_index(index as u64, self.depth, self.base)
    }
}
