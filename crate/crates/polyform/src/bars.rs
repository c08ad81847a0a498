//! Succinct bar graphs: n + o(n) bits, O(1) neighbors and visibility.
//!
//! Cells are numbered 1..=n in canonical order (bar by bar, bottom to top).
//! `S` marks the bottom cell of every bar and is the only n-bit component.
//! Bars are grouped into blocks (minimal whole-bar runs of ≥ k cells); `B`
//! marks each block's first cell. Visibility inside a block is read from a
//! table over all size-k bar graphs; across blocks the smallest bar of the
//! blocks in between is found by range-minimum over the per-block minima,
//! answered by LCA in a tree that stores only the shape.
//!
//! Vocabulary: a bar's *size* is its cell count; a cell's *height* is the
//! number of cells below it in its bar (0 for the bottom cell). A bar holds
//! a cell at height h iff its size ≥ h+1.

use crate::bits::{BitVector, Mode};
use crate::codec::{BitReader, BitWriter, CodecError, Container, Kind, Section};
use crate::grid::Dir;
use crate::query::{HandleMap, Navigable, QueryError};
use crate::treekit::{OrdinalTree, TreeMode};
use std::sync::Arc;
use thiserror::Error;

const TAG_S: u8 = 1;
const TAG_B: u8 = 2;
const TAG_K: u8 = 3;
const TAG_CTREE: u8 = 4;

pub const MAX_TABLE_K: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BarsError {
    #[error("empty composition")]
    EmptyComposition,
    #[error("bar {0} has size 0")]
    ZeroBar(usize),
    #[error("block size k = {0} out of range")]
    InvalidK(usize),
}

/// Index of pair (p, q), p < q < k, in the vis mask.
#[inline]
fn pair_index(p: usize, q: usize) -> usize {
    q * (q - 1) / 2 + p
}

/// Visibility within a bar graph given by its bar sizes; cells 0-based canonical.
fn brute_visible(bars: &[usize], a: usize, b: usize) -> bool {
    let locate = |mut c: usize| {
        for (i, &s) in bars.iter().enumerate() {
            if c < s {
                return (i, c);
            }
            c -= s;
        }
        unreachable!()
    };
    let ((ba, ha), (bb, hb)) = (locate(a), locate(b));
    let (lo, hi) = (ba.min(bb), ba.max(bb));
    ba == bb || (ha == hb && bars[lo..=hi].iter().all(|&s| s > ha))
}

fn composition_of_bits(bits: u64, k: usize) -> Vec<usize> {
    // bit k-1-t (MSB first) says whether cell t+1 starts a new bar
    let mut bars = vec![1usize];
    for t in 1..k {
        if bits >> (k - 1 - t) & 1 == 1 {
            bars.push(1);
        } else {
            *bars.last_mut().unwrap() += 1;
        }
    }
    bars
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    /// bit `pair_index(p, q)` set iff cells p and q are visible
    pub vis: u128,
    /// smallest bar size over all bars but the last; 0 when there is one bar
    pub min_bar_except_last: u8,
}

/// Answers for every bar graph of size k, indexed by the k−1 bits of `S`
/// after the (always set) first bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupTable {
    k: usize,
    entries: Vec<Entry>,
}

impl LookupTable {
    pub fn build(k: usize) -> Result<LookupTable, BarsError> {
        if k == 0 || k > MAX_TABLE_K {
            return Err(BarsError::InvalidK(k));
        }
        let entries = (0..1u64 << (k - 1))
            .map(|bits| {
                let bars = composition_of_bits(bits, k);
                let mut vis = 0u128;
                for q in 1..k {
                    for p in 0..q {
                        if brute_visible(&bars, p, q) {
                            vis |= 1 << pair_index(p, q);
                        }
                    }
                }
                let min = bars[..bars.len() - 1].iter().min().copied().unwrap_or(0);
                Entry { vis, min_bar_except_last: min as u8 }
            })
            .collect();
        Ok(LookupTable { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, index: usize) -> Entry {
        self.entries[index]
    }

    /// Bar sizes of the graph an entry describes.
    pub fn composition(&self, index: usize) -> Vec<usize> {
        composition_of_bits(index as u64, self.k)
    }

    pub fn vis(&self, index: usize, p: usize, q: usize) -> bool {
        let (p, q) = (p.min(q), p.max(q));
        p == q || self.entries[index].vis >> pair_index(p, q) & 1 == 1
    }

    /// C(k,2) vis bits plus ceil(log2 k) bits for the minimum, per entry.
    pub fn bits(&self) -> usize {
        let k = self.k;
        let lg = if k <= 1 { 0 } else { (usize::BITS - (k - 1).leading_zeros()) as usize };
        self.entries.len() * (k * (k - 1) / 2 + lg)
    }
}

/// `k = ⌊log2 log2 n⌋` clamped to [1, 8].
pub fn natural_k(n: usize) -> usize {
    if n < 4 {
        return 1;
    }
    ((n as f64).log2().log2().floor() as usize).clamp(1, 8)
}

/// Which of the literal published formulas to use instead of the corrected
/// ones. Only for regression tests showing where they go wrong.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rules {
    /// treat x as a main cell iff x > q + k (otherwise redirect left)
    pub literal_main_cell: bool,
    /// take the height-h cell of a bar as first_in_bar + h − 1
    pub literal_height_index: bool,
    /// interior bars pass iff lo ≥ h
    pub literal_threshold: bool,
    /// range minimum over blocks i..=j instead of i+1..=j−1
    pub inclusive_lca: bool,
}

/// Visibility answer plus the intermediate values of the cross-block case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VisTrace {
    pub visible: bool,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub w: Option<usize>,
    pub z: Option<usize>,
    pub l: Option<usize>,
    pub lo: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct BarGraphStructure {
    s: BitVector,
    b: BitVector,
    k: usize,
    table: Arc<LookupTable>,
    /// super-root plus one node per block; block i is preorder id i+1 and
    /// its parent is the nearest block to its left with a minimum ≤ its own
    ctree: OrdinalTree,
}

impl BarGraphStructure {
    pub fn build(bars: &[usize]) -> Result<BarGraphStructure, BarsError> {
        let n: usize = bars.iter().sum();
        Self::build_with_k(bars, natural_k(n))
    }

    pub fn build_with_k(bars: &[usize], k: usize) -> Result<BarGraphStructure, BarsError> {
        let table = Arc::new(LookupTable::build(k)?);
        Self::build_with_table(bars, table)
    }

    pub fn build_with_table(bars: &[usize], table: Arc<LookupTable>) -> Result<BarGraphStructure, BarsError> {
        if bars.is_empty() {
            return Err(BarsError::EmptyComposition);
        }
        if let Some(i) = bars.iter().position(|&s| s == 0) {
            return Err(BarsError::ZeroBar(i + 1));
        }
        let k = table.k();
        let n: usize = bars.iter().sum();
        let mut s_ones = Vec::with_capacity(bars.len());
        let mut b_ones = Vec::new();
        let mut minima = Vec::new();
        let (mut pos, mut in_block, mut block_min) = (1usize, 0usize, usize::MAX);
        for &size in bars {
            if in_block == 0 {
                b_ones.push(pos);
            }
            s_ones.push(pos);
            in_block += size;
            block_min = block_min.min(size);
            if in_block >= k {
                minima.push(block_min);
                in_block = 0;
                block_min = usize::MAX;
            }
            pos += size;
        }
        if in_block > 0 {
            minima.push(block_min);
        }
        let ctree = Self::ctree_from_minima(&minima, TreeMode::Compact);
        Ok(BarGraphStructure {
            s: BitVector::from_ones(n, &s_ones, Mode::Plain),
            b: BitVector::from_ones(n, &b_ones, Mode::Sparse),
            k,
            table,
            ctree,
        })
    }

    fn ctree_from_minima(minima: &[usize], mode: TreeMode) -> OrdinalTree {
        let mut parents = vec![0usize; minima.len() + 1];
        let mut stack: Vec<usize> = Vec::new();
        for (i, &m) in minima.iter().enumerate() {
            while stack.last().is_some_and(|&j| minima[j] > m) {
                stack.pop();
            }
            parents[i + 1] = stack.last().map_or(1, |&j| j + 2);
            stack.push(i);
        }
        OrdinalTree::from_preorder_parents(&parents, mode).expect("previous-smaller forest is a preorder tree")
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bar_count(&self) -> usize {
        self.s.count_ones()
    }

    pub fn block_count(&self) -> usize {
        self.b.count_ones()
    }

    pub fn s_bits(&self) -> &BitVector {
        &self.s
    }

    pub fn b_bits(&self) -> &BitVector {
        &self.b
    }

    pub fn ctree(&self) -> &OrdinalTree {
        &self.ctree
    }

    pub fn table(&self) -> &LookupTable {
        &self.table
    }

    pub fn composition(&self) -> Vec<usize> {
        (1..=self.bar_count()).map(|i| self.bar_size(i)).collect()
    }

    fn check(&self, x: usize) -> Result<(), QueryError> {
        if x == 0 || x > self.n() {
            Err(QueryError::InvalidCell(x))
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn bar_of(&self, x: usize) -> usize {
        self.s.rank1(x)
    }

    #[inline]
    pub fn first_in_bar(&self, x: usize) -> usize {
        self.s.select1(self.bar_of(x)).unwrap()
    }

    #[inline]
    pub fn cell_height(&self, x: usize) -> usize {
        x - self.first_in_bar(x)
    }

    #[inline]
    pub fn block_of(&self, x: usize) -> usize {
        self.b.rank1(x)
    }

    /// Cell count of bar i (1-based).
    #[inline]
    pub fn bar_size(&self, i: usize) -> usize {
        let start = self.s.select1(i).unwrap();
        match self.s.select1(i + 1) {
            Some(next) => next - start,
            None => self.n() + 1 - start,
        }
    }

    /// Last cell of block i.
    fn block_end(&self, i: usize) -> usize {
        self.b.select1(i + 1).map_or(self.n(), |c| c - 1)
    }

    pub fn up_raw(&self, x: usize) -> Option<usize> {
        (x < self.n() && !self.s.get(x + 1)).then_some(x + 1)
    }

    pub fn down_raw(&self, x: usize) -> Option<usize> {
        (!self.s.get(x)).then(|| x - 1)
    }

    pub fn left_raw(&self, x: usize) -> Option<usize> {
        let bar = self.bar_of(x);
        if bar == 1 {
            return None;
        }
        let first = self.s.select1(bar).unwrap();
        let cl = self.s.select1(bar - 1).unwrap();
        let h = x - first;
        (cl + h < first).then_some(cl + h)
    }

    pub fn right_raw(&self, x: usize) -> Option<usize> {
        let bar = self.bar_of(x);
        let cr = self.s.select1(bar + 1)?;
        let h = x - self.s.select1(bar).unwrap();
        (self.bar_size(bar + 1) > h).then_some(cr + h)
    }

    /// Lookup-table index of the size-k graph formed by the first k cells of
    /// the block starting at q (cells past n read as 0, extending the last bar).
    fn entry_index(&self, q: usize) -> usize {
        let mut e = 0usize;
        for t in 1..self.k {
            let c = q + t;
            e = e << 1 | (c <= self.n() && self.s.get(c)) as usize;
        }
        e
    }

    /// Range minimum over blocks a..=b: the leftmost block of smallest minimum.
    pub fn block_rmq(&self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        let t = &self.ctree;
        let w = t.lca_raw(a + 1, b + 1);
        if w == a + 1 {
            a
        } else {
            t.ancestor_raw(b + 1, t.depth_raw(w) + 1) - 1
        }
    }

    /// Smallest bar size in block `l`, i.e. the Cartesian-tree key.
    pub fn block_min(&self, l: usize) -> usize {
        let q = self.b.select1(l).unwrap();
        let h1 = self.table.entry(self.entry_index(q)).min_bar_except_last as usize;
        let h2 = self.bar_size(self.bar_of(self.block_end(l)));
        if h1 == 0 { h2 } else { h1.min(h2) }
    }

    /// Same-block visibility of x1 < x2 through the table.
    fn visible_in_block(&self, block: usize, x1: usize, x2: usize, rules: Rules) -> bool {
        if x1 == x2 {
            return true;
        }
        let q = self.b.select1(block).unwrap();
        let e = self.entry_index(q);
        let main = if rules.literal_main_cell { x2 > q + self.k } else { x2 - q < self.k };
        let y = if main { Some(x2) } else { self.left_raw(x2) };
        match y {
            None => false,
            Some(y) if y < x1 => false,
            Some(y) if y - q >= self.k || x1 - q >= self.k => false, // no such entry
            Some(y) => self.table.vis(e, x1 - q, y - q),
        }
    }

    pub fn visible_raw(&self, a: usize, b: usize) -> bool {
        self.visible_traced_raw(a, b, Rules::default()).visible
    }

    pub fn is_visible_traced(&self, a: usize, b: usize) -> Result<VisTrace, QueryError> {
        self.is_visible_with(a, b, Rules::default())
    }

    pub fn is_visible_with(&self, a: usize, b: usize, rules: Rules) -> Result<VisTrace, QueryError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.visible_traced_raw(a, b, rules))
    }

    fn visible_traced_raw(&self, a: usize, b: usize, rules: Rules) -> VisTrace {
        let (x1, x2) = (a.min(b), a.max(b));
        let mut tr = VisTrace::default();
        let (bar1, bar2) = (self.bar_of(x1), self.bar_of(x2));
        if bar1 == bar2 {
            tr.visible = true;
            return tr;
        }
        let f1 = self.s.select1(bar1).unwrap();
        let f2 = self.s.select1(bar2).unwrap();
        let h = x1 - f1;
        if h != x2 - f2 {
            return tr;
        }
        if h == 0 {
            tr.visible = true;
            return tr;
        }
        let (i, j) = (self.block_of(x1), self.block_of(x2));
        tr.i = Some(i);
        tr.j = Some(j);
        if i == j {
            tr.visible = self.visible_in_block(i, x1, x2, rules);
            return tr;
        }
        // height-h cell of a bar starting at `first`, if the bar is tall enough
        let at_height = |first: usize, size: usize| -> Option<usize> {
            if rules.literal_height_index {
                (size >= h).then(|| first + h - 1)
            } else {
                (size > h).then_some(first + h)
            }
        };
        let last_i = self.block_end(i);
        let last_bar_i = self.bar_of(last_i);
        let w = at_height(self.s.select1(last_bar_i).unwrap(), self.bar_size(last_bar_i));
        let first_j = self.b.select1(j).unwrap();
        let z = at_height(first_j, self.bar_size(self.bar_of(first_j)));
        tr.w = w;
        tr.z = z;
        let (Some(w), Some(z)) = (w, z) else {
            return tr;
        };
        if !self.visible_in_block(i, x1.min(w), x1.max(w), rules)
            || !self.visible_in_block(j, z.min(x2), z.max(x2), rules)
        {
            return tr;
        }
        let (lo_block, hi_block) = if rules.inclusive_lca { (i, j) } else { (i + 1, j - 1) };
        if lo_block > hi_block {
            tr.visible = true;
            return tr;
        }
        let l = self.block_rmq(lo_block, hi_block);
        let lo = self.block_min(l);
        tr.l = Some(l);
        tr.lo = Some(lo);
        tr.visible = if rules.literal_threshold { lo >= h } else { lo > h };
        tr
    }

    /// Serialized bits; the lookup table is rebuilt from k and not included.
    pub fn serialized_bits(&self) -> usize {
        self.to_sections().iter().map(|s| s.bit_len as usize).sum()
    }

    /// Serialized sections plus the lookup table.
    pub fn payload_bits(&self) -> usize {
        self.serialized_bits() + self.table.bits()
    }

    pub fn index_bits(&self) -> usize {
        self.s.index_bits() + self.b.index_bits() + self.ctree.index_bits()
    }

    pub(crate) fn to_sections(&self) -> Vec<Section> {
        let mut w = BitWriter::new();
        for bit in self.s.iter() {
            w.push(bit);
        }
        vec![
            w.into_section(TAG_S),
            self.b.to_section(TAG_B),
            Section::u64(TAG_K, self.k as u64),
            self.ctree.to_section(TAG_CTREE),
        ]
    }

    pub fn to_container(&self) -> Container {
        Container { kind: Kind::Bars, sections: self.to_sections() }
    }

    pub fn from_container(c: &Container) -> Result<BarGraphStructure, CodecError> {
        if c.kind != Kind::Bars {
            return Err(CodecError::BadKind(c.kind as u8));
        }
        let ss = c.section(TAG_S)?;
        let mut r = BitReader::new(ss);
        let bits = (0..ss.bit_len).map(|_| r.bit()).collect::<Result<Vec<bool>, _>>()?;
        let s = BitVector::from_bits(&bits, Mode::Plain);
        let b = BitVector::from_section(c.section(TAG_B)?)?;
        let k = c.section(TAG_K)?.read_u64()? as usize;
        let ctree = OrdinalTree::from_section(c.section(TAG_CTREE)?, TreeMode::Compact)?;
        let bad = |why: &str| CodecError::Malformed { tag: TAG_S, why: why.into() };
        if s.is_empty() || !s.get(1) || b.len() != s.len() || !b.get(1) {
            return Err(bad("S and B must be nonempty, equally long, and start with 1"));
        }
        if ctree.node_count() != b.count_ones() + 1 {
            return Err(bad("Cartesian tree size does not match the block count"));
        }
        let table = Arc::new(LookupTable::build(k).map_err(|e| bad(&e.to_string()))?);
        Ok(BarGraphStructure { s, b, k, table, ctree })
    }
}

impl Navigable for BarGraphStructure {
    fn cell_count(&self) -> usize {
        self.n()
    }

    fn neighbor(&self, x: usize, dir: Dir) -> Result<Option<usize>, QueryError> {
        self.check(x)?;
        Ok(match dir {
            Dir::Left => self.left_raw(x),
            Dir::Right => self.right_raw(x),
            Dir::Up => self.up_raw(x),
            Dir::Down => self.down_raw(x),
        })
    }

    fn is_visible(&self, a: usize, b: usize) -> Result<bool, QueryError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.visible_raw(a, b))
    }

    fn handles(&self) -> Option<&HandleMap> {
        None
    }
}

/// One counterexample per corrected formula, as (name, bars, k, a, b): the
/// literal rule disagrees with the grid on (a, b), the implemented one agrees.
pub const COUNTEREXAMPLES: [(&str, &[usize], usize, usize, usize); 4] = [
    ("main-cell direction", &[3, 3], 4, 3, 6),
    ("height index", &[1, 2, 2], 2, 3, 5),
    ("lo threshold", &[2, 1, 1, 2], 2, 2, 6),
    ("endpoint-block range", &[1, 2, 2], 2, 3, 5),
];

pub fn literal_rule(name: &str) -> Rules {
    let mut r = Rules::default();
    match name {
        "main-cell direction" => r.literal_main_cell = true,
        "height index" => r.literal_height_index = true,
        "lo threshold" => r.literal_threshold = true,
        _ => r.inclusive_lca = true,
    }
    r
}

/// Canonical index ↔ coordinate map for a composition (x = bar − 1, y = height).
pub fn handle_map(bars: &[usize]) -> HandleMap {
    let n = bars.iter().sum();
    let mut m = HandleMap::new(n);
    let mut x = 1;
    for (col, &s) in bars.iter().enumerate() {
        for y in 0..s {
            m.insert((col as i64, y as i64), x);
            x += 1;
        }
    }
    m
}
