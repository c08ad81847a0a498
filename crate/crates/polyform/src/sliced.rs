//! Structure for arbitrary polyominoes: cut the rows into slices of
//! thickness `f`, lay the slices side by side so they fit a strip of height
//! at most `f`, store that with a covering structure, and stitch the slices
//! back together with two bitstrings.
//!
//! Rows are numbered top-down from 1. A slicing of type `i` puts rows 1..=i
//! in slice 1 and every following group of `f` rows in its own slice.
//! *Top cells* are the first row of every slice after the first; *bottom
//! cells* are the last row of slice 1 and row `f` of every later slice that
//! has one. `Top` holds one bit per top cell (is there a cell above it?),
//! `Bot` one bit per bottom cell (is there a cell below it?), both in level
//! order of the strip, slice-1 bottoms first. The j'th one in `Top` and the
//! j'th one in `Bot` are the two halves of the same vertical adjacency.
//!
//! Slice j sits (j−1)·(W+1) columns to the right in the strip, so slices are
//! never horizontally adjacent and every slice's rows share strip levels.

use crate::bits::{BitVector, Mode};
use crate::codec::{CodecError, Container, Kind, Section};
use crate::covering::{CoveringStructure, Strip};
use crate::grid::{Dir, Polyomino};
use crate::query::{HandleMap, Navigable, QueryError};
use crate::treekit::TreeMode;
use thiserror::Error;

const TAG_TOP: u8 = 4;
const TAG_BOT: u8 = 5;
const TAG_F: u8 = 6;
const TAG_ISTAR: u8 = 7;
const TAG_FIRST_TOP: u8 = 8;
const TAG_FIRST_BOT: u8 = 9;
const TAG_SLICES: u8 = 10;

#[derive(Debug, Error, PartialEq)]
pub enum SlicedError {
    #[error("slice thickness must be at least 1")]
    InvalidThickness,
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
}

/// How the slice thickness is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thickness {
    Fixed(usize),
    /// `ceil(n / ceil(log2(n+1)))`: smallest space, O(log n) visibility.
    MinSpace,
    /// `ceil(ε·n/3)`: (3+ε)n bits, constant visibility.
    ConstVis(f64),
}

impl Thickness {
    pub fn resolve(self, n: usize) -> Result<usize, SlicedError> {
        match self {
            Thickness::Fixed(0) => Err(SlicedError::InvalidThickness),
            Thickness::Fixed(f) => Ok(f),
            Thickness::MinSpace => {
                let lg = (usize::BITS - n.leading_zeros()) as usize; // ceil(log2(n+1))
                Ok(n.div_ceil(lg.max(1)).max(1))
            }
            Thickness::ConstVis(eps) => {
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(SlicedError::InvalidEpsilon(eps));
                }
                Ok(((eps * n as f64 / 3.0).ceil() as usize).max(1))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicingPlan {
    pub f: usize,
    pub i_star: usize,
    pub slice_count: usize,
    pub boundary_count: usize,
    /// boundary count of every type, index 0 = type 1
    pub type_counts: Vec<usize>,
}

impl SlicingPlan {
    /// Slice and strip level of a row (1-based, top-down).
    pub fn place(&self, row: usize) -> (usize, usize) {
        if row <= self.i_star {
            (1, row)
        } else {
            let r = row - self.i_star - 1;
            (2 + r / self.f, 1 + r % self.f)
        }
    }
}

/// Boundary cells of every slicing type, from per-row counts (top-down).
///
/// Rows `r` (0-based) with `r ≡ i−1 (mod f)` are exactly the bottom rows of
/// type `i`; rows with `r ≡ i (mod f)`, `r ≥ i`, its top rows. So one pass
/// bucketing rows by residue answers every type.
pub fn boundary_counts(rows: &[usize], f: usize) -> Vec<usize> {
    assert!(f >= 1);
    let mut bucket = vec![0usize; f];
    for (r, &c) in rows.iter().enumerate() {
        bucket[r % f] += c;
    }
    let first = rows.first().copied().unwrap_or(0);
    (1..=f)
        .map(|i| {
            let bottoms = bucket[i - 1];
            let tops = if i == f { bucket[0] - first } else { bucket[i] };
            bottoms + tops
        })
        .collect()
}

pub fn choose_slicing(p: &Polyomino, f: usize) -> Result<SlicingPlan, SlicedError> {
    if f == 0 {
        return Err(SlicedError::InvalidThickness);
    }
    let rows = p.row_counts_top_down();
    let type_counts = boundary_counts(&rows, f);
    let (best, &count) = type_counts.iter().enumerate().min_by_key(|&(i, c)| (*c, i)).unwrap();
    let i_star = best + 1;
    let h = rows.len();
    let slice_count = 1 + h.saturating_sub(i_star).div_ceil(f);
    Ok(SlicingPlan { f, i_star, slice_count, boundary_count: count, type_counts })
}

#[derive(Clone, Debug)]
pub struct SlicedStructure {
    base: CoveringStructure,
    top: BitVector,
    bot: BitVector,
    f: usize,
    i_star: usize,
    first_top: usize,
    first_bot: usize,
    slice_count: usize,
}

impl SlicedStructure {
    pub fn build(p: &Polyomino, t: Thickness) -> Result<SlicedStructure, SlicedError> {
        Self::build_with(p, t, TreeMode::Compact)
    }

    pub fn build_with(p: &Polyomino, t: Thickness, mode: TreeMode) -> Result<SlicedStructure, SlicedError> {
        let f = t.resolve(p.n())?;
        let plan = choose_slicing(p, f)?;
        Ok(Self::from_plan(p, &plan, mode))
    }

    pub fn from_plan(p: &Polyomino, plan: &SlicingPlan, mode: TreeMode) -> SlicedStructure {
        let (w, h) = (p.width() as i64, p.height());
        let rows = p.row_counts_top_down();
        let levels = (1..=h).map(|r| plan.place(r).1).max().unwrap_or(0);
        let mut strip = Strip { levels: vec![Vec::new(); levels] };
        for (x, y) in p.cells() {
            let row = h - y as usize;
            let (slice, level) = plan.place(row);
            strip.levels[level - 1].push((x + (slice as i64 - 1) * (w + 1), (x, y)));
        }
        for l in &mut strip.levels {
            l.sort_unstable();
        }
        let base = CoveringStructure::from_strip(&strip, mode);

        let (f, i_star) = (plan.f, plan.i_star);
        let first_top = rows[0];
        let first_bot = if i_star <= h { rows[i_star - 1] } else { 0 };
        let occupied = |x: i64, y: i64| p.contains(x, y);
        let mut top = Vec::new();
        for &(_, (x, y)) in &strip.levels[0] {
            if plan.place(h - y as usize).0 >= 2 {
                top.push(occupied(x, y + 1));
            }
        }
        let mut bot = Vec::new();
        if first_bot > 0 {
            for &(_, (x, y)) in &strip.levels[i_star - 1] {
                if plan.place(h - y as usize).0 == 1 {
                    bot.push(occupied(x, y - 1));
                }
            }
        }
        if f <= levels {
            for &(_, (x, y)) in &strip.levels[f - 1] {
                if plan.place(h - y as usize).0 >= 2 {
                    bot.push(occupied(x, y - 1));
                }
            }
        }
        SlicedStructure {
            base,
            top: BitVector::from_bits(&top, Mode::Sparse),
            bot: BitVector::from_bits(&bot, Mode::Sparse),
            f,
            i_star,
            first_top,
            first_bot,
            slice_count: plan.slice_count,
        }
    }

    pub fn base(&self) -> &CoveringStructure {
        &self.base
    }

    pub fn top_bits(&self) -> &BitVector {
        &self.top
    }

    pub fn bot_bits(&self) -> &BitVector {
        &self.bot
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn i_star(&self) -> usize {
        self.i_star
    }

    pub fn first_top(&self) -> usize {
        self.first_top
    }

    pub fn first_bot(&self) -> usize {
        self.first_bot
    }

    pub fn slice_count(&self) -> usize {
        self.slice_count
    }

    pub fn set_handle_map(&mut self, map: HandleMap) {
        self.base.set_handle_map(map);
    }

    /// Index among top cells (0-based), if `c` is one.
    fn top_index(&self, c: usize) -> Option<usize> {
        let t = self.base.tree();
        let rho = t.level_rank_raw(c);
        (t.depth_raw(c) == 1 && rho > self.first_top).then(|| rho - self.first_top - 1)
    }

    /// Index among bottom cells (0-based), if `c` is one. When i* = f the
    /// slice-1 bottoms are simply the first FirstBot cells of level f.
    fn bot_index(&self, c: usize) -> Option<usize> {
        let t = self.base.tree();
        let (d, rho) = (t.depth_raw(c), t.level_rank_raw(c));
        if d == self.f {
            Some(if self.i_star == self.f { rho - 1 } else { self.first_bot + rho - 1 })
        } else if d == self.i_star && rho <= self.first_bot {
            Some(rho - 1)
        } else {
            None
        }
    }

    pub(crate) fn up_raw(&self, c: usize) -> Option<usize> {
        let Some(k) = self.top_index(c) else {
            return self.base.up_raw(c);
        };
        if !self.top.get(k + 1) {
            return None;
        }
        let j = self.top.rank1(k + 1);
        let r = self.bot.select1(j).expect("Top and Bot have equal popcount") - 1;
        let (level, rho) = if self.i_star == self.f {
            (self.f, r + 1)
        } else if r < self.first_bot {
            (self.i_star, r + 1)
        } else {
            (self.f, r - self.first_bot + 1)
        };
        Some(self.base.tree().level_select_raw(level, rho + 1))
    }

    pub(crate) fn down_raw(&self, c: usize) -> Option<usize> {
        let Some(k) = self.bot_index(c) else {
            return self.base.down_raw(c);
        };
        if !self.bot.get(k + 1) {
            return None;
        }
        let j = self.bot.rank1(k + 1);
        let r = self.top.select1(j).expect("Top and Bot have equal popcount") - 1;
        Some(self.base.tree().level_select_raw(1, self.first_top + r + 2))
    }

    /// Visibility plus the number of slice-scanning iterations it took.
    pub fn is_visible_traced(&self, a: usize, b: usize) -> Result<(bool, usize), QueryError> {
        self.base.check_cell(a)?;
        self.base.check_cell(b)?;
        Ok(self.visible_traced_raw(a, b))
    }

    pub(crate) fn visible_traced_raw(&self, a: usize, b: usize) -> (bool, usize) {
        let (c1, c2) = if a <= b { (a, b) } else { (b, a) };
        if self.base.visible_raw(c1, c2) {
            return (true, 0);
        }
        let t = self.base.tree();
        let d1 = t.depth_raw(c1);
        let mut cur = c2;
        let mut iters = 0;
        loop {
            if cur < c1 || iters >= self.slice_count {
                return (false, iters);
            }
            iters += 1;
            let d = t.depth_raw(cur);
            if d >= d1 && cur - c1 == d - d1 {
                return (true, iters);
            }
            let anc = t.ancestor_raw(cur, 1);
            if cur - anc != d - 1 || self.base.is_dummy(anc) {
                return (false, iters);
            }
            match self.up_raw(anc) {
                Some(up) => cur = up,
                None => return (false, iters),
            }
        }
    }

    pub fn payload_bits(&self) -> usize {
        self.to_sections().iter().map(|s| s.bit_len as usize).sum()
    }

    pub fn index_bits(&self) -> usize {
        self.base.index_bits() + self.top.index_bits() + self.bot.index_bits()
    }

    pub(crate) fn to_sections(&self) -> Vec<Section> {
        let mut s = self.base.to_sections();
        s.push(self.top.to_section(TAG_TOP));
        s.push(self.bot.to_section(TAG_BOT));
        for (tag, v) in [
            (TAG_F, self.f),
            (TAG_ISTAR, self.i_star),
            (TAG_FIRST_TOP, self.first_top),
            (TAG_FIRST_BOT, self.first_bot),
            (TAG_SLICES, self.slice_count),
        ] {
            s.push(Section::u64(tag, v as u64));
        }
        s
    }

    pub fn to_container(&self) -> Container {
        Container { kind: Kind::Sliced, sections: self.to_sections() }
    }

    pub fn from_container(c: &Container) -> Result<SlicedStructure, CodecError> {
        if c.kind != Kind::Sliced {
            return Err(CodecError::BadKind(c.kind as u8));
        }
        let base = CoveringStructure::from_sections(c)?;
        let top = BitVector::from_section(c.section(TAG_TOP)?)?;
        let bot = BitVector::from_section(c.section(TAG_BOT)?)?;
        let int = |tag| -> Result<usize, CodecError> { Ok(c.section(tag)?.read_u64()? as usize) };
        let s = SlicedStructure {
            base,
            top,
            bot,
            f: int(TAG_F)?,
            i_star: int(TAG_ISTAR)?,
            first_top: int(TAG_FIRST_TOP)?,
            first_bot: int(TAG_FIRST_BOT)?,
            slice_count: int(TAG_SLICES)?,
        };
        if s.f == 0 || s.i_star == 0 || s.i_star > s.f || s.top.count_ones() != s.bot.count_ones() {
            return Err(CodecError::Malformed { tag: TAG_TOP, why: "inconsistent slicing parameters".into() });
        }
        Ok(s)
    }
}

impl Navigable for SlicedStructure {
    fn cell_count(&self) -> usize {
        self.base.cell_count()
    }

    fn neighbor(&self, c: usize, dir: Dir) -> Result<Option<usize>, QueryError> {
        self.base.check_cell(c)?;
        Ok(match dir {
            Dir::Left => self.base.left_raw(c),
            Dir::Right => self.base.right_raw(c),
            Dir::Up => self.up_raw(c),
            Dir::Down => self.down_raw(c),
        })
    }

    fn is_visible(&self, a: usize, b: usize) -> Result<bool, QueryError> {
        self.is_visible_traced(a, b).map(|r| r.0)
    }

    fn handles(&self) -> Option<&HandleMap> {
        self.base.handle_map()
    }
}
