//! Covering-tree structure for polyominoes that fit in a short strip
//! (~3n bits: a 2-bit-per-node tree shape plus one left bit per node).
//!
//! A dummy column is glued left of the strip (one dummy per row) with a root
//! dummy on top. Levels are counted from the top: the root is level 0, the
//! top row level 1. The parent of a node at level ℓ is the rightmost *domino
//! head* on level ℓ−1 at or left of its column (a head is a node with a node
//! directly below it). The dummy column guarantees one always exists.
//!
//! Within a level, preorder and level order agree with left-to-right order,
//! and a node's first child is always the node directly below it. Hence
//!
//! * left/right: level predecessor/successor, guarded by the left bits;
//! * up: the parent, if we are its first child;
//! * down: the next node in preorder, if we are its parent;
//! * vertical visibility: `c2` is a leftmost descendant of `c1`, which in
//!   preorder reads `c2 − c1 = depth(c2) − depth(c1)`.

use crate::bits::{BitVector, Mode};
use crate::codec::{CodecError, Container, Kind, Section};
use crate::grid::{Dir, Polyomino};
use crate::query::{HandleMap, Navigable, QueryError};
use crate::treekit::{OrdinalTree, TreeMode};

pub(crate) const TAG_TREE: u8 = 1;
pub(crate) const TAG_LEFT: u8 = 2;
pub(crate) const TAG_HEIGHT: u8 = 3;

#[derive(Clone, Debug)]
pub struct CoveringStructure {
    tree: OrdinalTree,
    left: BitVector,
    strip_height: usize,
    map: Option<HandleMap>,
}

/// Strip layout handed to the builder: for each level 1..=h, the occupied
/// columns in increasing order, and the coordinate each cell stands for.
pub(crate) struct Strip {
    pub levels: Vec<Vec<(i64, (i64, i64))>>,
}

impl Strip {
    pub fn from_polyomino(p: &Polyomino) -> Strip {
        let h = p.height();
        let mut levels = vec![Vec::new(); h];
        for (x, y) in p.cells() {
            levels[h - 1 - y as usize].push((x, (x, y)));
        }
        for l in &mut levels {
            l.sort_unstable();
        }
        Strip { levels }
    }
}

impl CoveringStructure {
    pub fn build(p: &Polyomino) -> CoveringStructure {
        Self::build_with(p, TreeMode::Compact)
    }

    pub fn build_with(p: &Polyomino, mode: TreeMode) -> CoveringStructure {
        Self::from_strip(&Strip::from_polyomino(p), mode)
    }

    pub(crate) fn from_strip(strip: &Strip, mode: TreeMode) -> CoveringStructure {
        let h = strip.levels.len();
        const DUMMY: i64 = i64::MIN;
        // level 0: root; level l: dummy then cells
        let mut prev: Vec<i64> = vec![DUMMY];
        let mut degrees: Vec<usize> = Vec::new();
        let mut left_ones = Vec::new();
        let mut coord_of_lo: Vec<Option<(i64, i64)>> = vec![None];
        let mut lo = 1usize;
        for l in 0..h {
            let cols: Vec<i64> = std::iter::once(DUMMY).chain(strip.levels[l].iter().map(|c| c.0)).collect();
            // heads on the previous level: their column reappears here
            let mut deg = vec![0usize; prev.len()];
            let (mut j, mut last_head) = (0usize, 0usize);
            let mut k = 0usize;
            for &c in &cols {
                while j < prev.len() && prev[j] <= c {
                    while k < cols.len() && cols[k] < prev[j] {
                        k += 1;
                    }
                    if k < cols.len() && cols[k] == prev[j] {
                        last_head = j;
                    }
                    j += 1;
                }
                deg[last_head] += 1;
            }
            degrees.extend(deg);
            for (i, &c) in cols.iter().enumerate() {
                lo += 1;
                if i >= 2 && cols[i - 1] == c - 1 {
                    left_ones.push(lo);
                }
                coord_of_lo.push(if i == 0 { None } else { Some(strip.levels[l][i - 1].1) });
            }
            prev = cols;
        }
        degrees.extend(std::iter::repeat(0).take(prev.len()));
        let total = degrees.len();
        let tree = OrdinalTree::build_with(&degrees, mode).expect("covering tree is well formed");
        let left = BitVector::from_ones(total, &left_ones, Mode::Plain);
        let mut map = HandleMap::new(total);
        for (w, c) in coord_of_lo.iter().enumerate() {
            if let Some(c) = c {
                map.insert(*c, tree.lo_select_raw(w + 1));
            }
        }
        CoveringStructure { tree, left, strip_height: h, map: Some(map) }
    }

    pub fn tree(&self) -> &OrdinalTree {
        &self.tree
    }

    pub fn left_bits(&self) -> &BitVector {
        &self.left
    }

    pub fn strip_height(&self) -> usize {
        self.strip_height
    }

    pub fn node_count(&self) -> usize {
        self.tree.node_count()
    }

    pub fn handle_map(&self) -> Option<&HandleMap> {
        self.map.as_ref()
    }

    pub fn set_handle_map(&mut self, map: HandleMap) {
        self.map = Some(map);
    }

    /// Left bits of one level, dummy first.
    pub fn level_left_bits(&self, level: usize) -> String {
        let mut s = String::new();
        let mut i = 1;
        while let Some(v) = self.tree.level_select(level, i) {
            s.push(if self.left.get(self.tree.lo_rank_raw(v)) { '1' } else { '0' });
            i += 1;
        }
        s
    }

    #[inline]
    pub fn is_dummy(&self, v: usize) -> bool {
        v == 1 || self.tree.is_level_first_raw(v)
    }

    pub(crate) fn check_cell(&self, v: usize) -> Result<(), QueryError> {
        if v == 0 || v > self.tree.node_count() || self.is_dummy(v) {
            Err(QueryError::InvalidCell(v))
        } else {
            Ok(())
        }
    }

    #[inline]
    pub(crate) fn left_raw(&self, c: usize) -> Option<usize> {
        let w = self.tree.lo_rank_raw(c);
        self.left.get(w).then(|| self.tree.lo_select_raw(w - 1))
    }

    #[inline]
    pub(crate) fn right_raw(&self, c: usize) -> Option<usize> {
        let w = self.tree.lo_rank_raw(c);
        (w < self.left.len() && self.left.get(w + 1)).then(|| self.tree.lo_select_raw(w + 1))
    }

    #[inline]
    pub(crate) fn up_raw(&self, c: usize) -> Option<usize> {
        // in preorder a first child directly follows its parent
        let p = self.tree.parent_raw(c);
        (p != 0 && p + 1 == c && !self.is_dummy(p)).then_some(p)
    }

    #[inline]
    pub(crate) fn down_raw(&self, c: usize) -> Option<usize> {
        (c < self.tree.node_count() && self.tree.parent_raw(c + 1) == c).then_some(c + 1)
    }

    /// Same-level visibility via left-bit ranks, or leftmost-descendant test.
    #[inline]
    pub(crate) fn visible_raw(&self, a: usize, b: usize) -> bool {
        let (c1, c2) = if a <= b { (a, b) } else { (b, a) };
        let (d1, d2) = (self.tree.depth_raw(c1), self.tree.depth_raw(c2));
        if d1 == d2 {
            let (w1, w2) = (self.tree.lo_rank_raw(c1), self.tree.lo_rank_raw(c2));
            self.left.rank1(w2) - self.left.rank1(w1) == w2 - w1
        } else {
            d2 > d1 && c2 - c1 == d2 - d1
        }
    }

    pub fn payload_bits(&self) -> usize {
        self.to_sections().iter().map(|s| s.bit_len as usize).sum()
    }

    pub fn index_bits(&self) -> usize {
        self.tree.index_bits() + self.left.index_bits()
    }

    pub(crate) fn to_sections(&self) -> Vec<Section> {
        vec![
            self.tree.to_section(TAG_TREE),
            self.left.to_section(TAG_LEFT),
            Section::u64(TAG_HEIGHT, self.strip_height as u64),
        ]
    }

    pub(crate) fn from_sections(c: &Container) -> Result<CoveringStructure, CodecError> {
        let tree = OrdinalTree::from_section(c.section(TAG_TREE)?, TreeMode::Compact)?;
        let left = BitVector::from_section(c.section(TAG_LEFT)?)?;
        let strip_height = c.section(TAG_HEIGHT)?.read_u64()? as usize;
        if left.len() != tree.node_count() || tree.level_count() != strip_height + 1 {
            return Err(CodecError::Malformed { tag: TAG_LEFT, why: "inconsistent sizes".into() });
        }
        Ok(CoveringStructure { tree, left, strip_height, map: None })
    }

    pub fn to_container(&self) -> Container {
        Container { kind: Kind::Covering, sections: self.to_sections() }
    }

    pub fn from_container(c: &Container) -> Result<CoveringStructure, CodecError> {
        if c.kind != Kind::Covering {
            return Err(CodecError::BadKind(c.kind as u8));
        }
        Self::from_sections(c)
    }
}

impl Navigable for CoveringStructure {
    fn cell_count(&self) -> usize {
        self.tree.node_count() - self.strip_height - 1
    }

    fn neighbor(&self, c: usize, dir: Dir) -> Result<Option<usize>, QueryError> {
        self.check_cell(c)?;
        Ok(match dir {
            Dir::Left => self.left_raw(c),
            Dir::Right => self.right_raw(c),
            Dir::Up => self.up_raw(c),
            Dir::Down => self.down_raw(c),
        })
    }

    fn is_visible(&self, a: usize, b: usize) -> Result<bool, QueryError> {
        self.check_cell(a)?;
        self.check_cell(b)?;
        Ok(self.visible_raw(a, b))
    }

    fn handles(&self) -> Option<&HandleMap> {
        self.map.as_ref()
    }
}
