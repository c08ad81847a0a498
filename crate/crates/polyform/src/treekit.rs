//! Ordinal trees built from level-order degree sequences.
//!
//! Node ids handed to callers are 1-based preorder ids; level-order indices
//! (also 1-based) only appear through the translation operations.
//!
//! Two modes answer identically:
//!
//! * [`TreeMode::Reference`] keeps explicit arrays (parent, depth, children,
//!   both permutations). It is the baseline the compact mode is tested against.
//! * [`TreeMode::Compact`] stores the shape as a LOUDS bitstring (for each node
//!   in level order, `degree` ones then a zero — `2n − 1` bits) with rank/select,
//!   marks level starts in a sparse bitvector, and translates between preorder
//!   and level order with two `u32` permutation arrays. The translation arrays
//!   dominate the runtime index (64 bits per node); they are never serialized.
//!
//! `ancestor_at_level` in compact mode is a binary search over the target
//! level: within a level preorder and level order agree, and the ancestor of
//! `v` at level `ℓ` is the last level-`ℓ` node whose preorder id is `≤ v`.

use crate::bits::{BitVector, Mode};
use crate::codec::{CodecError, Section};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("degree sequence does not describe a single rooted tree")]
    MalformedDegrees,
    #[error("invalid node {0}")]
    InvalidNode(usize),
    #[error("level {level} is deeper than node depth {depth}")]
    InvalidLevel { level: usize, depth: usize },
    #[error("invalid level-order index {0}")]
    InvalidIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMode {
    Reference,
    Compact,
}

#[derive(Clone, Debug)]
pub struct OrdinalTree {
    n: usize,
    /// index 0 unused
    pre_to_lo: Vec<u32>,
    lo_to_pre: Vec<u32>,
    inner: Inner,
}

#[derive(Clone, Debug)]
enum Inner {
    Reference(RefTree),
    Compact(CompactTree),
}

#[derive(Clone, Debug)]
struct RefTree {
    /// all indexed by preorder id; 0 = none
    parent: Vec<u32>,
    depth: Vec<u32>,
    /// level-order index of the first child, and the child count
    first_child_lo: Vec<u32>,
    degree: Vec<u32>,
    /// level-order index of the first node of each level, plus n + 1
    level_start: Vec<u32>,
    degrees_lo: Vec<u32>,
}

#[derive(Clone, Debug)]
struct CompactTree {
    louds: BitVector,
    /// level-order positions starting a level
    levels: BitVector,
    /// the same positions as an array, plus n + 1
    starts: Vec<u32>,
}

impl CompactTree {
    #[inline]
    fn start(&self, w: usize) -> usize {
        if w == 1 {
            1
        } else {
            self.louds.select0(w - 1).unwrap() + 1
        }
    }

    #[inline]
    fn degree(&self, w: usize) -> usize {
        self.louds.select0(w).unwrap() - self.start(w)
    }

    #[inline]
    fn child(&self, w: usize, i: usize) -> Option<usize> {
        let s = self.start(w);
        let end = self.louds.select0(w).unwrap();
        if i == 0 || s + i - 1 >= end {
            return None;
        }
        Some(s - w + i + 1)
    }

    #[inline]
    fn parent(&self, w: usize) -> Option<usize> {
        if w == 1 {
            return None;
        }
        let p = self.louds.select1(w - 1).unwrap();
        Some(p + 2 - w)
    }

    #[inline]
    fn depth(&self, w: usize) -> usize {
        self.levels.rank1(w) - 1
    }

    fn level_count(&self) -> usize {
        self.starts.len() - 1
    }
}

impl OrdinalTree {
    pub fn build(degrees: &[usize]) -> Result<OrdinalTree, TreeError> {
        Self::build_with(degrees, TreeMode::Compact)
    }

    pub fn build_with(degrees: &[usize], mode: TreeMode) -> Result<OrdinalTree, TreeError> {
        let n = degrees.len();
        if n == 0 || n > u32::MAX as usize - 1 {
            return Err(TreeError::MalformedDegrees);
        }
        let mut created = 1usize;
        for (w, &d) in degrees.iter().enumerate() {
            if w >= created {
                return Err(TreeError::MalformedDegrees);
            }
            created = created.checked_add(d).ok_or(TreeError::MalformedDegrees)?;
        }
        if created != n {
            return Err(TreeError::MalformedDegrees);
        }

        // level-order (0-based) first child and depth
        let mut first = vec![0u32; n];
        let mut depth_lo = vec![0u32; n];
        let mut next = 1usize;
        for w in 0..n {
            first[w] = next as u32;
            for c in next..next + degrees[w] {
                depth_lo[c] = depth_lo[w] + 1;
            }
            next += degrees[w];
        }

        let mut pre_to_lo = vec![0u32; n + 1];
        let mut lo_to_pre = vec![0u32; n + 1];
        let mut stack = vec![0usize];
        let mut id = 0;
        while let Some(w) = stack.pop() {
            id += 1;
            pre_to_lo[id] = w as u32 + 1;
            lo_to_pre[w + 1] = id as u32;
            let f = first[w] as usize;
            for c in (f..f + degrees[w]).rev() {
                stack.push(c);
            }
        }

        let mut level_start = Vec::new();
        for w in 0..n {
            if w == 0 || depth_lo[w] != depth_lo[w - 1] {
                level_start.push(w as u32 + 1);
            }
        }

        let inner = match mode {
            TreeMode::Reference => {
                let mut parent = vec![0u32; n + 1];
                let mut depth = vec![0u32; n + 1];
                let mut first_child_lo = vec![0u32; n + 1];
                let mut degree = vec![0u32; n + 1];
                for w in 0..n {
                    let v = lo_to_pre[w + 1] as usize;
                    depth[v] = depth_lo[w];
                    degree[v] = degrees[w] as u32;
                    first_child_lo[v] = first[w] + 1;
                    let f = first[w] as usize;
                    for c in f..f + degrees[w] {
                        parent[lo_to_pre[c + 1] as usize] = v as u32;
                    }
                }
                let mut ls = level_start.clone();
                ls.push(n as u32 + 1);
                Inner::Reference(RefTree {
                    parent,
                    depth,
                    first_child_lo,
                    degree,
                    level_start: ls,
                    degrees_lo: degrees.iter().map(|&d| d as u32).collect(),
                })
            }
            TreeMode::Compact => {
                let mut ones = Vec::with_capacity(n);
                let mut pos = 0;
                for &d in degrees {
                    for _ in 0..d {
                        pos += 1;
                        ones.push(pos);
                    }
                    pos += 1;
                }
                let louds = BitVector::from_ones(2 * n - 1, &ones, Mode::Plain);
                let ls: Vec<usize> = level_start.iter().map(|&s| s as usize).collect();
                let levels = BitVector::from_ones(n, &ls, Mode::Plain);
                let mut starts = level_start;
                starts.push(n as u32 + 1);
                Inner::Compact(CompactTree { louds, levels, starts })
            }
        };
        Ok(OrdinalTree { n, pre_to_lo, lo_to_pre, inner })
    }

    /// Build from a parent array over preorder ids (`parents[0]` is the root's
    /// entry and ignored; `parents[v-1]` is the parent of `v`). The ids must
    /// already be a preorder numbering with children in increasing id order.
    pub fn from_preorder_parents(parents: &[usize], mode: TreeMode) -> Result<OrdinalTree, TreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::MalformedDegrees);
        }
        let mut children = vec![Vec::new(); n + 1];
        for v in 2..=n {
            let p = parents[v - 1];
            if p == 0 || p >= v {
                return Err(TreeError::MalformedDegrees);
            }
            children[p].push(v);
        }
        let mut degrees = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::from([1usize]);
        while let Some(v) = queue.pop_front() {
            degrees.push(children[v].len());
            queue.extend(children[v].iter().copied());
        }
        let t = Self::build_with(&degrees, mode)?;
        // the rebuilt preorder numbering must coincide with the given ids
        for v in 2..=n {
            if t.parent_raw(v) != parents[v - 1] {
                return Err(TreeError::MalformedDegrees);
            }
        }
        Ok(t)
    }

    pub fn mode(&self) -> TreeMode {
        match self.inner {
            Inner::Reference(_) => TreeMode::Reference,
            Inner::Compact(_) => TreeMode::Compact,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn level_count(&self) -> usize {
        match &self.inner {
            Inner::Reference(r) => r.level_start.len() - 1,
            Inner::Compact(c) => c.level_count(),
        }
    }

    fn check(&self, v: usize) -> Result<(), TreeError> {
        if v == 0 || v > self.n {
            Err(TreeError::InvalidNode(v))
        } else {
            Ok(())
        }
    }

    // ---- unchecked core (ids assumed valid); 0 means "none" where noted ----

    #[inline]
    pub(crate) fn lo_rank_raw(&self, v: usize) -> usize {
        self.pre_to_lo[v] as usize
    }

    #[inline]
    pub(crate) fn lo_select_raw(&self, w: usize) -> usize {
        self.lo_to_pre[w] as usize
    }

    /// 0 for the root
    #[inline]
    pub(crate) fn parent_raw(&self, v: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => r.parent[v] as usize,
            Inner::Compact(c) => c.parent(self.lo_rank_raw(v)).map_or(0, |p| self.lo_select_raw(p)),
        }
    }

    /// 0 when `i` exceeds the degree
    #[inline]
    pub(crate) fn child_raw(&self, v: usize, i: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => {
                if i == 0 || i > r.degree[v] as usize {
                    0
                } else {
                    self.lo_select_raw(r.first_child_lo[v] as usize + i - 1)
                }
            }
            Inner::Compact(c) => c.child(self.lo_rank_raw(v), i).map_or(0, |w| self.lo_select_raw(w)),
        }
    }

    #[inline]
    pub(crate) fn degree_raw(&self, v: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => r.degree[v] as usize,
            Inner::Compact(c) => c.degree(self.lo_rank_raw(v)),
        }
    }

    #[inline]
    pub(crate) fn depth_raw(&self, v: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => r.depth[v] as usize,
            Inner::Compact(c) => c.depth(self.lo_rank_raw(v)),
        }
    }

    /// level-order index of the first node at level `l`, and one past the last
    #[inline]
    fn level_range(&self, l: usize) -> Option<(usize, usize)> {
        match &self.inner {
            Inner::Reference(r) => {
                if l + 1 >= r.level_start.len() {
                    None
                } else {
                    Some((r.level_start[l] as usize, r.level_start[l + 1] as usize))
                }
            }
            Inner::Compact(c) => {
                if l + 1 >= c.starts.len() {
                    None
                } else {
                    Some((c.starts[l] as usize, c.starts[l + 1] as usize))
                }
            }
        }
    }

    #[inline]
    pub(crate) fn level_rank_raw(&self, v: usize) -> usize {
        let w = self.lo_rank_raw(v);
        let (s, _) = self.level_range(self.depth_raw(v)).unwrap();
        w - s
    }

    /// `v` is the first node of its level (level rank 0).
    #[inline]
    pub(crate) fn is_level_first_raw(&self, v: usize) -> bool {
        let w = self.lo_rank_raw(v);
        match &self.inner {
            Inner::Reference(r) => r.level_start[r.depth[v] as usize] as usize == w,
            Inner::Compact(c) => c.levels.get(w),
        }
    }

    /// 0 when the level has fewer than `i` nodes
    #[inline]
    pub(crate) fn level_select_raw(&self, l: usize, i: usize) -> usize {
        match self.level_range(l) {
            Some((s, e)) if i >= 1 && s + i - 1 < e => self.lo_select_raw(s + i - 1),
            _ => 0,
        }
    }

    pub(crate) fn ancestor_raw(&self, v: usize, l: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => {
                let mut u = v;
                while r.depth[u] as usize > l {
                    u = r.parent[u] as usize;
                }
                u
            }
            Inner::Compact(_) => {
                let (s, e) = self.level_range(l).unwrap();
                let k = self.lo_to_pre[s..e].partition_point(|&p| p as usize <= v);
                self.lo_to_pre[s + k - 1] as usize
            }
        }
    }

    pub(crate) fn lca_raw(&self, u: usize, v: usize) -> usize {
        match &self.inner {
            Inner::Reference(r) => {
                let (mut a, mut b) = (u, v);
                while r.depth[a] > r.depth[b] {
                    a = r.parent[a] as usize;
                }
                while r.depth[b] > r.depth[a] {
                    b = r.parent[b] as usize;
                }
                while a != b {
                    a = r.parent[a] as usize;
                    b = r.parent[b] as usize;
                }
                a
            }
            Inner::Compact(_) => {
                let d = self.depth_raw(u).min(self.depth_raw(v));
                let (a, b) = (self.ancestor_raw(u, d), self.ancestor_raw(v, d));
                if a == b {
                    return a;
                }
                // deepest level < d where the ancestors meet
                let (mut lo, mut hi) = (0, d - 1);
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if self.ancestor_raw(a, mid) == self.ancestor_raw(b, mid) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                self.ancestor_raw(a, lo)
            }
        }
    }

    // ---- checked public operations ----

    pub fn parent(&self, v: usize) -> Result<Option<usize>, TreeError> {
        self.check(v)?;
        Ok(Some(self.parent_raw(v)).filter(|&p| p != 0))
    }

    pub fn child(&self, v: usize, i: usize) -> Result<Option<usize>, TreeError> {
        self.check(v)?;
        Ok(Some(self.child_raw(v, i)).filter(|&c| c != 0))
    }

    pub fn degree(&self, v: usize) -> Result<usize, TreeError> {
        self.check(v)?;
        Ok(self.degree_raw(v))
    }

    pub fn depth(&self, v: usize) -> Result<usize, TreeError> {
        self.check(v)?;
        Ok(self.depth_raw(v))
    }

    pub fn ancestor_at_level(&self, v: usize, level: usize) -> Result<usize, TreeError> {
        self.check(v)?;
        let depth = self.depth_raw(v);
        if level > depth {
            return Err(TreeError::InvalidLevel { level, depth });
        }
        Ok(self.ancestor_raw(v, level))
    }

    pub fn level_order_rank(&self, v: usize) -> Result<usize, TreeError> {
        self.check(v)?;
        Ok(self.lo_rank_raw(v))
    }

    pub fn level_order_select(&self, w: usize) -> Result<usize, TreeError> {
        if w == 0 || w > self.n {
            return Err(TreeError::InvalidIndex(w));
        }
        Ok(self.lo_select_raw(w))
    }

    /// Nodes at the same level as `v` that precede it.
    pub fn level_rank(&self, v: usize) -> Result<usize, TreeError> {
        self.check(v)?;
        Ok(self.level_rank_raw(v))
    }

    /// The `i`-th node (1-based) at level `level`, or `None`.
    pub fn level_select(&self, level: usize, i: usize) -> Option<usize> {
        Some(self.level_select_raw(level, i)).filter(|&v| v != 0)
    }

    pub fn level_pred(&self, v: usize) -> Result<Option<usize>, TreeError> {
        self.check(v)?;
        if self.level_rank_raw(v) == 0 {
            return Ok(None);
        }
        Ok(Some(self.lo_select_raw(self.lo_rank_raw(v) - 1)))
    }

    pub fn level_succ(&self, v: usize) -> Result<Option<usize>, TreeError> {
        self.check(v)?;
        let w = self.lo_rank_raw(v);
        let (_, e) = self.level_range(self.depth_raw(v)).unwrap();
        Ok(if w + 1 < e { Some(self.lo_select_raw(w + 1)) } else { None })
    }

    pub fn lca(&self, u: usize, v: usize) -> Result<usize, TreeError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.lca_raw(u, v))
    }

    /// Level-order degree sequence (the build input).
    pub fn degrees(&self) -> Vec<usize> {
        match &self.inner {
            Inner::Reference(r) => r.degrees_lo.iter().map(|&d| d as usize).collect(),
            Inner::Compact(c) => (1..=self.n).map(|w| c.degree(w)).collect(),
        }
    }

    /// Stored shape: `2n − 1` bits.
    pub fn payload_bits(&self) -> usize {
        2 * self.n - 1
    }

    pub fn index_bits(&self) -> usize {
        let translation = 2 * 32 * (self.n + 1);
        match &self.inner {
            Inner::Reference(r) => {
                translation + 32 * (r.parent.len() * 4 + r.level_start.len() + r.degrees_lo.len())
            }
            Inner::Compact(c) => {
                translation
                    + c.louds.index_bits()
                    + c.levels.payload_bits()
                    + c.levels.index_bits()
                    + 32 * c.starts.len()
            }
        }
    }

    pub fn total_bits(&self) -> usize {
        self.payload_bits() + self.index_bits()
    }

    pub fn shape_bits(&self) -> BitVector {
        let mut ones = Vec::with_capacity(self.n);
        let mut pos = 0;
        for d in self.degrees() {
            for _ in 0..d {
                pos += 1;
                ones.push(pos);
            }
            pos += 1;
        }
        BitVector::from_ones(2 * self.n - 1, &ones, Mode::Plain)
    }

    pub fn to_section(&self, tag: u8) -> Section {
        self.shape_bits().to_section(tag)
    }

    pub fn from_section(s: &Section, mode: TreeMode) -> Result<OrdinalTree, CodecError> {
        let bits = BitVector::from_section(s)?;
        let mut degrees = Vec::new();
        let mut d = 0;
        for b in bits.iter() {
            if b {
                d += 1;
            } else {
                degrees.push(d);
                d = 0;
            }
        }
        if d != 0 {
            return Err(CodecError::Malformed { tag: s.tag, why: "shape ends inside a node".into() });
        }
        OrdinalTree::build_with(&degrees, mode).map_err(|e| CodecError::Malformed { tag: s.tag, why: e.to_string() })
    }
}
