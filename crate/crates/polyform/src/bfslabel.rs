//! The simple ~4n-bit adjacency structure: a BFS tree over the cells whose
//! edges carry the direction (T, B, L, R) from parent to child.
//!
//! A cell's offset from the root is the label count difference along its
//! root path (`T − B` rows up, `R − L` columns right), so two cells are
//! adjacent iff their offsets differ by one unit on one axis. No navigation
//! and no visibility: the tree shape says nothing about which neighbors
//! exist.
//!
//! Children are enqueued in the fixed order T, B, L, R, so the tree's level
//! order is the BFS visiting order. Labels are kept in preorder, 2 bits per
//! non-root node.

use crate::codec::{BitReader, BitWriter, CodecError, Container, Kind, Section};
use crate::grid::Polyomino;
use crate::query::{HandleMap, QueryError};
use crate::treekit::{OrdinalTree, TreeMode};
use std::collections::VecDeque;
use thiserror::Error;

const TAG_TREE: u8 = 1;
const TAG_LABELS: u8 = 2;
const TAG_ROOT: u8 = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BfsError {
    #[error("polyomino is disconnected; use the sliced structure instead")]
    Disconnected,
    #[error("root ({0}, {1}) is not a cell")]
    InvalidCell(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    T = 0,
    B = 1,
    L = 2,
    R = 3,
}

impl Label {
    /// BFS enqueue order.
    pub const ORDER: [Label; 4] = [Label::T, Label::B, Label::L, Label::R];

    fn from_bits(b: u64) -> Label {
        Label::ORDER[b as usize & 3]
    }

    fn delta(self) -> (i64, i64) {
        match self {
            Label::T => (0, 1),
            Label::B => (0, -1),
            Label::L => (-1, 0),
            Label::R => (1, 0),
        }
    }

    pub fn parse(c: char) -> Option<Label> {
        Some(match c {
            'T' => Label::T,
            'B' => Label::B,
            'L' => Label::L,
            'R' => Label::R,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LabeledBfsTree {
    tree: OrdinalTree,
    /// indexed by preorder id; slot 0 and the root are unused
    labels: Vec<Label>,
    root: (i64, i64),
    map: Option<HandleMap>,
    /// optional per-node (dx, dy), filled by [`LabeledBfsTree::accelerate`]
    offsets: Option<Vec<(i64, i64)>>,
}

impl LabeledBfsTree {
    pub fn build(p: &Polyomino, root: (i64, i64)) -> Result<LabeledBfsTree, BfsError> {
        Self::build_with(p, root, TreeMode::Compact)
    }

    pub fn build_with(p: &Polyomino, root: (i64, i64), mode: TreeMode) -> Result<LabeledBfsTree, BfsError> {
        if !p.contains(root.0, root.1) {
            return Err(BfsError::InvalidCell(root.0, root.1));
        }
        let (w, h) = (p.width(), p.height());
        let idx = |(x, y): (i64, i64)| y as usize * w + x as usize;
        let mut seen = vec![false; w * h];
        seen[idx(root)] = true;
        // BFS order = level order of the tree
        let mut order = vec![(root, None::<Label>)];
        let mut degrees = Vec::with_capacity(p.n());
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (c, _) = order[i];
            let mut deg = 0;
            for lab in Label::ORDER {
                let (dx, dy) = lab.delta();
                let nb = (c.0 + dx, c.1 + dy);
                if p.contains(nb.0, nb.1) && !seen[idx(nb)] {
                    seen[idx(nb)] = true;
                    queue.push_back(order.len());
                    order.push((nb, Some(lab)));
                    deg += 1;
                }
            }
            degrees.push(deg);
        }
        if order.len() != p.n() {
            return Err(BfsError::Disconnected);
        }
        let tree = OrdinalTree::build_with(&degrees, mode).expect("BFS tree is well formed");
        let mut labels = vec![Label::T; order.len() + 1];
        let mut map = HandleMap::new(order.len());
        for (i, &(c, lab)) in order.iter().enumerate() {
            let v = tree.lo_select_raw(i + 1);
            if let Some(lab) = lab {
                labels[v] = lab;
            }
            map.insert(c, v);
        }
        Ok(LabeledBfsTree { tree, labels, root, map: Some(map), offsets: None })
    }

    pub fn tree(&self) -> &OrdinalTree {
        &self.tree
    }

    pub fn root_coord(&self) -> (i64, i64) {
        self.root
    }

    pub fn handle_map(&self) -> Option<&HandleMap> {
        self.map.as_ref()
    }

    pub fn set_handle_map(&mut self, map: HandleMap) {
        self.map = Some(map);
    }

    pub fn cell_count(&self) -> usize {
        self.tree.node_count()
    }

    /// Handle of the i'th cell in BFS order (0-based).
    pub fn bfs_cell(&self, i: usize) -> Option<usize> {
        (i < self.tree.node_count()).then(|| self.tree.lo_select_raw(i + 1))
    }

    fn check(&self, c: usize) -> Result<(), QueryError> {
        if c == 0 || c > self.tree.node_count() {
            Err(QueryError::InvalidCell(c))
        } else {
            Ok(())
        }
    }

    pub fn label(&self, c: usize) -> Result<Option<Label>, QueryError> {
        self.check(c)?;
        Ok((c != 1).then(|| self.labels[c]))
    }

    /// Root-to-c label path.
    pub fn path(&self, c: usize) -> Result<Vec<Label>, QueryError> {
        self.check(c)?;
        let mut out = Vec::new();
        let mut v = c;
        while v != 1 {
            out.push(self.labels[v]);
            v = self.tree.parent_raw(v);
        }
        out.reverse();
        Ok(out)
    }

    /// Number of α-labelled nodes on the path from the root to `c`.
    pub fn depth_label(&self, c: usize, alpha: Label) -> Result<usize, QueryError> {
        Ok(self.path(c)?.into_iter().filter(|&l| l == alpha).count())
    }

    /// Store every node's offset explicitly (runtime index, not payload).
    pub fn accelerate(&mut self) {
        let n = self.tree.node_count();
        let mut off = vec![(0i64, 0i64); n + 1];
        // parents precede children in preorder
        for v in 2..=n {
            let (px, py) = off[self.tree.parent_raw(v)];
            let (dx, dy) = self.labels[v].delta();
            off[v] = (px + dx, py + dy);
        }
        self.offsets = Some(off);
    }

    /// (columns right of the root, rows above the root).
    pub fn relative_position(&self, c: usize) -> Result<(i64, i64), QueryError> {
        self.check(c)?;
        if let Some(off) = &self.offsets {
            return Ok(off[c]);
        }
        let count = |a| self.depth_label(c, a).map(|k| k as i64);
        Ok((count(Label::R)? - count(Label::L)?, count(Label::T)? - count(Label::B)?))
    }

    /// (v_d, h_d): row and column difference of `a` relative to `b`.
    pub fn offset(&self, a: usize, b: usize) -> Result<(i64, i64), QueryError> {
        let (ax, ay) = self.relative_position(a)?;
        let (bx, by) = self.relative_position(b)?;
        Ok((ay - by, ax - bx))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> Result<bool, QueryError> {
        let (v, h) = self.offset(a, b)?;
        Ok(v.abs() + h.abs() == 1)
    }

    pub fn label_bits(&self) -> usize {
        2 * (self.tree.node_count() - 1)
    }

    pub fn payload_bits(&self) -> usize {
        self.to_sections().iter().map(|s| s.bit_len as usize).sum()
    }

    pub fn index_bits(&self) -> usize {
        self.tree.index_bits() + self.offsets.as_ref().map_or(0, |o| o.len() * 128)
    }

    fn to_sections(&self) -> Vec<Section> {
        let mut w = BitWriter::new();
        for v in 2..=self.tree.node_count() {
            w.push_bits(self.labels[v] as u64, 2);
        }
        let mut r = BitWriter::new();
        r.push_u64_le(self.root.0 as u64);
        r.push_u64_le(self.root.1 as u64);
        vec![self.tree.to_section(TAG_TREE), w.into_section(TAG_LABELS), r.into_section(TAG_ROOT)]
    }

    pub fn to_container(&self) -> Container {
        Container { kind: Kind::Bfs, sections: self.to_sections() }
    }

    pub fn from_container(c: &Container) -> Result<LabeledBfsTree, CodecError> {
        if c.kind != Kind::Bfs {
            return Err(CodecError::BadKind(c.kind as u8));
        }
        let tree = OrdinalTree::from_section(c.section(TAG_TREE)?, TreeMode::Compact)?;
        let ls = c.section(TAG_LABELS)?;
        let n = tree.node_count();
        if ls.bit_len as usize != 2 * (n - 1) {
            return Err(CodecError::Malformed { tag: TAG_LABELS, why: "label count != n - 1".into() });
        }
        let mut r = BitReader::new(ls);
        let mut labels = vec![Label::T; n + 1];
        for slot in labels.iter_mut().skip(2) {
            *slot = Label::from_bits(r.bits(2)?);
        }
        let mut r = BitReader::new(c.section(TAG_ROOT)?);
        let root = (r.u64_le()? as i64, r.u64_le()? as i64);
        Ok(LabeledBfsTree { tree, labels, root, map: None, offsets: None })
    }
}
