//! Shared query vocabulary: cell handles, the [`Navigable`] trait, and the
//! oracle comparison harness.

use crate::grid::{Dir, Polyomino};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("invalid cell handle {0}")]
    InvalidCell(usize),
    #[error("cell ({0}, {1}) is not part of the structure")]
    UnknownCoord(i64, i64),
    #[error("operation not supported by this structure")]
    Unsupported,
}

/// Coordinate ↔ handle mapping emitted at build time. It is a build artifact
/// (the `--emit-map` sidecar), not part of any payload.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HandleMap {
    coords: Vec<Option<(i64, i64)>>,
    index: HashMap<(i64, i64), usize>,
}

impl HandleMap {
    pub fn new(max_handle: usize) -> Self {
        HandleMap { coords: vec![None; max_handle + 1], index: HashMap::new() }
    }

    pub fn insert(&mut self, coord: (i64, i64), handle: usize) {
        if handle >= self.coords.len() {
            self.coords.resize(handle + 1, None);
        }
        self.coords[handle] = Some(coord);
        self.index.insert(coord, handle);
    }

    pub fn handle(&self, coord: (i64, i64)) -> Option<usize> {
        self.index.get(&coord).copied()
    }

    pub fn coord(&self, handle: usize) -> Option<(i64, i64)> {
        self.coords.get(handle).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Sidecar text: one `x y id` line per cell, in handle order.
    pub fn to_sidecar(&self) -> String {
        let mut s = String::new();
        for (h, c) in self.coords.iter().enumerate() {
            if let Some((x, y)) = c {
                s.push_str(&format!("{x} {y} {h}\n"));
            }
        }
        s
    }

    pub fn from_sidecar(text: &str) -> Option<HandleMap> {
        let mut m = HandleMap::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let v: Vec<i64> = line.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
            if v.len() != 3 || v[2] < 0 {
                return None;
            }
            m.insert((v[0], v[1]), v[2] as usize);
        }
        Some(m)
    }
}

/// Navigation and visibility over structure-local handles.
pub trait Navigable {
    fn cell_count(&self) -> usize;
    fn neighbor(&self, h: usize, dir: Dir) -> Result<Option<usize>, QueryError>;
    fn is_visible(&self, a: usize, b: usize) -> Result<bool, QueryError>;
    fn handles(&self) -> Option<&HandleMap>;

    fn degree(&self, h: usize) -> Result<usize, QueryError> {
        let mut d = 0;
        for dir in Dir::ALL {
            d += self.neighbor(h, dir)?.is_some() as usize;
        }
        Ok(d)
    }

    /// `b` is one of `a`'s four neighbors.
    fn adjacent(&self, a: usize, b: usize) -> Result<bool, QueryError> {
        self.neighbor(b, Dir::Left)?;
        for dir in Dir::ALL {
            if self.neighbor(a, dir)? == Some(b) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub query: String,
    pub expected: String,
    pub got: String,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: expected {}, got {}", self.query, self.expected, self.got)
    }
}

/// Compare every neighbor/degree query and the visibility and adjacency of
/// the given pairs (all pairs when `pairs` is `None`) with the grid oracle.
pub fn check_against_oracle<S: Navigable + ?Sized>(
    p: &Polyomino,
    s: &S,
    pairs: Option<&[((i64, i64), (i64, i64))]>,
) -> Result<usize, Mismatch> {
    let map = s.handles().expect("oracle comparison needs the handle map");
    let cells: Vec<(i64, i64)> = p.cells().collect();
    let h = |c: (i64, i64)| map.handle(c).expect("every cell has a handle");
    let mut checked = 0;
    let mism = |q: String, e: String, g: String| Mismatch { query: q, expected: e, got: g };
    for &c in &cells {
        for dir in Dir::ALL {
            let want = p.oracle_neighbor(c, dir).unwrap();
            let got = s.neighbor(h(c), dir).map(|o| o.map(|g| map.coord(g)));
            if got != Ok(want.map(Some)) {
                return Err(mism(format!("{dir:?}{c:?}"), format!("{want:?}"), format!("{got:?}")));
            }
            checked += 1;
        }
        let d = p.oracle_degree(c).unwrap();
        if s.degree(h(c)) != Ok(d) {
            return Err(mism(format!("deg{c:?}"), d.to_string(), format!("{:?}", s.degree(h(c)))));
        }
        checked += 1;
    }
    let mut one = |a: (i64, i64), b: (i64, i64)| -> Result<(), Mismatch> {
        let want = p.oracle_visible(a, b).unwrap();
        let got = s.is_visible(h(a), h(b));
        if got != Ok(want) {
            return Err(mism(format!("vis{a:?}{b:?}"), want.to_string(), format!("{got:?}")));
        }
        let want = p.oracle_adjacent(a, b).unwrap();
        let got = s.adjacent(h(a), h(b));
        if got != Ok(want) {
            return Err(mism(format!("adj{a:?}{b:?}"), want.to_string(), format!("{got:?}")));
        }
        checked += 2;
        Ok(())
    };
    match pairs {
        Some(ps) => {
            for &(a, b) in ps {
                one(a, b)?;
            }
        }
        None => {
            for &a in &cells {
                for &b in &cells {
                    one(a, b)?;
                }
            }
        }
    }
    Ok(checked)
}
