//! Polyominoes as occupancy grids, their text formats, and the brute-force
//! oracle every compact structure is checked against.
//!
//! Coordinates: x grows right, y grows up, normalized so the bounding box
//! starts at (0, 0). Disconnected cell sets and holes are fine.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate cell ({0}, {1})")]
    DuplicateCell(i64, i64),
    #[error("cell ({0}, {1}) is not occupied")]
    InvalidCell(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
    Up,
    Down,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Left, Dir::Right, Dir::Up, Dir::Down];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::Left => (-1, 0),
            Dir::Right => (1, 0),
            Dir::Up => (0, 1),
            Dir::Down => (0, -1),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
        }
    }

    pub fn parse(s: &str) -> Option<Dir> {
        Some(match s {
            "left" => Dir::Left,
            "right" => Dir::Right,
            "up" => Dir::Up,
            "down" => Dir::Down,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Coords,
    Composition,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        Some(match s {
            "ascii" => Format::Ascii,
            "coords" => Format::Coords,
            "composition" => Format::Composition,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_bar_graph: bool,
    pub height: usize,
    pub width: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polyomino {
    width: usize,
    height: usize,
    n: usize,
    /// row-major, row 0 = bottom
    occ: Vec<bool>,
}

impl std::fmt::Debug for Polyomino {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Polyomino n={} {}x{}", self.n, self.width, self.height)?;
        f.write_str(&self.to_ascii())
    }
}

fn perr(line: usize, msg: impl Into<String>) -> GridError {
    GridError::Parse { line, msg: msg.into() }
}

impl Polyomino {
    /// Normalizing constructor. Duplicates are an error; an empty set is a
    /// parse error (a polyomino has at least one cell).
    pub fn from_cells<I: IntoIterator<Item = (i64, i64)>>(cells: I) -> Result<Polyomino, GridError> {
        let cells: Vec<(i64, i64)> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(perr(0, "no cells"));
        }
        let minx = cells.iter().map(|c| c.0).min().unwrap();
        let miny = cells.iter().map(|c| c.1).min().unwrap();
        let maxx = cells.iter().map(|c| c.0).max().unwrap();
        let maxy = cells.iter().map(|c| c.1).max().unwrap();
        let width = (maxx - minx + 1) as usize;
        let height = (maxy - miny + 1) as usize;
        let mut occ = vec![false; width * height];
        for &(x, y) in &cells {
            let i = (y - miny) as usize * width + (x - minx) as usize;
            if occ[i] {
                return Err(GridError::DuplicateCell(x, y));
            }
            occ[i] = true;
        }
        Ok(Polyomino { width, height, n: cells.len(), occ })
    }

    pub fn from_composition(bars: &[usize]) -> Result<Polyomino, GridError> {
        if bars.is_empty() {
            return Err(perr(1, "empty composition"));
        }
        if bars.contains(&0) {
            return Err(perr(1, "bar sizes must be positive"));
        }
        let cells = bars.iter().enumerate().flat_map(|(x, &s)| (0..s).map(move |y| (x as i64, y as i64)));
        Polyomino::from_cells(cells)
    }

    pub fn parse(text: &str, format: Format) -> Result<Polyomino, GridError> {
        match format {
            Format::Ascii => Self::parse_ascii(text),
            Format::Coords => Self::parse_coords(text),
            Format::Composition => Self::parse_composition(text),
        }
    }

    pub fn parse_ascii(text: &str) -> Result<Polyomino, GridError> {
        let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r').trim_end()).collect();
        let first = lines.iter().position(|l| !l.is_empty());
        let last = lines.iter().rposition(|l| !l.is_empty());
        let (Some(first), Some(last)) = (first, last) else {
            return Err(perr(1, "empty input"));
        };
        let rows = &lines[first..=last];
        let mut cells = Vec::new();
        for (r, line) in rows.iter().enumerate() {
            let y = (rows.len() - 1 - r) as i64;
            for (x, ch) in line.chars().enumerate() {
                match ch {
                    '#' => cells.push((x as i64, y)),
                    '.' | ' ' => {}
                    c => return Err(perr(first + r + 1, format!("unexpected character {c:?}"))),
                }
            }
        }
        if cells.is_empty() {
            return Err(perr(first + 1, "no cells"));
        }
        Polyomino::from_cells(cells)
    }

    pub fn parse_coords(text: &str) -> Result<Polyomino, GridError> {
        let mut cells = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            if nums.len() != 2 {
                return Err(perr(i + 1, "expected \"x y\""));
            }
            let x = nums[0].parse::<i64>().map_err(|e| perr(i + 1, e.to_string()))?;
            let y = nums[1].parse::<i64>().map_err(|e| perr(i + 1, e.to_string()))?;
            cells.push((x, y));
        }
        if cells.is_empty() {
            return Err(perr(1, "empty input"));
        }
        Polyomino::from_cells(cells)
    }

    pub fn parse_composition(text: &str) -> Result<Polyomino, GridError> {
        let lines: Vec<(usize, &str)> =
            text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
        match lines.as_slice() {
            [] => Err(perr(1, "empty input")),
            [(ln, line)] => {
                let mut bars = Vec::new();
                for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                    let v = tok.parse::<usize>().map_err(|e| perr(*ln, format!("{tok:?}: {e}")))?;
                    if v == 0 {
                        return Err(perr(*ln, "bar sizes must be positive"));
                    }
                    bars.push(v);
                }
                Polyomino::from_composition(&bars).map_err(|_| perr(*ln, "empty composition"))
            }
            [_, (ln, _), ..] => Err(perr(*ln, "composition is a single line")),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.occ[y as usize * self.width + x as usize]
    }

    /// Cells bottom row first, left to right within a row.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.occ.iter().enumerate().filter(|(_, o)| **o).map(|(i, _)| ((i % self.width) as i64, (i / self.width) as i64))
    }

    /// Cells per row, top row first.
    pub fn row_counts_top_down(&self) -> Vec<usize> {
        (0..self.height).rev().map(|y| self.occ[y * self.width..(y + 1) * self.width].iter().filter(|o| **o).count()).collect()
    }

    fn require(&self, c: (i64, i64)) -> Result<(), GridError> {
        if self.contains(c.0, c.1) {
            Ok(())
        } else {
            Err(GridError::InvalidCell(c.0, c.1))
        }
    }

    pub fn oracle_neighbor(&self, c: (i64, i64), dir: Dir) -> Result<Option<(i64, i64)>, GridError> {
        self.require(c)?;
        let (dx, dy) = dir.delta();
        let m = (c.0 + dx, c.1 + dy);
        Ok(self.contains(m.0, m.1).then_some(m))
    }

    pub fn oracle_degree(&self, c: (i64, i64)) -> Result<usize, GridError> {
        self.require(c)?;
        Ok(Dir::ALL.iter().filter(|d| self.oracle_neighbor(c, **d).unwrap().is_some()).count())
    }

    pub fn oracle_adjacent(&self, a: (i64, i64), b: (i64, i64)) -> Result<bool, GridError> {
        self.require(a)?;
        self.require(b)?;
        Ok((a.0 - b.0).abs() + (a.1 - b.1).abs() == 1)
    }

    pub fn oracle_visible(&self, a: (i64, i64), b: (i64, i64)) -> Result<bool, GridError> {
        self.require(a)?;
        self.require(b)?;
        Ok(if a.1 == b.1 {
            (a.0.min(b.0)..=a.0.max(b.0)).all(|x| self.contains(x, a.1))
        } else if a.0 == b.0 {
            (a.1.min(b.1)..=a.1.max(b.1)).all(|y| self.contains(a.0, y))
        } else {
            false
        })
    }

    pub fn classify(&self) -> Classification {
        let grounded = (0..self.width).all(|x| {
            let col: Vec<bool> = (0..self.height).map(|y| self.contains(x as i64, y as i64)).collect();
            let size = col.iter().filter(|o| **o).count();
            size > 0 && col[..size].iter().all(|o| *o)
        });
        Classification { is_bar_graph: grounded, height: self.height, width: self.width }
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.cells().next() else { return true };
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some((x, y)) = stack.pop() {
            for d in Dir::ALL {
                let (dx, dy) = d.delta();
                let m = (x + dx, y + dy);
                if self.contains(m.0, m.1) && seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen.len() == self.n
    }

    /// Bar sizes left to right, if this is a bar graph.
    pub fn composition(&self) -> Option<Vec<usize>> {
        if !self.classify().is_bar_graph {
            return None;
        }
        Some((0..self.width).map(|x| (0..self.height).filter(|&y| self.contains(x as i64, y as i64)).count()).collect())
    }

    /// 90° clockwise rotation (columns become rows), renormalized.
    pub fn rotate(&self) -> Polyomino {
        Polyomino::from_cells(self.cells().map(|(x, y)| (y, -x))).unwrap()
    }

    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for y in (0..self.height).rev() {
            for x in 0..self.width {
                s.push(if self.contains(x as i64, y as i64) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    pub fn to_coords(&self) -> String {
        self.cells().map(|(x, y)| format!("{x} {y}\n")).collect()
    }

    pub fn to_composition(&self) -> Option<String> {
        let c = self.composition()?;
        Some(c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n")
    }
}

// ---- seeded generators ----

/// Connected polyomino grown by repeatedly attaching a random neighbor of a
/// random existing cell.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize) -> Polyomino {
    assert!(n >= 1);
    let mut cells = vec![(0i64, 0i64)];
    let mut set = HashSet::from([(0i64, 0i64)]);
    while cells.len() < n {
        let &(x, y) = cells.choose(rng).unwrap();
        let (dx, dy) = Dir::ALL.choose(rng).unwrap().delta();
        if set.insert((x + dx, y + dy)) {
            cells.push((x + dx, y + dy));
        }
    }
    Polyomino::from_cells(cells).unwrap()
}

/// Random subset of a `w × h` box with the given density (at least one cell).
/// Usually disconnected and holey.
pub fn random_subset<R: Rng>(rng: &mut R, w: usize, h: usize, density: f64) -> Polyomino {
    let mut cells: Vec<(i64, i64)> =
        (0..h).flat_map(|y| (0..w).map(move |x| (x as i64, y as i64))).filter(|_| rng.gen_bool(density)).collect();
    if cells.is_empty() {
        cells.push((rng.gen_range(0..w) as i64, rng.gen_range(0..h) as i64));
    }
    Polyomino::from_cells(cells).unwrap()
}

/// Uniform random composition of `n` (every gap is a cut with probability ½).
pub fn random_composition<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    random_composition_with(rng, n, 0.5)
}

/// Random composition of `n`: each of the `n − 1` gaps is a cut with probability `p`.
pub fn random_composition_with<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<usize> {
    assert!(n >= 1);
    let mut bars = vec![1];
    for _ in 1..n {
        if rng.gen_bool(p) {
            bars.push(1);
        } else {
            *bars.last_mut().unwrap() += 1;
        }
    }
    bars
}

/// A mix of connected, holey-subset and thin-strip shapes with `n ≤ max_n`.
pub fn random_mixed<R: Rng>(rng: &mut R, max_n: usize) -> Polyomino {
    match rng.gen_range(0..3) {
        0 => {
            let n = rng.gen_range(1..=max_n);
            random_connected(rng, n)
        }
        1 => {
            let side = ((max_n as f64).sqrt() as usize).max(1);
            let w = rng.gen_range(1..=side * 2).min(max_n);
            let h = rng.gen_range(1..=(max_n / w).max(1));
            let d = rng.gen_range(0.3..0.95);
            random_subset(rng, w, h, d)
        }
        _ => {
            let h = rng.gen_range(1..=8.min(max_n));
            let w = rng.gen_range(1..=(max_n / h).max(1));
            let d = rng.gen_range(0.5..1.0);
            random_subset(rng, w, h, d)
        }
    }
}

/// Random strip of fixed height with roughly `n` cells (density ~0.8).
pub fn random_strip<R: Rng>(rng: &mut R, height: usize, n: usize) -> Polyomino {
    let w = ((n as f64 / (0.8 * height as f64)).ceil() as usize).max(1);
    random_subset(rng, w, height, 0.8)
}

/// Staircase: `steps` columns of two cells each, rising one row per column.
pub fn staircase(steps: usize) -> Polyomino {
    Polyomino::from_cells((0..steps as i64).flat_map(|i| [(i, i), (i, i + 1)])).unwrap()
}
