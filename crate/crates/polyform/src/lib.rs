//! Space-efficient encodings of polyominoes and bar graphs.
//!
//! Four structures share one query vocabulary (neighbors, adjacency,
//! degree, visibility):
//!
//! * [`bfslabel::LabeledBfsTree`] — BFS tree with 2-bit direction labels (~4n bits).
//! * [`covering::CoveringStructure`] — covering tree plus left bitstring (~3n bits),
//!   for polyominoes that fit a short strip.
//! * [`sliced::SlicedStructure`] — any polyomino, cut into horizontal slices of
//!   thickness `f` and stitched with `Top`/`Bot` bitstrings.
//! * [`bars::BarGraphStructure`] — bar graphs in n + o(n) bits.
//!
//! Every structure is checked against the brute-force oracle in [`grid`].

pub mod bars;
pub mod bfslabel;
pub mod bits;
pub mod codec;
pub mod covering;
pub mod grid;
pub mod query;
pub mod report;
pub mod sliced;
pub mod treekit;

pub use bars::{BarGraphStructure, LookupTable};
pub use bfslabel::LabeledBfsTree;
pub use bits::{BitVector, Mode};
pub use codec::{Container, Kind};
pub use covering::CoveringStructure;
pub use grid::{Dir, Polyomino};
pub use query::{HandleMap, Navigable, QueryError};
pub use report::{SpaceReport, Structure};
pub use sliced::{SlicedStructure, Thickness};
pub use treekit::{OrdinalTree, TreeMode};
