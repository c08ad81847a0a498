//! Space accounting and a kind-erased wrapper over the four structures.

use crate::bars::BarGraphStructure;
use crate::bfslabel::LabeledBfsTree;
use crate::codec::{CodecError, Container, Kind};
use crate::covering::CoveringStructure;
use crate::query::HandleMap;
use crate::sliced::SlicedStructure;

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceReport {
    pub kind: Kind,
    pub n: usize,
    /// sum of `sections`
    pub payload_bits: usize,
    pub bits_per_cell: f64,
    /// (name, bits) per stored component
    pub sections: Vec<(String, usize)>,
    /// rank/select directories and tree translation arrays rebuilt on load
    pub runtime_index_bits: usize,
}

impl SpaceReport {
    fn new(kind: Kind, n: usize, sections: Vec<(String, usize)>, runtime_index_bits: usize) -> SpaceReport {
        let payload_bits = sections.iter().map(|s| s.1).sum();
        SpaceReport { kind, n, payload_bits, bits_per_cell: payload_bits as f64 / n as f64, sections, runtime_index_bits }
    }
}

fn named(c: &Container, names: &[(u8, &str)]) -> Vec<(String, usize)> {
    c.sections
        .iter()
        .map(|s| {
            let name = names.iter().find(|(t, _)| *t == s.tag).map_or("?", |(_, n)| n);
            (name.to_string(), s.bit_len as usize)
        })
        .collect()
}

const COVERING_NAMES: [(u8, &str); 3] = [(1, "tree"), (2, "left"), (3, "strip_height")];

#[derive(Clone, Debug)]
pub enum Structure {
    Bfs(LabeledBfsTree),
    Covering(CoveringStructure),
    Sliced(SlicedStructure),
    Bars(BarGraphStructure),
}

impl Structure {
    pub fn kind(&self) -> Kind {
        match self {
            Structure::Bfs(_) => Kind::Bfs,
            Structure::Covering(_) => Kind::Covering,
            Structure::Sliced(_) => Kind::Sliced,
            Structure::Bars(_) => Kind::Bars,
        }
    }

    pub fn cell_count(&self) -> usize {
        use crate::query::Navigable;
        match self {
            Structure::Bfs(s) => s.cell_count(),
            Structure::Covering(s) => s.cell_count(),
            Structure::Sliced(s) => s.cell_count(),
            Structure::Bars(s) => s.cell_count(),
        }
    }

    pub fn to_container(&self) -> Container {
        match self {
            Structure::Bfs(s) => s.to_container(),
            Structure::Covering(s) => s.to_container(),
            Structure::Sliced(s) => s.to_container(),
            Structure::Bars(s) => s.to_container(),
        }
    }

    pub fn from_container(c: &Container) -> Result<Structure, CodecError> {
        Ok(match c.kind {
            Kind::Bfs => Structure::Bfs(LabeledBfsTree::from_container(c)?),
            Kind::Covering => Structure::Covering(CoveringStructure::from_container(c)?),
            Kind::Sliced => Structure::Sliced(SlicedStructure::from_container(c)?),
            Kind::Bars => Structure::Bars(BarGraphStructure::from_container(c)?),
        })
    }

    pub fn handle_map(&self) -> Option<HandleMap> {
        use crate::query::Navigable;
        match self {
            Structure::Bfs(s) => s.handle_map().cloned(),
            Structure::Covering(s) => s.handles().cloned(),
            Structure::Sliced(s) => s.handles().cloned(),
            Structure::Bars(s) => Some(crate::bars::handle_map(&s.composition())),
        }
    }

    pub fn set_handle_map(&mut self, map: HandleMap) {
        match self {
            Structure::Bfs(s) => s.set_handle_map(map),
            Structure::Covering(s) => s.set_handle_map(map),
            Structure::Sliced(s) => s.set_handle_map(map),
            Structure::Bars(_) => {}
        }
    }

    pub fn space_report(&self) -> SpaceReport {
        let c = self.to_container();
        let n = self.cell_count();
        match self {
            Structure::Bfs(s) => {
                SpaceReport::new(Kind::Bfs, n, named(&c, &[(1, "tree"), (2, "labels"), (3, "root")]), s.index_bits())
            }
            Structure::Covering(s) => SpaceReport::new(Kind::Covering, n, named(&c, &COVERING_NAMES), s.index_bits()),
            Structure::Sliced(s) => {
                let mut names = COVERING_NAMES.to_vec();
                names.extend([
                    (4, "top"),
                    (5, "bot"),
                    (6, "f"),
                    (7, "i_star"),
                    (8, "first_top"),
                    (9, "first_bot"),
                    (10, "slice_count"),
                ]);
                SpaceReport::new(Kind::Sliced, n, named(&c, &names), s.index_bits())
            }
            Structure::Bars(s) => {
                let mut sections = named(&c, &[(1, "S"), (2, "B"), (3, "k"), (4, "ctree")]);
                // not serialized (rebuilt from k) but part of the structure's space
                sections.push(("lookup_table".into(), s.table().bits()));
                SpaceReport::new(Kind::Bars, n, sections, s.index_bits())
            }
        }
    }
}
