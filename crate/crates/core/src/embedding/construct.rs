use std::collections::BTreeMap;

use super::{check_family, realize_edge, Chain, EmbeddingMap};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeSpec, Site};
use crate::topology::{Family, HardwareGraph, QubitId, Shape, Side};

/// Largest side of a cube that fits a Chimera graph with four-qubit chains.
pub const CHIMERA_MAX_SIDE: u32 = 8;
/// Number of z-layers available on Pegasus with two-qubit chains.
pub const PEGASUS_MAX_LAYERS: u32 = 12;

/// Column and row offsets `(a, b)` of the z-layers on Pegasus.
///
/// Site `(x, y, z)` uses the vertical qubit in column `12x + a` (segment `y`)
/// and the horizontal qubit in row `12y + b` (segment `x`). The offsets hit
/// every track residue once, each pair crosses, and consecutive layers cross
/// each other in both directions, which gives the two z couplers.
pub const PEGASUS_LAYERS: [(u32, u32); 12] = [
    (2, 4),
    (3, 5),
    (12, 6),
    (8, 7),
    (9, 12),
    (6, 13),
    (7, 14),
    (10, 15),
    (11, 8),
    (13, 10),
    (16, 11),
    (17, 21),
];

pub(crate) fn chimera_chain(bx: u32, by: u32, h_vert: u32, h_horiz: u32, k: u32) -> Vec<QubitId> {
    let c = 2 * by + h_vert;
    let r = 2 * bx + h_horiz;
    vec![
        QubitId::chimera(2 * bx, c, Side::Vertical, k),
        QubitId::chimera(2 * bx + 1, c, Side::Vertical, k),
        QubitId::chimera(r, 2 * by, Side::Horizontal, k),
        QubitId::chimera(r, 2 * by + 1, Side::Horizontal, k),
    ]
}

pub(crate) fn pegasus_chain(x: u32, y: u32, layer: u32) -> Vec<QubitId> {
    let (a, b) = PEGASUS_LAYERS[layer as usize];
    let col = 12 * x + a;
    let row = 12 * y + b;
    vec![
        QubitId::pegasus(0, col / 12, col % 12, y),
        QubitId::pegasus(1, row / 12, row % 12, x),
    ]
}

fn assemble(spec: LatticeSpec, shape: Shape, chain_of: impl Fn(&Site) -> Vec<QubitId>) -> EmbeddingMap {
    let has = |a: &QubitId, b: &QubitId| shape.has_coupler(a, b);
    let lattice = build_lattice(spec);
    let chains: BTreeMap<Site, Chain> = lattice
        .sites()
        .iter()
        .map(|s| (*s, Chain::induced(*s, chain_of(s), has)))
        .collect();
    let edges = lattice
        .edges()
        .iter()
        .map(|e| {
            let m = realize_edge(&chains[&e.a].qubits, &chains[&e.b].qubits, e.axis, has)
                .expect("canonical chains realise every bond");
            (*e, m)
        })
        .collect();
    EmbeddingMap {
        shape,
        spec,
        chains,
        edges,
    }
}

/// Four-qubit chains on a Chimera graph with shore 4, one 2×2 block of unit
/// cells per `(x, y)` column of the lattice.
///
/// Site `(x, y, z)` with `h = z / 4` and `k = z % 4` takes the vertical qubits
/// on track `k` of column `2y + h` in rows `2x, 2x + 1` and the horizontal
/// qubits on track `k` of row `2x + h` in columns `2y, 2y + 1`. The two chain
/// geometries (`h = 0, 1`) alternate along z.
pub fn embed_cubic_chimera(spec: LatticeSpec, graph: &HardwareGraph) -> Result<EmbeddingMap> {
    embed_cubic_chimera_at(spec, graph, (0, 0))
}

/// Like [`embed_cubic_chimera`] with the lattice shifted by `origin` blocks.
pub fn embed_cubic_chimera_at(spec: LatticeSpec, graph: &HardwareGraph, origin: (u32, u32)) -> Result<EmbeddingMap> {
    check_family(graph, Family::Chimera)?;
    let Shape::Chimera { rows, cols, shore } = graph.shape() else {
        unreachable!()
    };
    if shore != 4 {
        return Err(Error::CapacityExceeded(format!(
            "four-qubit chains need shore 4, graph has {shore}"
        )));
    }
    if spec.sides().iter().any(|&l| l > CHIMERA_MAX_SIDE) {
        return Err(Error::CapacityExceeded(format!(
            "{spec} has a side above {CHIMERA_MAX_SIDE}"
        )));
    }
    if 2 * (spec.l1 + origin.0) > rows || 2 * (spec.l2 + origin.1) > cols {
        return Err(Error::CapacityExceeded(format!(
            "{spec} at block {origin:?} needs {}x{} cells, graph has {rows}x{cols}",
            2 * (spec.l1 + origin.0),
            2 * (spec.l2 + origin.1)
        )));
    }
    Ok(assemble(spec, graph.shape(), |s| {
        let h = s.z / 4;
        chimera_chain(s.x + origin.0, s.y + origin.1, h, h, s.z % 4)
    }))
}

/// Two-qubit chains on Pegasus: one vertical and one horizontal qubit that
/// cross, per [`PEGASUS_LAYERS`]. x bonds follow horizontal qubits, y bonds
/// follow vertical qubits and z bonds use the two crossings between layers.
pub fn embed_cubic_pegasus(spec: LatticeSpec, graph: &HardwareGraph) -> Result<EmbeddingMap> {
    embed_cubic_pegasus_at(spec, graph, (0, 0))
}

/// Like [`embed_cubic_pegasus`] with the lattice shifted by `origin` tiles.
pub fn embed_cubic_pegasus_at(spec: LatticeSpec, graph: &HardwareGraph, origin: (u32, u32)) -> Result<EmbeddingMap> {
    check_family(graph, Family::Pegasus)?;
    let Shape::Pegasus { m } = graph.shape() else {
        unreachable!()
    };
    if spec.l3 > PEGASUS_MAX_LAYERS {
        return Err(Error::CapacityExceeded(format!(
            "{spec}: at most {PEGASUS_MAX_LAYERS} z-layers fit"
        )));
    }
    if spec.l1 + origin.0 > m - 1 || spec.l2 + origin.1 > m - 1 {
        return Err(Error::CapacityExceeded(format!(
            "{spec} at tile {origin:?} exceeds the {}x{} site grid of pegasus({m})",
            m - 1,
            m - 1
        )));
    }
    Ok(assemble(spec, graph.shape(), |s| {
        pegasus_chain(s.x + origin.0, s.y + origin.1, s.z)
    }))
}

/// Canonical embedding for the family of `graph`.
pub fn embed_cubic_at(spec: LatticeSpec, graph: &HardwareGraph, origin: (u32, u32)) -> Result<EmbeddingMap> {
    match graph.family() {
        Family::Chimera => embed_cubic_chimera_at(spec, graph, origin),
        Family::Pegasus => embed_cubic_pegasus_at(spec, graph, origin),
    }
}

/// All origins at which `spec` fits on `shape`, in row-major order. Empty
/// when the lattice does not fit anywhere.
pub fn cube_origins(spec: LatticeSpec, shape: Shape) -> Vec<(u32, u32)> {
    let (nx, ny) = match shape {
        Shape::Chimera { rows, cols, shore } => {
            if shore != 4 || spec.sides().iter().any(|&l| l > CHIMERA_MAX_SIDE) {
                return Vec::new();
            }
            ((rows / 2).checked_sub(spec.l1), (cols / 2).checked_sub(spec.l2))
        }
        Shape::Pegasus { m } => {
            if spec.l3 > PEGASUS_MAX_LAYERS {
                return Vec::new();
            }
            ((m - 1).checked_sub(spec.l1), (m - 1).checked_sub(spec.l2))
        }
    };
    let (Some(nx), Some(ny)) = (nx, ny) else {
        return Vec::new();
    };
    (0..=nx).flat_map(|x| (0..=ny).map(move |y| (x, y))).collect()
}
