//! Qubit connectivity graphs of the Chimera and Pegasus families.
//!
//! Graphs are built from their coordinate definitions. A working graph is an
//! ideal graph minus a [`DefectMask`]; it remembers the mask so that the JSON
//! document only has to carry the family, the shape and the defect lists.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Per-track offsets of vertical (orientation 0) Pegasus qubits.
pub const PEGASUS_VERTICAL_OFFSETS: [u32; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
/// Per-track offsets of horizontal (orientation 1) Pegasus qubits.
pub const PEGASUS_HORIZONTAL_OFFSETS: [u32; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Chimera,
    Pegasus,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Chimera => "chimera",
            Family::Pegasus => "pegasus",
        }
    }

    /// Number of qubits per chain used by the cubic-lattice embeddings.
    pub fn chain_length(self) -> usize {
        match self {
            Family::Chimera => 4,
            Family::Pegasus => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chimera" => Ok(Family::Chimera),
            "pegasus" => Ok(Family::Pegasus),
            other => Err(Error::InvalidShape(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    Chimera { rows: u32, cols: u32, shore: u32 },
    Pegasus { m: u32 },
}

impl Shape {
    pub fn family(&self) -> Family {
        match self {
            Shape::Chimera { .. } => Family::Chimera,
            Shape::Pegasus { .. } => Family::Pegasus,
        }
    }

    /// Parses `rows,cols,shore` for Chimera or `m` for Pegasus.
    pub fn parse(family: Family, text: &str) -> Result<Shape> {
        let nums: Vec<u32> = text
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidShape(format!("'{text}': {e}")))?;
        let shape = match (family, nums.as_slice()) {
            (Family::Chimera, [r, c, t]) => Shape::Chimera {
                rows: *r,
                cols: *c,
                shore: *t,
            },
            (Family::Chimera, [m]) => Shape::Chimera {
                rows: *m,
                cols: *m,
                shore: 4,
            },
            (Family::Pegasus, [m]) => Shape::Pegasus { m: *m },
            _ => {
                return Err(Error::InvalidShape(format!(
                    "'{text}' is not a {family} shape"
                )))
            }
        };
        shape.validate()?;
        Ok(shape)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Shape::Chimera { rows, cols, shore } => {
                if rows == 0 || cols == 0 || shore == 0 {
                    return Err(Error::InvalidShape(format!(
                        "chimera dimensions must be positive, got {rows}x{cols}x{shore}"
                    )));
                }
            }
            Shape::Pegasus { m } => {
                if m < 2 {
                    return Err(Error::InvalidShape(format!("pegasus size must be >= 2, got {m}")));
                }
            }
        }
        Ok(())
    }

    /// Whether `q` is a qubit of the ideal graph with this shape.
    pub fn contains_qubit(&self, q: &QubitId) -> bool {
        match (*self, *q) {
            (Shape::Chimera { rows, cols, shore }, QubitId::Chimera { row, col, k, .. }) => {
                u32::from(row) < rows && u32::from(col) < cols && u32::from(k) < shore
            }
            (Shape::Pegasus { m }, QubitId::Pegasus { u, w, k, z }) => {
                let (w, k, z) = (u32::from(w), u32::from(k), u32::from(z));
                if u > 1 || w >= m || k >= 12 || z + 1 >= m {
                    return false;
                }
                // Boundary lines that cross no perpendicular qubit are trimmed.
                let (lo, hi) = pegasus_fabric_bounds(u);
                !(w == 0 && k < lo || w == m - 1 && k >= hi)
            }
            _ => false,
        }
    }

    /// Whether the ideal graph with this shape couples `a` and `b`.
    pub fn has_coupler(&self, a: &QubitId, b: &QubitId) -> bool {
        if a == b || !self.contains_qubit(a) || !self.contains_qubit(b) {
            return false;
        }
        match (*a, *b) {
            (
                QubitId::Chimera { row: r1, col: c1, side: s1, k: k1 },
                QubitId::Chimera { row: r2, col: c2, side: s2, k: k2 },
            ) => {
                if s1 != s2 {
                    return r1 == r2 && c1 == c2;
                }
                if k1 != k2 {
                    return false;
                }
                match s1 {
                    Side::Vertical => c1 == c2 && r1.abs_diff(r2) == 1,
                    Side::Horizontal => r1 == r2 && c1.abs_diff(c2) == 1,
                }
            }
            (
                QubitId::Pegasus { u: u1, w: w1, k: k1, z: z1 },
                QubitId::Pegasus { u: u2, w: w2, k: k2, z: z2 },
            ) => {
                if u1 == u2 {
                    if w1 != w2 {
                        return false;
                    }
                    let external = k1 == k2 && z1.abs_diff(z2) == 1;
                    let odd = z1 == z2 && k1 != k2 && k1 / 2 == k2 / 2;
                    return external || odd;
                }
                let ((w, k, z), (wh, kh, zh)) = if u1 == 0 {
                    ((w1, k1, z1), (w2, k2, z2))
                } else {
                    ((w2, k2, z2), (w1, k1, z1))
                };
                pegasus_internal_partner(w, k, z, kh) == Some((wh, zh))
            }
            _ => false,
        }
    }
}

impl Shape {
    /// Neighbours of `q` in the ideal graph, computed from coordinates.
    pub fn ideal_neighbors(&self, q: &QubitId) -> Vec<QubitId> {
        if !self.contains_qubit(q) {
            return Vec::new();
        }
        let mut out = Vec::new();
        match (*self, *q) {
            (Shape::Chimera { shore, .. }, QubitId::Chimera { row, col, side, k }) => {
                let (row, col, k) = (u32::from(row), u32::from(col), u32::from(k));
                let other = match side {
                    Side::Vertical => Side::Horizontal,
                    Side::Horizontal => Side::Vertical,
                };
                out.extend((0..shore).map(|kk| QubitId::chimera(row, col, other, kk)));
                let steps: [(i64, i64); 2] = match side {
                    Side::Vertical => [(-1, 0), (1, 0)],
                    Side::Horizontal => [(0, -1), (0, 1)],
                };
                for (dr, dc) in steps {
                    let (r, c) = (row as i64 + dr, col as i64 + dc);
                    if r >= 0 && c >= 0 {
                        out.push(QubitId::chimera(r as u32, c as u32, side, k));
                    }
                }
            }
            (Shape::Pegasus { .. }, QubitId::Pegasus { u, w, k, z }) => {
                if z > 0 {
                    out.push(QubitId::Pegasus { u, w, k, z: z - 1 });
                }
                out.push(QubitId::Pegasus { u, w, k, z: z + 1 });
                out.push(QubitId::Pegasus { u, w, k: k ^ 1, z });
                for kk in 0..12u8 {
                    if u == 0 {
                        if let Some((wh, zh)) = pegasus_internal_partner(w, k, z, kk) {
                            out.push(QubitId::Pegasus { u: 1, w: wh, k: kk, z: zh });
                        }
                    } else {
                        // Invert the crossing rule for a horizontal qubit.
                        let off_v = PEGASUS_VERTICAL_OFFSETS[kk as usize];
                        let off_h = PEGASUS_HORIZONTAL_OFFSETS[k as usize];
                        let below = u16::from(u32::from(k) < off_v);
                        if w >= below {
                            let wv = z + u16::from(u32::from(kk) < off_h);
                            out.push(QubitId::Pegasus { u: 0, w: wv, k: kk, z: w - below });
                        }
                    }
                }
            }
            _ => {}
        }
        out.retain(|n| self.has_coupler(q, n));
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Chimera { rows, cols, shore } => write!(f, "{rows},{cols},{shore}"),
            Shape::Pegasus { m } => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Vertical,
    Horizontal,
}

/// Qubit coordinates.
///
/// Chimera qubits are addressed by unit cell `(row, col)`, side of the
/// bipartite cell and shore index `k`. Pegasus qubits use `(u, w, k, z)`:
/// orientation, perpendicular tile offset, track and parallel offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitId {
    Chimera { row: u16, col: u16, side: Side, k: u16 },
    Pegasus { u: u8, w: u16, k: u8, z: u16 },
}

impl QubitId {
    pub fn chimera(row: u32, col: u32, side: Side, k: u32) -> Self {
        QubitId::Chimera {
            row: row as u16,
            col: col as u16,
            side,
            k: k as u16,
        }
    }

    pub fn pegasus(u: u32, w: u32, k: u32, z: u32) -> Self {
        QubitId::Pegasus {
            u: u as u8,
            w: w as u16,
            k: k as u8,
            z: z as u16,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            QubitId::Chimera { .. } => Family::Chimera,
            QubitId::Pegasus { .. } => Family::Pegasus,
        }
    }

    /// Integer tuple used in JSON documents: `[row, col, side, k]` with side
    /// 0 = vertical, 1 = horizontal, or `[u, w, k, z]`.
    pub fn coords(&self) -> [u32; 4] {
        match *self {
            QubitId::Chimera { row, col, side, k } => [
                row.into(),
                col.into(),
                match side {
                    Side::Vertical => 0,
                    Side::Horizontal => 1,
                },
                k.into(),
            ],
            QubitId::Pegasus { u, w, k, z } => [u.into(), w.into(), k.into(), z.into()],
        }
    }

    pub fn from_coords(family: Family, c: [u32; 4]) -> Result<Self> {
        match family {
            Family::Chimera => {
                let side = match c[2] {
                    0 => Side::Vertical,
                    1 => Side::Horizontal,
                    s => return Err(Error::Format(format!("chimera side must be 0 or 1, got {s}"))),
                };
                Ok(QubitId::chimera(c[0], c[1], side, c[3]))
            }
            Family::Pegasus => Ok(QubitId::pegasus(c[0], c[1], c[2], c[3])),
        }
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coords();
        write!(f, "({},{},{},{})", c[0], c[1], c[2], c[3])
    }
}

/// An unordered qubit pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coupler(QubitId, QubitId);

impl Coupler {
    pub fn new(a: QubitId, b: QubitId) -> Self {
        if a <= b {
            Coupler(a, b)
        } else {
            Coupler(b, a)
        }
    }

    pub fn endpoints(&self) -> (QubitId, QubitId) {
        (self.0, self.1)
    }

    pub fn touches(&self, q: &QubitId) -> bool {
        self.0 == *q || self.1 == *q
    }

    /// The endpoint opposite to `q`, if `q` is an endpoint.
    pub fn other(&self, q: &QubitId) -> Option<QubitId> {
        if self.0 == *q {
            Some(self.1)
        } else if self.1 == *q {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Coupler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectMask {
    pub qubits: BTreeSet<QubitId>,
    pub couplers: BTreeSet<Coupler>,
    pub provenance: String,
}

impl DefectMask {
    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty() && self.couplers.is_empty()
    }
}

/// A qubit connectivity graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct HardwareGraph {
    shape: Shape,
    qubits: Vec<QubitId>,
    index: HashMap<QubitId, u32>,
    adjacency: Vec<Vec<u32>>,
    couplers: Vec<Coupler>,
    defects: DefectMask,
}

impl HardwareGraph {
    fn from_parts(shape: Shape, qubits: Vec<QubitId>, couplers: Vec<Coupler>, defects: DefectMask) -> Self {
        let mut qubits = qubits;
        qubits.sort_unstable();
        qubits.dedup();
        let index: HashMap<QubitId, u32> = qubits
            .iter()
            .enumerate()
            .map(|(i, q)| (*q, i as u32))
            .collect();
        let mut couplers = couplers;
        couplers.sort_unstable();
        couplers.dedup();
        let mut adjacency = vec![Vec::new(); qubits.len()];
        for c in &couplers {
            let (a, b) = c.endpoints();
            let (ia, ib) = (index[&a], index[&b]);
            adjacency[ia as usize].push(ib);
            adjacency[ib as usize].push(ia);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        HardwareGraph {
            shape,
            qubits,
            index,
            adjacency,
            couplers,
            defects,
        }
    }

    pub fn family(&self) -> Family {
        self.shape.family()
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn couplers(&self) -> &[Coupler] {
        &self.couplers
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_couplers(&self) -> usize {
        self.couplers.len()
    }

    /// Defects removed from the ideal graph to obtain this one.
    pub fn defects(&self) -> &DefectMask {
        &self.defects
    }

    pub fn contains(&self, q: &QubitId) -> bool {
        self.index.contains_key(q)
    }

    pub fn has_coupler(&self, a: &QubitId, b: &QubitId) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&ia), Some(&ib)) => self.adjacency[ia as usize].binary_search(&ib).is_ok(),
            _ => false,
        }
    }

    pub fn neighbors<'a>(&'a self, q: &QubitId) -> impl Iterator<Item = QubitId> + 'a {
        let list: &'a [u32] = match self.index.get(q) {
            Some(&i) => &self.adjacency[i as usize],
            None => &[],
        };
        list.iter().map(move |&j| self.qubits[j as usize])
    }

    pub fn degree(&self, q: &QubitId) -> usize {
        self.index
            .get(q)
            .map_or(0, |&i| self.adjacency[i as usize].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Rebuilds the ideal graph of the same family and shape.
    pub fn ideal(&self) -> HardwareGraph {
        build_ideal(self.shape).expect("shape was validated at construction")
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            family: self.family(),
            shape: self.shape,
            defects: DefectsDoc {
                qubits: self.defects.qubits.iter().map(QubitId::coords).collect(),
                couplers: self
                    .defects
                    .couplers
                    .iter()
                    .map(|c| [c.0.coords(), c.1.coords()])
                    .collect(),
            },
            provenance: if self.defects.provenance.is_empty() {
                None
            } else {
                Some(self.defects.provenance.clone())
            },
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<HardwareGraph> {
        if doc.shape.family() != doc.family {
            return Err(Error::Format(format!(
                "shape {} does not belong to family {}",
                doc.shape, doc.family
            )));
        }
        let ideal = build_ideal(doc.shape)?;
        let mut mask = DefectMask {
            provenance: doc.provenance.clone().unwrap_or_default(),
            ..DefectMask::default()
        };
        for c in &doc.defects.qubits {
            mask.qubits.insert(QubitId::from_coords(doc.family, *c)?);
        }
        for [a, b] in &doc.defects.couplers {
            mask.couplers.insert(Coupler::new(
                QubitId::from_coords(doc.family, *a)?,
                QubitId::from_coords(doc.family, *b)?,
            ));
        }
        apply_defects(&ideal, &mask)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_doc())?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<HardwareGraph> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: GraphDoc = serde_json::from_str(&text)?;
        HardwareGraph::from_doc(&doc)
    }
}

/// JSON form of a graph: ideal edges are regenerated from the shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub family: Family,
    pub shape: Shape,
    pub defects: DefectsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectsDoc {
    pub qubits: Vec<[u32; 4]>,
    pub couplers: Vec<[[u32; 4]; 2]>,
}

pub fn build_chimera(rows: u32, cols: u32, shore: u32) -> Result<HardwareGraph> {
    let shape = Shape::Chimera { rows, cols, shore };
    shape.validate()?;
    let mut qubits = Vec::with_capacity((2 * rows * cols * shore) as usize);
    let mut couplers = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            for k in 0..shore {
                qubits.push(QubitId::chimera(r, c, Side::Vertical, k));
                qubits.push(QubitId::chimera(r, c, Side::Horizontal, k));
            }
            for kv in 0..shore {
                for kh in 0..shore {
                    couplers.push(Coupler::new(
                        QubitId::chimera(r, c, Side::Vertical, kv),
                        QubitId::chimera(r, c, Side::Horizontal, kh),
                    ));
                }
            }
            for k in 0..shore {
                if r + 1 < rows {
                    couplers.push(Coupler::new(
                        QubitId::chimera(r, c, Side::Vertical, k),
                        QubitId::chimera(r + 1, c, Side::Vertical, k),
                    ));
                }
                if c + 1 < cols {
                    couplers.push(Coupler::new(
                        QubitId::chimera(r, c, Side::Horizontal, k),
                        QubitId::chimera(r, c + 1, Side::Horizontal, k),
                    ));
                }
            }
        }
    }
    Ok(HardwareGraph::from_parts(shape, qubits, couplers, DefectMask::default()))
}

/// Track range `[lo, hi)` kept on the first and last perpendicular offset.
fn pegasus_fabric_bounds(u: u8) -> (u32, u32) {
    // Vertical lines are trimmed according to where horizontal qubits start
    // and end, and vice versa.
    let offsets = if u == 0 {
        &PEGASUS_HORIZONTAL_OFFSETS
    } else {
        &PEGASUS_VERTICAL_OFFSETS
    };
    (*offsets.iter().min().unwrap(), *offsets.iter().max().unwrap())
}

/// Horizontal partner `(w, z)` on track `kh` of the vertical qubit `(0, w, k, z)`.
///
/// A vertical qubit sits at column `12w + k` and spans rows
/// `[12z + off_v[k], 12z + off_v[k] + 12)`; a horizontal qubit mirrors this.
/// They couple exactly when the two segments cross.
fn pegasus_internal_partner(w: u16, k: u8, z: u16, kh: u8) -> Option<(u16, u16)> {
    let off_v = PEGASUS_VERTICAL_OFFSETS[k as usize];
    let off_h = PEGASUS_HORIZONTAL_OFFSETS[kh as usize];
    let wh = z + u16::from(u32::from(kh) < off_v);
    let below = u16::from(u32::from(k) < off_h);
    if w < below {
        return None;
    }
    Some((wh, w - below))
}

pub fn build_pegasus(m: u32) -> Result<HardwareGraph> {
    let shape = Shape::Pegasus { m };
    shape.validate()?;
    let mut qubits = Vec::with_capacity((24 * m * (m - 1)) as usize);
    for u in 0..2 {
        for w in 0..m {
            for k in 0..12 {
                for z in 0..m - 1 {
                    let q = QubitId::pegasus(u, w, k, z);
                    if shape.contains_qubit(&q) {
                        qubits.push(q);
                    }
                }
            }
        }
    }
    let mut couplers = Vec::new();
    for &q in &qubits {
        let QubitId::Pegasus { u, w, k, z } = q else {
            unreachable!()
        };
        let ext = QubitId::Pegasus { u, w, k, z: z + 1 };
        if shape.contains_qubit(&ext) {
            couplers.push(Coupler::new(q, ext));
        }
        if k % 2 == 0 {
            let odd = QubitId::Pegasus { u, w, k: k + 1, z };
            if shape.contains_qubit(&odd) {
                couplers.push(Coupler::new(q, odd));
            }
        }
        if u == 0 {
            for kh in 0..12u8 {
                if let Some((wh, zh)) = pegasus_internal_partner(w, k, z, kh) {
                    let h = QubitId::Pegasus { u: 1, w: wh, k: kh, z: zh };
                    if shape.contains_qubit(&h) {
                        couplers.push(Coupler::new(q, h));
                    }
                }
            }
        }
    }
    Ok(HardwareGraph::from_parts(shape, qubits, couplers, DefectMask::default()))
}

pub fn build_ideal(shape: Shape) -> Result<HardwareGraph> {
    match shape {
        Shape::Chimera { rows, cols, shore } => build_chimera(rows, cols, shore),
        Shape::Pegasus { m } => build_pegasus(m),
    }
}

/// Removes the masked qubits (with their couplers) and couplers.
///
/// The mask is checked against the ideal graph, so applying a mask twice, or
/// a mask that overlaps earlier defects, is allowed and idempotent.
pub fn apply_defects(graph: &HardwareGraph, mask: &DefectMask) -> Result<HardwareGraph> {
    let shape = graph.shape;
    if let Some(q) = mask.qubits.iter().find(|q| !shape.contains_qubit(q)) {
        return Err(Error::MaskMismatch(format!("qubit {q}")));
    }
    if let Some(c) = mask.couplers.iter().find(|c| {
        let (a, b) = c.endpoints();
        !shape.has_coupler(&a, &b)
    }) {
        return Err(Error::MaskMismatch(format!("coupler {c}")));
    }
    let qubits: Vec<QubitId> = graph
        .qubits
        .iter()
        .filter(|q| !mask.qubits.contains(q))
        .copied()
        .collect();
    let couplers: Vec<Coupler> = graph
        .couplers
        .iter()
        .filter(|c| {
            let (a, b) = c.endpoints();
            !mask.couplers.contains(c) && !mask.qubits.contains(&a) && !mask.qubits.contains(&b)
        })
        .copied()
        .collect();
    let mut defects = graph.defects.clone();
    defects.qubits.extend(mask.qubits.iter().copied());
    defects.couplers.extend(mask.couplers.iter().copied());
    if !mask.provenance.is_empty() {
        defects.provenance = if defects.provenance.is_empty() {
            mask.provenance.clone()
        } else {
            format!("{}; {}", defects.provenance, mask.provenance)
        };
    }
    Ok(HardwareGraph::from_parts(shape, qubits, couplers, defects))
}

/// Uniformly random qubit and coupler defects, drawn without replacement.
pub fn sample_defect_mask(
    graph: &HardwareGraph,
    n_qubits: usize,
    n_couplers: usize,
    seed: u64,
) -> Result<DefectMask> {
    if n_qubits > graph.num_qubits() {
        return Err(Error::CountExceeded {
            what: "defective qubits",
            requested: n_qubits,
            available: graph.num_qubits(),
        });
    }
    if n_couplers > graph.num_couplers() {
        return Err(Error::CountExceeded {
            what: "defective couplers",
            requested: n_couplers,
            available: graph.num_couplers(),
        });
    }
    let mut rng = rng::stream(seed, "defects", &[]);
    let qubits = sample(&mut rng, graph.num_qubits(), n_qubits)
        .into_iter()
        .map(|i| graph.qubits[i])
        .collect();
    let couplers = sample(&mut rng, graph.num_couplers(), n_couplers)
        .into_iter()
        .map(|i| graph.couplers[i])
        .collect();
    Ok(DefectMask {
        qubits,
        couplers,
        provenance: format!("seed={seed}"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub qubits: usize,
    pub couplers: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub bipartite: bool,
}

pub fn graph_stats(graph: &HardwareGraph) -> GraphStats {
    let mut degree_histogram = BTreeMap::new();
    for list in &graph.adjacency {
        *degree_histogram.entry(list.len()).or_insert(0) += 1;
    }
    GraphStats {
        qubits: graph.num_qubits(),
        couplers: graph.num_couplers(),
        degree_histogram,
        bipartite: is_bipartite(&graph.adjacency),
    }
}

fn is_bipartite(adjacency: &[Vec<u32>]) -> bool {
    let mut color = vec![u8::MAX; adjacency.len()];
    let mut queue = VecDeque::new();
    for start in 0..adjacency.len() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &n in &adjacency[v] {
                let n = n as usize;
                if color[n] == u8::MAX {
                    color[n] = 1 - color[v];
                    queue.push_back(n);
                } else if color[n] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}
