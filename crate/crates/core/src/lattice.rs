//! Open-boundary cubic lattices, random ±1 instances and the cube isometries.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct LatticeSpec {
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
}

impl LatticeSpec {
    pub fn new(l1: u32, l2: u32, l3: u32) -> Result<Self> {
        if l1 == 0 || l2 == 0 || l3 == 0 {
            return Err(Error::InvalidShape(format!(
                "lattice sides must be positive, got {l1}x{l2}x{l3}"
            )));
        }
        Ok(LatticeSpec { l1, l2, l3 })
    }

    pub fn cube(l: u32) -> Result<Self> {
        Self::new(l, l, l)
    }

    pub fn sides(&self) -> [u32; 3] {
        [self.l1, self.l2, self.l3]
    }

    pub fn is_cube(&self) -> bool {
        self.l1 == self.l2 && self.l2 == self.l3
    }

    pub fn num_sites(&self) -> usize {
        (self.l1 * self.l2 * self.l3) as usize
    }

    /// Edge count of the full open-boundary lattice.
    pub fn num_edges(&self) -> usize {
        let [a, b, c] = self.sides();
        (b * c * (a - 1) + a * c * (b - 1) + a * b * (c - 1)) as usize
    }

    pub fn contains(&self, s: &Site) -> bool {
        s.x < self.l1 && s.y < self.l2 && s.z < self.l3
    }
}

impl From<[u32; 3]> for LatticeSpec {
    fn from(s: [u32; 3]) -> Self {
        LatticeSpec {
            l1: s[0],
            l2: s[1],
            l3: s[2],
        }
    }
}

impl From<LatticeSpec> for [u32; 3] {
    fn from(s: LatticeSpec) -> Self {
        s.sides()
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.l1, self.l2, self.l3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct Site {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Site {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Site { x, y, z }
    }

    pub fn coord(&self, axis: Axis) -> u32 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    /// Neighbour one step up along `axis`, if inside `spec`.
    pub fn step(&self, axis: Axis, spec: &LatticeSpec) -> Option<Site> {
        let mut next = *self;
        match axis {
            Axis::X => next.x += 1,
            Axis::Y => next.y += 1,
            Axis::Z => next.z += 1,
        }
        spec.contains(&next).then_some(next)
    }

    /// The `"x,y,z"` key used in embedding documents.
    pub fn key(&self) -> String {
        format!("{},{},{}", self.x, self.y, self.z)
    }

    pub fn parse_key(key: &str) -> Result<Site> {
        let parts: Vec<u32> = key
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("site key '{key}': {e}")))?;
        match parts.as_slice() {
            [x, y, z] => Ok(Site::new(*x, *y, *z)),
            _ => Err(Error::Format(format!("site key '{key}' needs three fields"))),
        }
    }
}

impl From<[u32; 3]> for Site {
    fn from(c: [u32; 3]) -> Self {
        Site::new(c[0], c[1], c[2])
    }
}

impl From<Site> for [u32; 3] {
    fn from(s: Site) -> Self {
        [s.x, s.y, s.z]
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// A unit-step lattice bond with `a` the lower endpoint along `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeEdge {
    pub a: Site,
    pub b: Site,
    pub axis: Axis,
}

impl LatticeEdge {
    pub fn new(a: Site, axis: Axis, spec: &LatticeSpec) -> Option<Self> {
        a.step(axis, spec).map(|b| LatticeEdge { a, b, axis })
    }

    /// Builds the edge between two sites at unit distance, in either order.
    pub fn between(s: Site, t: Site) -> Option<Self> {
        let (a, b) = if s <= t { (s, t) } else { (t, s) };
        let d = [b.x as i64 - a.x as i64, b.y as i64 - a.y as i64, b.z as i64 - a.z as i64];
        let axis = match d {
            [1, 0, 0] => Axis::X,
            [0, 1, 0] => Axis::Y,
            [0, 0, 1] => Axis::Z,
            _ => return None,
        };
        Some(LatticeEdge { a, b, axis })
    }
}

impl fmt::Display for LatticeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}[{}]", self.a, self.b, self.axis.name())
    }
}

/// A subgraph of the open-boundary lattice. Sites and edges are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalGraph {
    spec: LatticeSpec,
    sites: Vec<Site>,
    edges: Vec<LatticeEdge>,
    site_index: HashMap<Site, usize>,
    ends: Vec<(usize, usize)>,
}

impl LogicalGraph {
    pub fn new(spec: LatticeSpec, sites: Vec<Site>, edges: Vec<LatticeEdge>) -> Result<Self> {
        let mut sites = sites;
        sites.sort_unstable();
        sites.dedup();
        if let Some(s) = sites.iter().find(|s| !spec.contains(s)) {
            return Err(Error::Format(format!("site {s} lies outside {spec}")));
        }
        let site_index: HashMap<Site, usize> =
            sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        let mut ends = Vec::with_capacity(edges.len());
        for e in &edges {
            if LatticeEdge::between(e.a, e.b) != Some(*e) {
                return Err(Error::Format(format!("{e} is not a unit lattice bond")));
            }
            match (site_index.get(&e.a), site_index.get(&e.b)) {
                (Some(&i), Some(&j)) => ends.push((i, j)),
                _ => return Err(Error::Format(format!("{e} joins a missing site"))),
            }
        }
        Ok(LogicalGraph {
            spec,
            sites,
            edges,
            site_index,
            ends,
        })
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    /// Site-index pairs aligned with [`edges`](Self::edges).
    pub fn edge_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn site_index(&self, s: &Site) -> Option<usize> {
        self.site_index.get(s).copied()
    }

    pub fn contains_edge(&self, e: &LatticeEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.sites.len() == self.spec.num_sites() && self.edges.len() == self.spec.num_edges()
    }

    pub fn degree(&self, s: &Site) -> usize {
        self.edges.iter().filter(|e| e.a == *s || e.b == *s).count()
    }

    /// Common subgraph of two logical graphs over the same lattice.
    pub fn intersection(&self, other: &LogicalGraph) -> Result<LogicalGraph> {
        if self.spec != other.spec {
            return Err(Error::Format(format!(
                "cannot intersect {} with {}",
                self.spec, other.spec
            )));
        }
        let sites = self
            .sites
            .iter()
            .filter(|s| other.site_index.contains_key(s))
            .copied()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| other.contains_edge(e))
            .copied()
            .collect();
        LogicalGraph::new(self.spec, sites, edges)
    }
}

pub fn build_lattice(spec: LatticeSpec) -> LogicalGraph {
    let mut sites = Vec::with_capacity(spec.num_sites());
    let mut edges = Vec::with_capacity(spec.num_edges());
    for x in 0..spec.l1 {
        for y in 0..spec.l2 {
            for z in 0..spec.l3 {
                let s = Site::new(x, y, z);
                sites.push(s);
                edges.extend(Axis::ALL.iter().filter_map(|&a| LatticeEdge::new(s, a, &spec)));
            }
        }
    }
    LogicalGraph::new(spec, sites, edges).expect("full lattice is well formed")
}

/// ±1 values indexed like the sites of a [`LogicalGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinAssignment(pub Vec<i8>);

impl SpinAssignment {
    pub fn uniform(n: usize, value: i8) -> Self {
        SpinAssignment(vec![value; n])
    }

    /// The `index`-th of the `2^n` assignments: bit i set means spin i is -1.
    pub fn from_bits(n: usize, index: u64) -> Self {
        SpinAssignment((0..n).map(|i| if index >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: LogicalGraph,
    couplings: Vec<i8>,
    seed: u64,
    id: String,
}

impl Instance {
    pub fn new(graph: LogicalGraph, couplings: Vec<i8>, seed: u64) -> Result<Self> {
        if couplings.len() != graph.edges().len() {
            return Err(Error::Format(format!(
                "{} couplings for {} edges",
                couplings.len(),
                graph.edges().len()
            )));
        }
        if let Some(j) = couplings.iter().find(|j| j.abs() != 1) {
            return Err(Error::Format(format!("coupling {j} is not ±1")));
        }
        let id = instance_id(&graph, &couplings, seed);
        Ok(Instance {
            graph,
            couplings,
            seed,
            id,
        })
    }

    pub fn graph(&self) -> &LogicalGraph {
        &self.graph
    }

    pub fn spec(&self) -> LatticeSpec {
        self.graph.spec()
    }

    /// Couplings aligned with the graph's edge list.
    pub fn couplings(&self) -> &[i8] {
        &self.couplings
    }

    pub fn coupling(&self, e: &LatticeEdge) -> Option<i8> {
        self.graph
            .edges()
            .binary_search(e)
            .ok()
            .map(|i| self.couplings[i])
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn num_spins(&self) -> usize {
        self.graph.sites().len()
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            spec: self.spec(),
            sites: self.graph.sites().to_vec(),
            edges: self
                .graph
                .edges()
                .iter()
                .zip(&self.couplings)
                .map(|(e, &j)| (e.a, e.b, e.axis, j))
                .collect(),
            seed: self.seed,
            id: self.id.clone(),
        }
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let mut pairs = Vec::with_capacity(doc.edges.len());
        for &(a, b, axis, j) in &doc.edges {
            let e = LatticeEdge::between(a, b)
                .filter(|e| e.axis == axis)
                .ok_or_else(|| Error::Format(format!("bad edge {a}-{b} along {}", axis.name())))?;
            pairs.push((e, j));
        }
        pairs.sort_unstable();
        let graph = LogicalGraph::new(
            doc.spec,
            doc.sites.clone(),
            pairs.iter().map(|p| p.0).collect(),
        )?;
        let inst = Instance::new(graph, pairs.iter().map(|p| p.1).collect(), doc.seed)?;
        if inst.id != doc.id {
            return Err(Error::Format(format!(
                "instance id {} does not match its content ({})",
                doc.id, inst.id
            )));
        }
        Ok(inst)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_doc())?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::from_doc(&serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub spec: LatticeSpec,
    pub sites: Vec<Site>,
    pub edges: Vec<(Site, Site, Axis, i8)>,
    pub seed: u64,
    pub id: String,
}

/// First 16 hex digits of SHA-256 over the spec, seed and coupling list.
fn instance_id(graph: &LogicalGraph, couplings: &[i8], seed: u64) -> String {
    let mut h = Sha256::new();
    let spec = graph.spec();
    h.update(format!("{},{},{};{};", spec.l1, spec.l2, spec.l3, seed).as_bytes());
    for s in graph.sites() {
        h.update(format!("s{},{},{};", s.x, s.y, s.z).as_bytes());
    }
    for (e, j) in graph.edges().iter().zip(couplings) {
        h.update(format!("e{},{},{},{},{};", e.a.x, e.a.y, e.a.z, e.axis.name(), j).as_bytes());
    }
    let digest = h.finalize();
    hex::encode(&digest[..8])
}

/// Draws an independent fair ±1 coupling for every edge, in edge order.
pub fn generate_instance(graph: &LogicalGraph, seed: u64) -> Result<Instance> {
    if graph.edges().is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut rng = rng::stream(seed, "couplings", &[]);
    let couplings = graph
        .edges()
        .iter()
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    Instance::new(graph.clone(), couplings, seed)
}

/// `Σ J_ab s_a s_b` over the instance's edges.
pub fn logical_energy(instance: &Instance, spins: &SpinAssignment) -> Result<f64> {
    if spins.len() != instance.num_spins() {
        return Err(Error::IncompleteAssignment(format!(
            "{} spins for {} sites",
            spins.len(),
            instance.num_spins()
        )));
    }
    if spins.values().iter().any(|s| s.abs() != 1) {
        return Err(Error::IncompleteAssignment("spin values must be ±1".into()));
    }
    Ok(energy_unchecked(instance, spins.values()))
}

pub(crate) fn energy_unchecked(instance: &Instance, s: &[i8]) -> f64 {
    let total: i64 = instance
        .graph
        .edge_ends()
        .iter()
        .zip(&instance.couplings)
        .map(|(&(a, b), &j)| i64::from(j * s[a] * s[b]))
        .sum();
    total as f64
}

/// A symmetry of the cube: coordinate `i` of the image is coordinate
/// `perm[i]` of the source, mirrored (`c -> L-1-c`) when `flip[i]` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Isometry {
    pub perm: [u8; 3],
    pub flip: [bool; 3],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        perm: [0, 1, 2],
        flip: [false, false, false],
    };

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let mut perm = [0u8; 3];
        let mut flip = [false; 3];
        for i in 0..3 {
            let j = self.perm[i] as usize;
            perm[i] = other.perm[j];
            flip[i] = self.flip[i] ^ other.flip[j];
        }
        Isometry { perm, flip }
    }

    pub fn inverse(&self) -> Isometry {
        let mut perm = [0u8; 3];
        let mut flip = [false; 3];
        for i in 0..3 {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            flip[j] = self.flip[i];
        }
        Isometry { perm, flip }
    }

    pub fn apply_site(&self, s: &Site, side: u32) -> Site {
        let src = [s.x, s.y, s.z];
        let mut out = [0u32; 3];
        for i in 0..3 {
            let c = src[self.perm[i] as usize];
            out[i] = if self.flip[i] { side - 1 - c } else { c };
        }
        Site::from(out)
    }

    /// Image of a bond direction.
    pub fn apply_axis(&self, axis: Axis) -> Axis {
        let i = self.perm.iter().position(|&p| p as usize == axis.index()).unwrap();
        Axis::from_index(i)
    }

    /// Transports an assignment on `instance` to the sites of `g·instance`.
    pub fn apply_assignment(&self, instance: &Instance, spins: &SpinAssignment) -> SpinAssignment {
        let side = instance.spec().l1;
        let graph = instance.graph();
        let mut out = vec![0i8; spins.len()];
        for (s, &v) in graph.sites().iter().zip(spins.values()) {
            let t = self.apply_site(s, side);
            out[graph.site_index(&t).expect("full cube is closed under isometries")] = v;
        }
        SpinAssignment(out)
    }
}

/// All 48 isometries, ordered lexicographically by axis permutation and
/// then by flip pattern (no flips first, z varying fastest).
pub fn enumerate_isometries() -> Vec<Isometry> {
    const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for bits in 0..8u8 {
            let flip = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
            out.push(Isometry { perm, flip });
        }
    }
    out
}

/// Relabels a full-cube instance by `g`; each bond keeps its coupling.
pub fn apply_isometry(instance: &Instance, g: &Isometry) -> Result<Instance> {
    let spec = instance.spec();
    if !spec.is_cube() {
        return Err(Error::NotFullCube(format!("{spec} is not a cube")));
    }
    if !instance.graph().is_full() {
        return Err(Error::NotFullCube(format!(
            "logical graph has {} of {} sites and {} of {} edges",
            instance.graph().sites().len(),
            spec.num_sites(),
            instance.graph().edges().len(),
            spec.num_edges()
        )));
    }
    let side = spec.l1;
    let mut pairs: Vec<(LatticeEdge, i8)> = instance
        .graph()
        .edges()
        .iter()
        .zip(instance.couplings())
        .map(|(e, &j)| {
            let image = LatticeEdge::between(g.apply_site(&e.a, side), g.apply_site(&e.b, side))
                .expect("isometries preserve unit bonds");
            (image, j)
        })
        .collect();
    pairs.sort_unstable();
    let graph = LogicalGraph::new(
        spec,
        instance.graph().sites().to_vec(),
        pairs.iter().map(|p| p.0).collect(),
    )?;
    Instance::new(graph, pairs.iter().map(|p| p.1).collect(), instance.seed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_edge(j: i8) -> Instance {
        let spec = LatticeSpec::new(2, 1, 1).unwrap();
        Instance::new(build_lattice(spec), vec![j], 0).unwrap()
    }

    #[test]
    fn lattice_sizes() {
        let g = build_lattice(LatticeSpec::cube(10).unwrap());
        assert_eq!((g.sites().len(), g.edges().len()), (1000, 2700));
        let g = build_lattice(LatticeSpec::cube(6).unwrap());
        assert_eq!((g.sites().len(), g.edges().len()), (216, 540));
        let g = build_lattice(LatticeSpec::cube(1).unwrap());
        assert_eq!((g.sites().len(), g.edges().len()), (1, 0));
        assert!(LatticeSpec::new(0, 1, 1).is_err());
    }

    #[test]
    fn site_degrees_in_full_lattice() {
        let g = build_lattice(LatticeSpec::cube(4).unwrap());
        let mut deg = vec![0usize; g.sites().len()];
        for &(a, b) in g.edge_ends() {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert_eq!(*deg.iter().min().unwrap(), 3);
        assert_eq!(*deg.iter().max().unwrap(), 6);
    }

    #[test]
    fn single_edge_energies() {
        let inst = single_edge(1);
        assert_eq!(logical_energy(&inst, &SpinAssignment(vec![1, 1])).unwrap(), 1.0);
        assert_eq!(logical_energy(&inst, &SpinAssignment(vec![1, -1])).unwrap(), -1.0);
        assert!(matches!(
            logical_energy(&inst, &SpinAssignment(vec![1])),
            Err(Error::IncompleteAssignment(_))
        ));
    }

    #[test]
    fn all_up_energy_is_coupling_sum() {
        let inst = generate_instance(&build_lattice(LatticeSpec::cube(2).unwrap()), 9).unwrap();
        let sum: i64 = inst.couplings().iter().map(|&j| i64::from(j)).sum();
        let e = logical_energy(&inst, &SpinAssignment::uniform(8, 1)).unwrap();
        assert_eq!(e, sum as f64);
    }

    #[test]
    fn instance_generation() {
        let g = build_lattice(LatticeSpec::cube(3).unwrap());
        let a = generate_instance(&g, 5).unwrap();
        let b = generate_instance(&g, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(&g, 6).unwrap();
        assert_ne!(a.id(), c.id());
        let empty = build_lattice(LatticeSpec::cube(1).unwrap());
        assert!(matches!(generate_instance(&empty, 0), Err(Error::EmptyGraph)));
    }

    #[test]
    fn couplings_are_balanced() {
        // 11520 edges; 3 sigma of the binomial fraction is about 0.014.
        let g = build_lattice(LatticeSpec::cube(16).unwrap());
        assert!(g.edges().len() >= 10_000);
        let inst = generate_instance(&g, 0).unwrap();
        let plus = inst.couplings().iter().filter(|&&j| j == 1).count();
        let frac = plus as f64 / inst.couplings().len() as f64;
        assert!((0.47..=0.53).contains(&frac), "{frac}");
    }

    #[test]
    fn instance_doc_round_trip() {
        let inst = generate_instance(&build_lattice(LatticeSpec::new(3, 2, 2).unwrap()), 77).unwrap();
        let text = serde_json::to_string(&inst.to_doc()).unwrap();
        assert!(text.starts_with("{\"spec\":[3,2,2],\"sites\":[[0,0,0],"));
        let back = Instance::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn isometry_list() {
        let all = enumerate_isometries();
        assert_eq!(all.len(), 48);
        assert_eq!(all[0], Isometry::IDENTITY);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 48);
    }

    #[test]
    fn isometry_group_axioms() {
        let all = enumerate_isometries();
        let index: HashMap<Isometry, usize> = all.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let spec = LatticeSpec::cube(3).unwrap();
        let sites = build_lattice(spec).sites().to_vec();
        for g in &all {
            assert_eq!(g.compose(&Isometry::IDENTITY), *g);
            assert_eq!(Isometry::IDENTITY.compose(g), *g);
            assert_eq!(g.compose(&g.inverse()), Isometry::IDENTITY);
            for h in &all {
                let gh = g.compose(h);
                assert!(index.contains_key(&gh));
                // Composition agrees with applying the two maps in turn.
                for s in &sites {
                    assert_eq!(gh.apply_site(s, 3), g.apply_site(&h.apply_site(s, 3), 3));
                }
            }
        }
    }

    #[test]
    fn isometry_action_on_instances() {
        let inst = generate_instance(&build_lattice(LatticeSpec::cube(3).unwrap()), 1).unwrap();
        assert_eq!(apply_isometry(&inst, &Isometry::IDENTITY).unwrap(), inst);
        let xflip = Isometry {
            perm: [0, 1, 2],
            flip: [true, false, false],
        };
        let once = apply_isometry(&inst, &xflip).unwrap();
        assert_ne!(once, inst);
        assert_eq!(apply_isometry(&once, &xflip).unwrap(), inst);
    }

    #[test]
    fn isometries_need_a_full_cube() {
        let inst = generate_instance(&build_lattice(LatticeSpec::new(3, 3, 2).unwrap()), 1).unwrap();
        assert!(matches!(
            apply_isometry(&inst, &Isometry::IDENTITY),
            Err(Error::NotFullCube(_))
        ));
        let full = build_lattice(LatticeSpec::cube(2).unwrap());
        let partial = LogicalGraph::new(full.spec(), full.sites().to_vec(), full.edges()[1..].to_vec()).unwrap();
        let inst = generate_instance(&partial, 1).unwrap();
        assert!(matches!(
            apply_isometry(&inst, &Isometry::IDENTITY),
            Err(Error::NotFullCube(_))
        ));
    }

    #[test]
    fn axis_images_follow_the_permutation() {
        let g = Isometry {
            perm: [2, 0, 1],
            flip: [false, true, false],
        };
        // Image coordinate 0 reads source z, so z bonds become x bonds.
        assert_eq!(g.apply_axis(Axis::Z), Axis::X);
        assert_eq!(g.apply_axis(Axis::X), Axis::Y);
        let e = LatticeEdge::new(Site::new(0, 0, 0), Axis::Z, &LatticeSpec::cube(2).unwrap()).unwrap();
        let image = LatticeEdge::between(g.apply_site(&e.a, 2), g.apply_site(&e.b, 2)).unwrap();
        assert_eq!(image.axis, Axis::X);
    }

    proptest! {
        #[test]
        fn edge_count_formula(l1 in 1u32..=12, l2 in 1u32..=12, l3 in 1u32..=12) {
            let spec = LatticeSpec::new(l1, l2, l3).unwrap();
            let g = build_lattice(spec);
            prop_assert_eq!(g.edges().len(), spec.num_edges());
            prop_assert_eq!(g.sites().len(), spec.num_sites());
        }

        #[test]
        fn energy_is_equivariant(seed in any::<u64>(), gi in 0usize..48, bits in any::<u64>()) {
            let g = enumerate_isometries()[gi];
            let inst = generate_instance(&build_lattice(LatticeSpec::cube(3).unwrap()), seed).unwrap();
            let spins = SpinAssignment::from_bits(27, bits);
            let moved = apply_isometry(&inst, &g).unwrap();
            let moved_spins = g.apply_assignment(&inst, &spins);
            prop_assert_eq!(
                logical_energy(&moved, &moved_spins).unwrap(),
                logical_energy(&inst, &spins).unwrap()
            );
        }
    }
}
