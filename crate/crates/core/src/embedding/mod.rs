//! Minor embeddings of cubic lattices into Chimera and Pegasus graphs.
//!
//! Every lattice site becomes a ferromagnetic chain of physical qubits: four
//! qubits on Chimera, two on Pegasus. Bonds along x and y use one physical
//! coupler, bonds along z are split over two couplers carrying half the
//! logical coupling each. With chain couplers at `-2` and logical couplings at
//! `±1` every physical value lies in the programmable range `[-2, 1]`.

mod construct;
mod repair;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Axis, Instance, LatticeEdge, LatticeSpec, LogicalGraph, Site, SpinAssignment};
use crate::rng;
use crate::topology::{Coupler, Family, HardwareGraph, QubitId, Shape};

pub use construct::{
    cube_origins, embed_cubic_at, embed_cubic_chimera, embed_cubic_chimera_at, embed_cubic_pegasus, embed_cubic_pegasus_at,
    PEGASUS_LAYERS,
};
pub use repair::{maximize_yield, maximize_yield_with, place_cube, Placement, YieldOptions, YieldReport};
pub use validate::{validate_embedding, ValidationReport, Violation, ViolationKind};

/// Lowest programmable coupling value.
pub const COUPLING_MIN: f64 = -2.0;
/// Highest programmable coupling value.
pub const COUPLING_MAX: f64 = 1.0;
/// Chain strength that guarantees an unbroken ground state for these chains.
pub const DEFAULT_CHAIN_STRENGTH: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub site: Site,
    pub qubits: Vec<QubitId>,
    /// Couplers internal to the chain; set to `-chain_strength`.
    pub couplers: Vec<Coupler>,
}

impl Chain {
    /// Chain whose couplers are all graph couplers among `qubits`.
    pub fn induced(site: Site, qubits: Vec<QubitId>, has: impl Fn(&QubitId, &QubitId) -> bool) -> Chain {
        let mut couplers = Vec::new();
        for (i, a) in qubits.iter().enumerate() {
            for b in &qubits[i + 1..] {
                if has(a, b) {
                    couplers.push(Coupler::new(*a, *b));
                }
            }
        }
        couplers.sort_unstable();
        Chain {
            site,
            qubits,
            couplers,
        }
    }

    /// Whether the chain couplers connect all qubits.
    pub fn is_connected(&self) -> bool {
        let Some(first) = self.qubits.first() else {
            return false;
        };
        let mut seen = BTreeSet::from([*first]);
        let mut stack = vec![*first];
        while let Some(q) = stack.pop() {
            for c in &self.couplers {
                if let Some(o) = c.other(&q) {
                    if self.qubits.contains(&o) && seen.insert(o) {
                        stack.push(o);
                    }
                }
            }
        }
        seen.len() == self.qubits.len()
    }
}

/// Physical couplers realising one lattice bond, with their weight shares.
pub type EdgeCouplers = Vec<(Coupler, f64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMap {
    pub shape: Shape,
    pub spec: LatticeSpec,
    pub chains: BTreeMap<Site, Chain>,
    pub edges: BTreeMap<LatticeEdge, EdgeCouplers>,
}

impl EmbeddingMap {
    pub fn family(&self) -> Family {
        self.shape.family()
    }

    /// Sites with a chain and the bonds with a physical realisation.
    pub fn logical_graph(&self) -> LogicalGraph {
        LogicalGraph::new(
            self.spec,
            self.chains.keys().copied().collect(),
            self.edges.keys().copied().collect(),
        )
        .expect("embedding edges join embedded sites")
    }

    pub fn num_qubits(&self) -> usize {
        self.chains.values().map(|c| c.qubits.len()).sum()
    }

    /// Keeps only the chains and bonds of `logical`.
    pub fn restrict(&self, logical: &LogicalGraph) -> Result<EmbeddingMap> {
        let mut chains = BTreeMap::new();
        for s in logical.sites() {
            let c = self
                .chains
                .get(s)
                .ok_or_else(|| Error::Uncovered(format!("site {s} has no chain")))?;
            chains.insert(*s, c.clone());
        }
        let mut edges = BTreeMap::new();
        for e in logical.edges() {
            let m = self
                .edges
                .get(e)
                .ok_or_else(|| Error::Uncovered(format!("bond {e} is not mapped")))?;
            edges.insert(*e, m.clone());
        }
        Ok(EmbeddingMap {
            shape: self.shape,
            spec: self.spec,
            chains,
            edges,
        })
    }

    pub fn to_doc(&self) -> EmbeddingDoc {
        let enc = |c: &Coupler| {
            let (a, b) = c.endpoints();
            [a.coords(), b.coords()]
        };
        EmbeddingDoc {
            target: TargetDoc {
                family: self.family(),
                shape: self.shape,
            },
            spec: self.spec,
            chains: self
                .chains
                .iter()
                .map(|(s, c)| (s.key(), c.qubits.iter().map(QubitId::coords).collect()))
                .collect(),
            chain_couplers: self
                .chains
                .iter()
                .map(|(s, c)| (s.key(), c.couplers.iter().map(enc).collect()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(e, cs)| (e.a, e.b, cs.iter().map(|(c, w)| (enc(c), *w)).collect()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &EmbeddingDoc) -> Result<EmbeddingMap> {
        let family = doc.target.family;
        if doc.target.shape.family() != family {
            return Err(Error::Format("target shape and family disagree".into()));
        }
        let dec = |[a, b]: [[u32; 4]; 2]| -> Result<Coupler> {
            Ok(Coupler::new(
                QubitId::from_coords(family, a)?,
                QubitId::from_coords(family, b)?,
            ))
        };
        let mut chains = BTreeMap::new();
        for (key, qubits) in &doc.chains {
            let site = Site::parse_key(key)?;
            let qubits = qubits
                .iter()
                .map(|c| QubitId::from_coords(family, *c))
                .collect::<Result<Vec<_>>>()?;
            let couplers = match doc.chain_couplers.get(key) {
                Some(list) => list.iter().map(|c| dec(*c)).collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            chains.insert(
                site,
                Chain {
                    site,
                    qubits,
                    couplers,
                },
            );
        }
        let mut edges = BTreeMap::new();
        for (a, b, list) in &doc.edges {
            let e = LatticeEdge::between(*a, *b)
                .ok_or_else(|| Error::Format(format!("{a}-{b} is not a lattice bond")))?;
            let cs = list
                .iter()
                .map(|(c, w)| Ok((dec(*c)?, *w)))
                .collect::<Result<Vec<_>>>()?;
            edges.insert(e, cs);
        }
        Ok(EmbeddingMap {
            shape: doc.target.shape,
            spec: doc.spec,
            chains,
            edges,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_doc())?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<EmbeddingMap> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        EmbeddingMap::from_doc(&serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDoc {
    pub family: Family,
    pub shape: Shape,
}

/// A coupler as two coordinate tuples, with its weight share.
pub type CouplerShare = ([[u32; 4]; 2], f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub target: TargetDoc,
    pub spec: LatticeSpec,
    pub chains: BTreeMap<String, Vec<[u32; 4]>>,
    #[serde(default)]
    pub chain_couplers: BTreeMap<String, Vec<[[u32; 4]; 2]>>,
    pub edges: Vec<(Site, Site, Vec<CouplerShare>)>,
}

/// A physical Ising problem ready for a sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedProblem {
    pub shape: Shape,
    pub instance_id: String,
    pub chain_strength: f64,
    /// Physical energy of an unbroken state minus its logical energy.
    pub offset: f64,
    /// Variables of the problem, sorted.
    pub qubits: Vec<QubitId>,
    /// Coupler values; couplers absent from the map are zero.
    pub values: BTreeMap<Coupler, f64>,
    /// For each instance site (in site order), indices into `qubits`.
    pub chain_members: Vec<Vec<usize>>,
    /// Chain couplers, which carry `-chain_strength`.
    pub chain_couplers: BTreeSet<Coupler>,
}

impl EmbeddedProblem {
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit_index(&self, q: &QubitId) -> Option<usize> {
        self.qubits.binary_search(q).ok()
    }

    /// Physical state with every chain set to its logical spin.
    pub fn embed_state(&self, spins: &SpinAssignment) -> Vec<i8> {
        let mut state = vec![1i8; self.qubits.len()];
        for (members, &s) in self.chain_members.iter().zip(spins.values()) {
            for &i in members {
                state[i] = s;
            }
        }
        state
    }
}

/// Programs chain couplers to `-chain_strength` and bond couplers to
/// `J × share` for every bond of the instance.
pub fn set_parameters(instance: &Instance, emb: &EmbeddingMap, chain_strength: f64) -> Result<EmbeddedProblem> {
    if !(chain_strength > 0.0 && chain_strength.is_finite()) {
        return Err(Error::DomainError(format!(
            "chain strength must be positive, got {chain_strength}"
        )));
    }
    let graph = instance.graph();
    let mut chains = Vec::with_capacity(graph.sites().len());
    for s in graph.sites() {
        chains.push(
            emb.chains
                .get(s)
                .ok_or_else(|| Error::Uncovered(format!("site {s} has no chain")))?,
        );
    }
    let mut qubits: Vec<QubitId> = chains.iter().flat_map(|c| c.qubits.iter().copied()).collect();
    qubits.sort_unstable();
    let before = qubits.len();
    qubits.dedup();
    if qubits.len() != before {
        return Err(Error::Format("chains overlap".into()));
    }
    let index: HashMap<QubitId, usize> = qubits.iter().enumerate().map(|(i, q)| (*q, i)).collect();

    let mut values = BTreeMap::new();
    let mut chain_couplers = BTreeSet::new();
    let mut chain_coupler_count = 0usize;
    let put = |values: &mut BTreeMap<Coupler, f64>, c: Coupler, v: f64| -> Result<()> {
        if !(COUPLING_MIN..=COUPLING_MAX).contains(&v) {
            return Err(Error::RangeViolation {
                coupler: c.to_string(),
                value: v,
            });
        }
        if values.insert(c, v).is_some() {
            return Err(Error::Format(format!("coupler {c} is used twice")));
        }
        Ok(())
    };
    for chain in &chains {
        for c in &chain.couplers {
            put(&mut values, *c, -chain_strength)?;
            chain_couplers.insert(*c);
            chain_coupler_count += 1;
        }
    }
    for (e, &j) in graph.edges().iter().zip(instance.couplings()) {
        let mapped = emb
            .edges
            .get(e)
            .ok_or_else(|| Error::Uncovered(format!("bond {e} is not mapped")))?;
        for (c, share) in mapped {
            put(&mut values, *c, f64::from(j) * share)?;
        }
    }
    for c in values.keys() {
        let (a, b) = c.endpoints();
        if !index.contains_key(&a) || !index.contains_key(&b) {
            return Err(Error::Format(format!("coupler {c} leaves the embedded qubits")));
        }
    }
    let chain_members = chains
        .iter()
        .map(|c| c.qubits.iter().map(|q| index[q]).collect())
        .collect();
    Ok(EmbeddedProblem {
        shape: emb.shape,
        instance_id: instance.id().to_string(),
        chain_strength,
        offset: -chain_strength * chain_coupler_count as f64,
        qubits,
        values,
        chain_members,
        chain_couplers,
    })
}

/// `Σ value · s_a · s_b` over the programmed couplers; `state` follows
/// `problem.qubits`.
pub fn physical_energy(problem: &EmbeddedProblem, state: &[i8]) -> Result<f64> {
    if state.len() != problem.qubits.len() {
        return Err(Error::IncompleteAssignment(format!(
            "{} values for {} qubits",
            state.len(),
            problem.qubits.len()
        )));
    }
    let mut e = 0.0;
    for (c, v) in &problem.values {
        let (a, b) = c.endpoints();
        let (ia, ib) = (problem.qubit_index(&a).unwrap(), problem.qubit_index(&b).unwrap());
        e += v * f64::from(state[ia] * state[ib]);
    }
    Ok(e)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BrokenChainReport {
    pub broken: Vec<Site>,
    pub fraction: f64,
}

/// Majority vote per chain; exact ties are broken by a uniform draw from the
/// stream seeded with `tie_seed`. The result follows the chain order of `emb`.
pub fn unembed(state: &HashMap<QubitId, i8>, emb: &EmbeddingMap, tie_seed: u64) -> Result<(SpinAssignment, BrokenChainReport)> {
    let mut rng = rng::stream(tie_seed, "tie", &[]);
    let mut spins = Vec::with_capacity(emb.chains.len());
    let mut broken = Vec::new();
    for (site, chain) in &emb.chains {
        let mut sum = 0i32;
        let mut agree = true;
        let mut first = None;
        for q in &chain.qubits {
            let v = *state
                .get(q)
                .ok_or_else(|| Error::IncompleteAssignment(format!("qubit {q} of chain {site}")))?;
            sum += i32::from(v);
            agree &= *first.get_or_insert(v) == v;
        }
        if !agree {
            broken.push(*site);
        }
        spins.push(vote(sum, &mut rng));
    }
    let fraction = if emb.chains.is_empty() {
        0.0
    } else {
        broken.len() as f64 / emb.chains.len() as f64
    };
    Ok((SpinAssignment(spins), BrokenChainReport { broken, fraction }))
}

pub(crate) fn vote(sum: i32, rng: &mut impl Rng) -> i8 {
    match sum.cmp(&0) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => {
            if rng.gen::<bool>() {
                1
            } else {
                -1
            }
        }
    }
}

/// Physical couplers that realise a bond between two chains: one coupler
/// for x and y bonds, two vertex-disjoint couplers (half share each) for z.
/// Candidates are taken in sorted order so the choice is reproducible.
pub(crate) fn realize_edge(
    a: &[QubitId],
    b: &[QubitId],
    axis: Axis,
    has: impl Fn(&QubitId, &QubitId) -> bool,
) -> Option<EdgeCouplers> {
    let mut found = Vec::new();
    for qa in a {
        for qb in b {
            if has(qa, qb) {
                found.push((*qa, *qb));
            }
        }
    }
    found.sort_unstable_by_key(|&(qa, qb)| Coupler::new(qa, qb));
    match axis {
        Axis::X | Axis::Y => found.first().map(|&(qa, qb)| vec![(Coupler::new(qa, qb), 1.0)]),
        Axis::Z => {
            for (i, p) in found.iter().enumerate() {
                for q in &found[i + 1..] {
                    if p.0 != q.0 && p.1 != q.1 {
                        return Some(vec![(Coupler::new(p.0, p.1), 0.5), (Coupler::new(q.0, q.1), 0.5)]);
                    }
                }
            }
            None
        }
    }
}

pub(crate) fn check_family(graph: &HardwareGraph, expected: Family) -> Result<()> {
    if graph.family() != expected {
        return Err(Error::WrongFamily {
            expected: expected.name(),
            found: graph.family().name(),
        });
    }
    Ok(())
}
