//! Yield maximisation on defective working graphs.
//!
//! Each site keeps its template chain when the chain survives intact. Damaged
//! sites pick from a bounded set of nearby alternative chains (other tracks on
//! Chimera, swapped partner qubits on Pegasus) in a seeded random order, and a
//! fixed number of improvement passes then re-seat single damaged sites
//! whenever that improves `(embedded sites, embedded bonds)` lexicographically.
//! Intact template chains never move.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;

use super::construct::{chimera_chain, cube_origins, embed_cubic_at};
use super::{realize_edge, Chain, EmbeddingMap};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeEdge, LatticeSpec, LogicalGraph, Site};
use crate::rng;
use crate::topology::{Family, HardwareGraph, QubitId, Shape, Side};

#[derive(Clone, Debug)]
pub struct YieldOptions {
    pub seed: u64,
    pub passes: usize,
}

impl Default for YieldOptions {
    fn default() -> Self {
        YieldOptions { seed: 0, passes: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YieldReport {
    pub sites_embedded: usize,
    pub sites_total: usize,
    pub edges_embedded: usize,
    pub edges_total: usize,
    pub dropped_sites: Vec<Site>,
    pub dropped_edges: Vec<LatticeEdge>,
}

impl YieldReport {
    pub fn site_yield(&self) -> f64 {
        self.sites_embedded as f64 / self.sites_total as f64
    }

    pub fn edge_yield(&self) -> f64 {
        if self.edges_total == 0 {
            1.0
        } else {
            self.edges_embedded as f64 / self.edges_total as f64
        }
    }

    pub fn is_complete(&self) -> bool {
        self.dropped_sites.is_empty() && self.dropped_edges.is_empty()
    }
}

pub fn maximize_yield(template: &EmbeddingMap, working: &HardwareGraph) -> (LogicalGraph, EmbeddingMap, YieldReport) {
    maximize_yield_with(template, working, &YieldOptions::default())
}

struct Neighbor {
    site: Site,
    edge: LatticeEdge,
}

pub fn maximize_yield_with(
    template: &EmbeddingMap,
    working: &HardwareGraph,
    opts: &YieldOptions,
) -> (LogicalGraph, EmbeddingMap, YieldReport) {
    let has = |a: &QubitId, b: &QubitId| working.has_coupler(a, b);
    let chain_len = template.family().chain_length();
    let target_edges: Vec<LatticeEdge> = template.edges.keys().copied().collect();
    let sites: Vec<Site> = template.chains.keys().copied().collect();

    let mut neighbors: HashMap<Site, Vec<Neighbor>> = HashMap::new();
    for e in &target_edges {
        neighbors.entry(e.a).or_default().push(Neighbor { site: e.b, edge: *e });
        neighbors.entry(e.b).or_default().push(Neighbor { site: e.a, edge: *e });
    }

    // Candidate 0 is the template chain whenever it survives.
    let candidates: HashMap<Site, Vec<Chain>> = sites
        .iter()
        .map(|s| {
            let tmpl = &template.chains[s];
            let mut seen = BTreeSet::new();
            let mut list = Vec::new();
            let raw = std::iter::once(tmpl.qubits.clone()).chain(alternatives(template.shape, &tmpl.qubits));
            for qubits in raw {
                let mut key = qubits.clone();
                key.sort_unstable();
                if key.len() != chain_len || key.windows(2).any(|w| w[0] == w[1]) || !seen.insert(key) {
                    continue;
                }
                if !qubits.iter().all(|q| working.contains(q)) {
                    continue;
                }
                let chain = Chain::induced(*s, qubits, has);
                if chain.is_connected() {
                    list.push(chain);
                }
            }
            (*s, list)
        })
        .collect();

    let mut placed: BTreeMap<Site, usize> = BTreeMap::new();
    let mut owner: HashMap<QubitId, Site> = HashMap::new();

    let mut pinned = BTreeSet::new();
    for s in &sites {
        let tmpl = &template.chains[s];
        if let Some(c) = candidates[s].first() {
            if c.qubits == tmpl.qubits {
                for q in &c.qubits {
                    owner.insert(*q, *s);
                }
                placed.insert(*s, 0);
                pinned.insert(*s);
            }
        }
    }

    let score = |s: &Site, chain: &Chain, placed: &BTreeMap<Site, usize>| -> usize {
        neighbors.get(s).map_or(0, |ns| {
            ns.iter()
                .filter(|n| {
                    placed.get(&n.site).is_some_and(|&ci| {
                        let other = &candidates[&n.site][ci];
                        realize_edge(&chain.qubits, &other.qubits, n.edge.axis, has).is_some()
                    })
                })
                .count()
        })
    };
    let is_free = |s: &Site, chain: &Chain, owner: &HashMap<QubitId, Site>| {
        chain.qubits.iter().all(|q| owner.get(q).is_none_or(|o| o == s))
    };

    let mut rng = rng::stream(opts.seed, "yield", &[]);
    let mut damaged: Vec<Site> = sites.iter().filter(|s| !placed.contains_key(s)).copied().collect();
    damaged.shuffle(&mut rng);
    let mut order: Vec<Site> = sites.iter().filter(|s| !pinned.contains(*s)).copied().collect();

    let reseat = |s: Site, placed: &mut BTreeMap<Site, usize>, owner: &mut HashMap<QubitId, Site>| -> bool {
        let current = placed.get(&s).map(|&ci| (1usize, score(&s, &candidates[&s][ci], placed)));
        let mut best: Option<(usize, (usize, usize))> = None;
        for (ci, chain) in candidates[&s].iter().enumerate() {
            if Some(ci) == placed.get(&s).copied() || !is_free(&s, chain, owner) {
                continue;
            }
            let value = (1usize, score(&s, chain, placed));
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((ci, value));
            }
        }
        match best {
            Some((ci, value)) if current.is_none_or(|c| value > c) => {
                if let Some(old) = placed.insert(s, ci) {
                    for q in &candidates[&s][old].qubits {
                        owner.remove(q);
                    }
                }
                for q in &candidates[&s][ci].qubits {
                    owner.insert(*q, s);
                }
                true
            }
            _ => false,
        }
    };

    for s in &damaged {
        reseat(*s, &mut placed, &mut owner);
    }
    for _ in 0..opts.passes {
        order.shuffle(&mut rng);
        let mut changed = false;
        for s in &order {
            changed |= reseat(*s, &mut placed, &mut owner);
        }
        if !changed {
            break;
        }
    }

    let chains: BTreeMap<Site, Chain> = placed
        .iter()
        .map(|(s, &ci)| (*s, candidates[s][ci].clone()))
        .collect();
    let mut edges = BTreeMap::new();
    let mut dropped_edges = Vec::new();
    for e in &target_edges {
        let realized = match (chains.get(&e.a), chains.get(&e.b)) {
            (Some(a), Some(b)) => realize_edge(&a.qubits, &b.qubits, e.axis, has),
            _ => None,
        };
        match realized {
            Some(m) => {
                edges.insert(*e, m);
            }
            None => dropped_edges.push(*e),
        }
    }
    let full = build_lattice(template.spec);
    let dropped_sites: Vec<Site> = sites.iter().filter(|s| !chains.contains_key(s)).copied().collect();
    let report = YieldReport {
        sites_embedded: chains.len(),
        sites_total: full.sites().len(),
        edges_embedded: edges.len(),
        edges_total: full.edges().len(),
        dropped_sites,
        dropped_edges,
    };
    let emb = EmbeddingMap {
        shape: template.shape,
        spec: template.spec,
        chains,
        edges,
    };
    (emb.logical_graph(), emb, report)
}

/// Nearby chains that could stand in for a damaged template chain.
fn alternatives(shape: Shape, qubits: &[QubitId]) -> Vec<Vec<QubitId>> {
    match shape.family() {
        Family::Chimera => chimera_alternatives(shape, qubits),
        Family::Pegasus => pegasus_alternatives(shape, qubits),
    }
}

fn chimera_alternatives(shape: Shape, qubits: &[QubitId]) -> Vec<Vec<QubitId>> {
    let Shape::Chimera { shore, .. } = shape else {
        return Vec::new();
    };
    // The chain's first qubit is the vertical one in the top row of its block
    // and its third the horizontal one in the left column.
    let (QubitId::Chimera { row, side: Side::Vertical, .. }, QubitId::Chimera { col, side: Side::Horizontal, .. }) =
        (qubits[0], qubits[2])
    else {
        return Vec::new();
    };
    let (bx, by) = (u32::from(row) / 2, u32::from(col) / 2);
    let mut out = Vec::new();
    for k in 0..shore {
        for hv in 0..2 {
            for hh in 0..2 {
                out.push(chimera_chain(bx, by, hv, hh, k));
            }
        }
    }
    out
}

fn pegasus_alternatives(shape: Shape, qubits: &[QubitId]) -> Vec<Vec<QubitId>> {
    let &[v, h] = qubits else {
        return Vec::new();
    };
    let near = |q: QubitId| -> Vec<QubitId> {
        let QubitId::Pegasus { u, .. } = q else {
            return Vec::new();
        };
        let mut list = vec![q];
        list.extend(
            shape
                .ideal_neighbors(&q)
                .into_iter()
                .filter(|n| matches!(n, QubitId::Pegasus { u: un, .. } if *un == u)),
        );
        list
    };
    let mut out = Vec::new();
    for vv in near(v) {
        for hh in shape.ideal_neighbors(&vv) {
            if matches!(hh, QubitId::Pegasus { u: 1, .. }) {
                out.push(vec![vv, hh]);
            }
        }
    }
    for hh in near(h) {
        for vv in shape.ideal_neighbors(&hh) {
            if matches!(vv, QubitId::Pegasus { u: 0, .. }) {
                out.push(vec![vv, hh]);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Placement {
    pub origin: (u32, u32),
    pub logical: LogicalGraph,
    pub embedding: EmbeddingMap,
    pub report: YieldReport,
}

/// Tries every origin of the cube on `working` and keeps the one with the
/// most embedded sites, then bonds; the first origin wins ties.
pub fn place_cube(spec: LatticeSpec, working: &HardwareGraph, opts: &YieldOptions) -> Result<Placement> {
    let origins = cube_origins(spec, working.shape());
    if origins.is_empty() {
        // Reproduces the constructor's own capacity error.
        embed_cubic_at(spec, working, (0, 0))?;
        return Err(Error::CapacityExceeded(format!("{spec} does not fit {}", working.shape())));
    }
    let mut best: Option<Placement> = None;
    for origin in origins {
        let template = embed_cubic_at(spec, working, origin)?;
        let (logical, embedding, report) = maximize_yield_with(&template, working, opts);
        let key = (report.sites_embedded, report.edges_embedded);
        if best
            .as_ref()
            .is_none_or(|b| key > (b.report.sites_embedded, b.report.edges_embedded))
        {
            let complete = report.is_complete();
            best = Some(Placement {
                origin,
                logical,
                embedding,
                report,
            });
            if complete {
                break;
            }
        }
    }
    Ok(best.expect("at least one origin"))
}
