use std::collections::HashMap;
use std::fmt;

use super::EmbeddingMap;
use crate::lattice::{Axis, LogicalGraph};
use crate::topology::{HardwareGraph, QubitId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Target,
    Disjointness,
    ChainLength,
    ChainConnectivity,
    MissingQubit,
    MissingCoupler,
    ForeignCoupler,
    EdgeCouplerCount,
    WeightShares,
    Coverage,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::Target => "target",
            ViolationKind::Disjointness => "disjointness",
            ViolationKind::ChainLength => "chain length",
            ViolationKind::ChainConnectivity => "chain connectivity",
            ViolationKind::MissingQubit => "missing qubit",
            ViolationKind::MissingCoupler => "missing coupler",
            ViolationKind::ForeignCoupler => "foreign coupler",
            ViolationKind::EdgeCouplerCount => "edge coupler count",
            ViolationKind::WeightShares => "weight shares",
            ViolationKind::Coverage => "coverage",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first() {
            None => f.write_str("pass"),
            Some(v) => write!(f, "fail: {v} ({} violations)", self.violations.len()),
        }
    }
}

/// Checks that `emb` is a valid minor embedding of `logical` into `working`.
/// Violations are reported, never raised.
pub fn validate_embedding(emb: &EmbeddingMap, working: &HardwareGraph, logical: &LogicalGraph) -> ValidationReport {
    use ViolationKind::*;
    let mut report = ValidationReport::default();
    if emb.shape != working.shape() {
        report.push(
            Target,
            format!("embedding targets {} {}, graph is {} {}", emb.family(), emb.shape, working.family(), working.shape()),
        );
    }
    let chain_len = emb.family().chain_length();

    let mut owner: HashMap<QubitId, _> = HashMap::new();
    for (site, chain) in &emb.chains {
        if chain.site != *site {
            report.push(Coverage, format!("chain stored under {site} names {}", chain.site));
        }
        for q in &chain.qubits {
            if let Some(prev) = owner.insert(*q, *site) {
                if prev != *site {
                    report.push(Disjointness, format!("qubit {q} is shared by {prev} and {site}"));
                } else {
                    report.push(Disjointness, format!("qubit {q} repeats within chain {site}"));
                }
            }
            if !working.contains(q) {
                report.push(MissingQubit, format!("qubit {q} of chain {site}"));
            }
        }
        if chain.qubits.len() != chain_len {
            report.push(
                ChainLength,
                format!("chain {site} has {} qubits, expected {chain_len}", chain.qubits.len()),
            );
        }
        for c in &chain.couplers {
            let (a, b) = c.endpoints();
            if !chain.qubits.contains(&a) || !chain.qubits.contains(&b) {
                report.push(ForeignCoupler, format!("chain coupler {c} leaves chain {site}"));
            } else if !working.has_coupler(&a, &b) {
                report.push(MissingCoupler, format!("chain coupler {c} of {site}"));
            }
        }
        if chain.couplers.len() + 1 < chain.qubits.len() || !chain.is_connected() {
            report.push(ChainConnectivity, format!("chain {site} is not connected"));
        }
    }

    for (e, mapped) in &emb.edges {
        let (Some(ca), Some(cb)) = (emb.chains.get(&e.a), emb.chains.get(&e.b)) else {
            report.push(Coverage, format!("bond {e} joins a site without a chain"));
            continue;
        };
        let expected = match e.axis {
            Axis::X | Axis::Y => 1,
            Axis::Z => 2,
        };
        if mapped.len() != expected {
            report.push(
                EdgeCouplerCount,
                format!("{}-bond {e} uses {} couplers, expected {expected}", e.axis.name(), mapped.len()),
            );
        }
        let total: f64 = mapped.iter().map(|(_, w)| w).sum();
        let uniform = mapped.iter().all(|(_, w)| (w - 1.0 / expected as f64).abs() < 1e-12);
        if (total - 1.0).abs() > 1e-12 || !uniform {
            report.push(WeightShares, format!("bond {e} has shares {:?}", mapped.iter().map(|m| m.1).collect::<Vec<_>>()));
        }
        for (c, _) in mapped {
            let (a, b) = c.endpoints();
            let joins = ca.qubits.contains(&a) && cb.qubits.contains(&b) || ca.qubits.contains(&b) && cb.qubits.contains(&a);
            if !joins {
                report.push(ForeignCoupler, format!("coupler {c} of bond {e} does not join its chains"));
            } else if !working.has_coupler(&a, &b) {
                report.push(MissingCoupler, format!("coupler {c} of bond {e}"));
            }
        }
    }

    for s in logical.sites() {
        if !emb.chains.contains_key(s) {
            report.push(Coverage, format!("site {s} has no chain"));
        }
    }
    for e in logical.edges() {
        if !emb.edges.contains_key(e) {
            report.push(Coverage, format!("bond {e} is not mapped"));
        }
    }
    report
}
