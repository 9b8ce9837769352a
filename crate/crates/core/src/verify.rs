//! Self-check suite over the structural invariants of the pipeline.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::embedding::{
    embed_cubic_chimera, embed_cubic_pegasus, physical_energy, set_parameters, validate_embedding, EmbeddingMap,
    DEFAULT_CHAIN_STRENGTH,
};
use crate::lattice::{apply_isometry, build_lattice, enumerate_isometries, generate_instance, logical_energy, Isometry, LatticeSpec, SpinAssignment};
use crate::metrics::tts;
use crate::rng;
use crate::sampler::solve_exact;
use crate::topology::{build_chimera, build_pegasus, graph_stats, Family, HardwareGraph};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<20} {:>8.2}s  {}", self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

type Check = fn() -> Result<String, String>;

/// The checks run by [`run_suite`], in order.
pub const CHECKS: [(&str, Check); 6] = [
    ("topology-counts", check_topology_counts),
    ("capacity", check_capacity),
    ("chain-strength", check_chain_strength),
    ("coupling-values", check_coupling_values),
    ("tts-identities", check_tts_identities),
    ("isometries", check_isometries),
];

pub fn run_check(name: &'static str, check: Check) -> CheckOutcome {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckOutcome {
        name,
        passed,
        detail,
        elapsed,
    }
}

pub fn run_suite() -> Vec<CheckOutcome> {
    CHECKS.iter().map(|&(name, check)| run_check(name, check)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn check_topology_counts() -> Result<String, String> {
    let c = build_chimera(16, 16, 4).map_err(|e| e.to_string())?;
    ensure(c.num_qubits() == 2048 && c.num_couplers() == 6016, || {
        format!("chimera(16,16,4): {} qubits, {} couplers", c.num_qubits(), c.num_couplers())
    })?;
    let p = build_pegasus(16).map_err(|e| e.to_string())?;
    let stats = graph_stats(&p);
    ensure(p.num_qubits() == 5640 && p.max_degree() == 15 && !stats.bipartite, || {
        format!(
            "pegasus(16): {} qubits, max degree {}, bipartite {}",
            p.num_qubits(),
            p.max_degree(),
            stats.bipartite
        )
    })?;
    Ok(format!(
        "chimera 2048/6016, pegasus {}/{} max degree 15, non-bipartite",
        p.num_qubits(),
        p.num_couplers()
    ))
}

fn embed(spec: LatticeSpec, g: &HardwareGraph) -> crate::Result<EmbeddingMap> {
    match g.family() {
        Family::Chimera => embed_cubic_chimera(spec, g),
        Family::Pegasus => embed_cubic_pegasus(spec, g),
    }
}

fn check_valid(spec: LatticeSpec, g: &HardwareGraph) -> Result<(), String> {
    let emb = embed(spec, g).map_err(|e| format!("{spec} on {}: {e}", g.family()))?;
    let report = validate_embedding(&emb, g, &build_lattice(spec));
    ensure(report.passed(), || format!("{spec} on {}: {report}", g.family()))
}

pub fn check_capacity() -> Result<String, String> {
    let c = build_chimera(16, 16, 4).map_err(|e| e.to_string())?;
    let mut ok = 0;
    for l1 in 1..=8 {
        for l2 in 1..=8 {
            for l3 in 1..=8 {
                check_valid(LatticeSpec::new(l1, l2, l3).unwrap(), &c)?;
                ok += 1;
            }
        }
    }
    for spec in [(9, 8, 8), (8, 9, 8), (8, 8, 9), (9, 1, 1), (1, 1, 9)] {
        let spec = LatticeSpec::new(spec.0, spec.1, spec.2).unwrap();
        ensure(embed_cubic_chimera(spec, &c).is_err(), || format!("chimera accepted {spec}"))?;
    }
    let p = build_pegasus(16).map_err(|e| e.to_string())?;
    check_valid(LatticeSpec::new(15, 15, 12).unwrap(), &p)?;
    for spec in [(16, 15, 12), (15, 16, 12), (15, 15, 13)] {
        let spec = LatticeSpec::new(spec.0, spec.1, spec.2).unwrap();
        ensure(embed_cubic_pegasus(spec, &p).is_err(), || format!("pegasus accepted {spec}"))?;
    }
    Ok(format!("{ok} chimera specs and pegasus (15,15,12) valid; oversized specs rejected"))
}

pub fn check_chain_strength() -> Result<String, String> {
    let cases = [
        (LatticeSpec::new(2, 2, 1).unwrap(), build_chimera(16, 16, 4).unwrap()),
        (LatticeSpec::new(2, 2, 2).unwrap(), build_pegasus(16).unwrap()),
    ];
    let mut confirmed = 0;
    for (spec, g) in &cases {
        let emb = embed(*spec, g).map_err(|e| e.to_string())?;
        let lattice = build_lattice(*spec);
        for i in 0..20 {
            let seed = rng::derive_seed(0, "verify-chain", &[i]);
            let inst = generate_instance(&lattice, seed).map_err(|e| e.to_string())?;
            let p = set_parameters(&inst, &emb, DEFAULT_CHAIN_STRENGTH).map_err(|e| e.to_string())?;
            let physical = solve_exact(&p).map_err(|e| e.to_string())?;
            let logical = solve_exact(&inst).map_err(|e| e.to_string())?;
            let shifted = logical.energy + p.offset;
            ensure((physical.energy - shifted).abs() < 1e-9, || {
                format!("{} instance {i}: physical min {} != logical min + C = {shifted}", g.family(), physical.energy)
            })?;
            // An unbroken physical optimum: the embedded logical optimum.
            let lifted = p.embed_state(&SpinAssignment(logical.assignment.clone()));
            let e = physical_energy(&p, &lifted).map_err(|e| e.to_string())?;
            ensure((e - physical.energy).abs() < 1e-9, || {
                format!("{} instance {i}: no unbroken optimum", g.family())
            })?;
            confirmed += 1;
        }
    }
    Ok(format!("{confirmed}/40 instances with an unbroken ground state"))
}

pub fn check_coupling_values() -> Result<String, String> {
    let spec = LatticeSpec::cube(4).unwrap();
    let lattice = build_lattice(spec);
    let mut checked = 0;
    for g in [build_chimera(16, 16, 4).unwrap(), build_pegasus(16).unwrap()] {
        let emb = embed(spec, &g).map_err(|e| e.to_string())?;
        let z_couplers: BTreeSet<_> = emb
            .edges
            .iter()
            .filter(|(e, _)| e.axis == crate::lattice::Axis::Z)
            .flat_map(|(_, m)| m.iter().map(|(c, _)| *c))
            .collect();
        for i in 0..100 {
            let inst = generate_instance(&lattice, rng::derive_seed(0, "verify-values", &[i])).map_err(|e| e.to_string())?;
            let p = set_parameters(&inst, &emb, DEFAULT_CHAIN_STRENGTH).map_err(|e| e.to_string())?;
            for (c, &v) in &p.values {
                ensure((-2.0..=1.0).contains(&v), || format!("{c} = {v}"))?;
                if p.chain_couplers.contains(c) {
                    ensure(v == -2.0, || format!("chain coupler {c} = {v}"))?;
                } else if z_couplers.contains(c) {
                    ensure(v.abs() == 0.5, || format!("z coupler {c} = {v}"))?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} embedded problems within [-2, 1]"))
}

pub fn check_tts_identities() -> Result<String, String> {
    for e in [0.5, 1.0, 2.0, 37.0, 256.0, 1e6] {
        let v = tts(e, 0.99).map_err(|x| x.to_string())?.value().unwrap();
        ensure(((v - e) / e).abs() < 1e-12, || format!("tts({e}, 0.99) = {v}"))?;
    }
    let v = tts(2.0, 0.5).map_err(|x| x.to_string())?.value().unwrap();
    ensure((v - 13.287_712_38).abs() < 1e-6, || format!("tts(2, 0.5) = {v}"))?;
    let mut prev = f64::INFINITY;
    for i in 1..=1000 {
        let p = f64::from(i) / 1001.0;
        let v = tts(10.0, p).map_err(|x| x.to_string())?.value().unwrap();
        ensure(v < prev, || format!("tts not decreasing at p = {p}"))?;
        prev = v;
    }
    Ok("unit identity, reference value and 1000-point monotonicity hold".into())
}

pub fn check_isometries() -> Result<String, String> {
    let group = enumerate_isometries();
    let set: BTreeSet<Isometry> = group.iter().copied().collect();
    ensure(group.len() == 48 && set.len() == 48, || format!("{} isometries, {} distinct", group.len(), set.len()))?;
    ensure(group[0] == Isometry::IDENTITY, || "first isometry is not the identity".into())?;
    for a in &group {
        ensure(set.contains(&a.inverse()), || format!("inverse of {a:?} missing"))?;
        ensure(a.compose(&a.inverse()) == Isometry::IDENTITY, || format!("{a:?} times its inverse"))?;
        for b in &group {
            ensure(set.contains(&a.compose(b)), || format!("{a:?} ∘ {b:?} leaves the group"))?;
        }
    }
    let lattice = build_lattice(LatticeSpec::cube(2).unwrap());
    for i in 0..5 {
        let inst = generate_instance(&lattice, rng::derive_seed(0, "verify-iso", &[i])).map_err(|e| e.to_string())?;
        let reference = spectrum(&inst);
        for g in &group {
            let image = apply_isometry(&inst, g).map_err(|e| e.to_string())?;
            ensure(spectrum(&image) == reference, || format!("instance {i}: spectrum changes under {g:?}"))?;
        }
    }
    Ok("order 48, closed under composition and inverse; 5 spectra invariant".into())
}

fn spectrum(inst: &crate::lattice::Instance) -> Vec<i64> {
    let n = inst.num_spins();
    let mut out: Vec<i64> = (0..1u64 << n)
        .map(|b| logical_energy(inst, &SpinAssignment::from_bits(n, b)).unwrap() as i64)
        .collect();
    out.sort_unstable();
    out
}
