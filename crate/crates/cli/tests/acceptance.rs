//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Reference values are recomputed here from first principles (closed-form
//! counts, brute-force enumeration, hand-written formulas) rather than taken
//! from the library under test.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use glassbench::embedding::{embed_cubic_chimera, embed_cubic_pegasus, set_parameters, validate_embedding, EmbeddedProblem, EmbeddingMap};
use glassbench::lattice::{build_lattice, enumerate_isometries, generate_instance, Axis, Instance, Isometry, LatticeSpec, Site};
use glassbench::metrics::{run_protocol, tts, BatchSampler, ProtocolConfig, Tts};
use glassbench::sampler::{GroundTruthRegistry, LogicalOutcome};
use glassbench::topology::{build_chimera, build_pegasus, HardwareGraph};
use glassbench::{apply_isometry, Family};
use glassbench_cli::config::ExperimentConfig;
use glassbench_cli::experiment;
use glassbench_cli::output::{read_csv, read_manifest};
use rand::{Rng, SeedableRng};
use serde::Deserialize;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn is_bipartite(g: &HardwareGraph) -> bool {
    let index: HashMap<_, _> = g.qubits().iter().enumerate().map(|(i, q)| (*q, i)).collect();
    let mut adj = vec![Vec::new(); g.num_qubits()];
    for c in g.couplers() {
        let (a, b) = c.endpoints();
        adj[index[&a]].push(index[&b]);
        adj[index[&b]].push(index[&a]);
    }
    let mut color = vec![u8::MAX; adj.len()];
    for start in 0..adj.len() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

fn criterion_1() -> Result<String, String> {
    let t = Instant::now();
    let chimera = build_chimera(16, 16, 4).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1), "chimera build")?;
    // Closed form: complete bipartite cells plus vertical and horizontal inter-cell lines.
    let (m, n, k) = (16usize, 16usize, 4usize);
    let qubits = 2 * m * n * k;
    let couplers = m * n * k * k + (m - 1) * n * k + m * (n - 1) * k;
    ensure(chimera.num_qubits() == qubits && chimera.num_couplers() == couplers, || {
        format!("chimera {} qubits {} couplers", chimera.num_qubits(), chimera.num_couplers())
    })?;
    ensure((qubits, couplers) == (2048, 6016), || "closed form disagrees with 2048/6016".into())?;

    let t = Instant::now();
    let pegasus = build_pegasus(16).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1), "pegasus build")?;
    let max_degree = pegasus.qubits().iter().map(|q| pegasus.degree(q)).max().unwrap_or(0);
    ensure(pegasus.num_qubits() == 5640 && max_degree == 15, || {
        format!("pegasus {} qubits, max degree {max_degree}", pegasus.num_qubits())
    })?;
    ensure(is_bipartite(&chimera), || "chimera should be bipartite".into())?;
    ensure(!is_bipartite(&pegasus), || "pegasus should not be bipartite".into())?;
    Ok(format!(
        "chimera 2048/6016, pegasus {} qubits {} couplers max degree 15, odd cycle found",
        pegasus.num_qubits(),
        pegasus.num_couplers()
    ))
}

fn axis_of(a: &Site, b: &Site) -> Axis {
    if a.x != b.x {
        Axis::X
    } else if a.y != b.y {
        Axis::Y
    } else {
        Axis::Z
    }
}

/// Structural checks written against the embedding data directly.
fn check_structure(emb: &EmbeddingMap, chain_len: usize) -> Result<(), String> {
    let spec = emb.spec;
    ensure(emb.chains.len() == spec.num_sites(), || "missing chains".into())?;
    let mut used = BTreeSet::new();
    for chain in emb.chains.values() {
        ensure(chain.qubits.len() == chain_len, || format!("chain of length {}", chain.qubits.len()))?;
        for q in &chain.qubits {
            ensure(used.insert(*q), || format!("qubit {q:?} in two chains"))?;
        }
    }
    ensure(emb.edges.len() == spec.num_edges(), || "missing bonds".into())?;
    for (e, couplers) in &emb.edges {
        let want = if axis_of(&e.a, &e.b) == Axis::Z { vec![0.5, 0.5] } else { vec![1.0] };
        let shares: Vec<f64> = couplers.iter().map(|(_, s)| *s).collect();
        ensure(shares == want, || format!("bond {e:?} has shares {shares:?}"))?;
    }
    Ok(())
}

fn criterion_2() -> Result<String, String> {
    let t = Instant::now();
    let chimera = build_chimera(16, 16, 4).map_err(|e| e.to_string())?;
    let mut ok = 0;
    for l1 in 1..=8 {
        for l2 in 1..=8 {
            for l3 in 1..=8 {
                let spec = LatticeSpec::new(l1, l2, l3).unwrap();
                let emb = embed_cubic_chimera(spec, &chimera).map_err(|e| format!("{spec}: {e}"))?;
                let report = validate_embedding(&emb, &chimera, &build_lattice(spec));
                ensure(report.passed(), || format!("{spec}: {report}"))?;
                check_structure(&emb, 4).map_err(|e| format!("{spec}: {e}"))?;
                ok += 1;
            }
        }
    }
    for spec in [(9, 1, 1), (1, 9, 1), (1, 1, 9), (9, 9, 9)] {
        let spec = LatticeSpec::new(spec.0, spec.1, spec.2).unwrap();
        ensure(embed_cubic_chimera(spec, &chimera).is_err(), || format!("chimera accepted {spec}"))?;
    }
    let pegasus = build_pegasus(16).map_err(|e| e.to_string())?;
    let spec = LatticeSpec::new(15, 15, 12).unwrap();
    let emb = embed_cubic_pegasus(spec, &pegasus).map_err(|e| e.to_string())?;
    let report = validate_embedding(&emb, &pegasus, &build_lattice(spec));
    ensure(report.passed(), || format!("pegasus 15x15x12: {report}"))?;
    check_structure(&emb, 2)?;
    for (a, b, c) in [(16, 15, 12), (15, 16, 12), (15, 15, 13)] {
        let spec = LatticeSpec::new(a, b, c).unwrap();
        ensure(embed_cubic_pegasus(spec, &pegasus).is_err(), || format!("pegasus accepted {spec}"))?;
    }
    within(t.elapsed(), Duration::from_secs(5), "capacity suite")?;
    Ok(format!("{ok} chimera specs and pegasus 15x15x12 valid, oversize rejected"))
}

/// Brute-force minimum of the physical problem, and whether some minimizer
/// has every chain unbroken.
fn physical_minimum(p: &EmbeddedProblem) -> (f64, bool) {
    let n = p.qubits.len();
    let terms: Vec<(usize, usize, f64)> = p
        .values
        .iter()
        .map(|(c, &v)| {
            let (a, b) = c.endpoints();
            (p.qubit_index(&a).unwrap(), p.qubit_index(&b).unwrap(), v)
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut unbroken_at_best = false;
    for bits in 0u32..(1 << n) {
        let s = |i: usize| if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
        let e: f64 = terms.iter().map(|&(a, b, v)| v * s(a) * s(b)).sum();
        let intact = p.chain_members.iter().all(|m| m.iter().all(|&i| s(i) == s(m[0])));
        if e < best - 1e-9 {
            best = e;
            unbroken_at_best = intact;
        } else if (e - best).abs() <= 1e-9 {
            unbroken_at_best |= intact;
        }
    }
    (best, unbroken_at_best)
}

fn logical_minimum(inst: &Instance) -> f64 {
    let g = inst.graph();
    let n = g.sites().len();
    (0u32..(1 << n))
        .map(|bits| {
            g.edge_ends()
                .iter()
                .zip(inst.couplings())
                .map(|(&(a, b), &j)| {
                    let sa = if bits >> a & 1 == 1 { 1.0 } else { -1.0 };
                    let sb = if bits >> b & 1 == 1 { 1.0 } else { -1.0 };
                    f64::from(j) * sa * sb
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_3() -> Result<String, String> {
    let t = Instant::now();
    let cases = [
        (build_chimera(16, 16, 4).unwrap(), LatticeSpec::new(2, 2, 1).unwrap()),
        (build_pegasus(16).unwrap(), LatticeSpec::new(2, 2, 2).unwrap()),
    ];
    let mut passed = 0;
    for (graph, spec) in &cases {
        let emb = match graph.family() {
            Family::Chimera => embed_cubic_chimera(*spec, graph),
            Family::Pegasus => embed_cubic_pegasus(*spec, graph),
        }
        .map_err(|e| e.to_string())?;
        let lattice = build_lattice(*spec);
        for i in 0..20u64 {
            let inst = generate_instance(&lattice, 1000 + i).map_err(|e| e.to_string())?;
            let p = set_parameters(&inst, &emb, 2.0).map_err(|e| e.to_string())?;
            ensure(p.qubits.len() == 16, || format!("{} physical qubits", p.qubits.len()))?;
            let chain_offset: f64 = -2.0 * p.chain_couplers.len() as f64;
            let (phys, unbroken) = physical_minimum(&p);
            let logical = logical_minimum(&inst);
            ensure((phys - (logical + chain_offset)).abs() < 1e-9, || {
                format!("{} seed {i}: physical {phys}, logical {logical}, C {chain_offset}", graph.family())
            })?;
            ensure((p.offset - chain_offset).abs() < 1e-9, || format!("offset {} vs {chain_offset}", p.offset))?;
            ensure(unbroken, || format!("{} seed {i}: no unbroken optimum", graph.family()))?;
            passed += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(120), "chain-strength enumeration")?;
    Ok(format!("{passed}/40 instances have an unbroken optimum at E_logical + C"))
}

fn criterion_4() -> Result<String, String> {
    let spec = LatticeSpec::cube(4).unwrap();
    let lattice = build_lattice(spec);
    let mut checked = 0;
    for graph in [build_chimera(16, 16, 4).unwrap(), build_pegasus(16).unwrap()] {
        let emb = match graph.family() {
            Family::Chimera => embed_cubic_chimera(spec, &graph),
            Family::Pegasus => embed_cubic_pegasus(spec, &graph),
        }
        .map_err(|e| e.to_string())?;
        let z_couplers: BTreeSet<_> = emb
            .edges
            .iter()
            .filter(|(e, _)| axis_of(&e.a, &e.b) == Axis::Z)
            .flat_map(|(_, cs)| cs.iter().map(|(c, _)| *c))
            .collect();
        for i in 0..100u64 {
            let inst = generate_instance(&lattice, 7000 + i).map_err(|e| e.to_string())?;
            let p = set_parameters(&inst, &emb, 2.0).map_err(|e| e.to_string())?;
            for (c, &v) in &p.values {
                ensure((-2.0..=1.0).contains(&v), || format!("value {v} out of range"))?;
                if p.chain_couplers.contains(c) {
                    ensure(v == -2.0, || format!("chain coupler {v}"))?;
                } else if z_couplers.contains(c) {
                    ensure(v == 0.5 || v == -0.5, || format!("z coupler {v}"))?;
                } else {
                    ensure(v == 1.0 || v == -1.0, || format!("x/y coupler {v}"))?;
                }
            }
            ensure(!p.chain_couplers.is_empty() && z_couplers.iter().all(|c| p.values.contains_key(c)), || {
                "z couplers not programmed".into()
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} embedded problems within [-2, 1], chains -2, z bonds ±0.5"))
}

fn criterion_5() -> Result<String, String> {
    let value = |e: f64, p: f64| tts(e, p).map_err(|e| e.to_string());
    for e in [1.0, 2.0, 7.5, 256.0, 1e6] {
        let v = value(e, 0.99)?.value().unwrap();
        ensure(((v - e) / e).abs() <= 1e-12, || format!("tts({e}, 0.99) = {v}"))?;
    }
    let v = value(2.0, 0.5)?.value().unwrap();
    let oracle = 2.0 * 0.01f64.ln() / 0.5f64.ln();
    ensure((v - 13.287_712_38).abs() < 1e-6 && (v - oracle).abs() < 1e-9, || format!("tts(2, 0.5) = {v}"))?;
    let mut prev = f64::INFINITY;
    for k in 1..=1000 {
        let p = k as f64 / 1000.0;
        let v = value(10.0, p)?.value().unwrap();
        ensure(v <= prev, || format!("not monotone at p = {p}"))?;
        prev = v;
    }
    ensure(value(10.0, 0.0)? == Tts::Unsolved, || "p = 0 must be unsolved".into())?;
    Ok(format!("tts(e, 0.99) = e, tts(2, 0.5) = {v:.8}, monotone on 1000 points"))
}

/// Bernoulli reads with a fixed success probability.
struct Stub {
    p: f64,
    seed: u64,
}

impl BatchSampler for Stub {
    fn sample_batch(&self, effort: u32, batch: u32, reads: u32) -> LogicalOutcome {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(effort) << 32) ^ u64::from(batch));
        let hits = (0..reads).filter(|_| rng.gen_bool(self.p)).count() as u32;
        let mut energies = Vec::new();
        if hits > 0 {
            energies.push((-1.0, hits));
        }
        if hits < reads {
            energies.push((0.0, reads - hits));
        }
        let best = if hits > 0 { (-1.0, vec![1]) } else { (0.0, vec![-1]) };
        LogicalOutcome {
            energies,
            best: Some(best),
            broken_fraction: 0.0,
        }
    }
}

fn criterion_6() -> Result<String, String> {
    let cfg = ProtocolConfig {
        ladder: vec![1],
        batch_size: 500,
        target_hits: 50,
        max_batches: 20,
    };
    let (mut single, mut reads, mut hits) = (0, 0u64, 0u64);
    for trial in 0..200u64 {
        let mut registry = GroundTruthRegistry::new();
        let id = format!("stub{trial}");
        registry.offer(&id, -1.0, &[1], glassbench::sampler::Provenance::Exact);
        let stub = Stub { p: 0.1, seed: 0x5EED_0000 + trial };
        let (run, curve) = run_protocol(&id, &stub, &mut registry, &cfg).map_err(|e| e.to_string())?;
        let batches = run.efforts[0].batches.len();
        if batches == 1 {
            single += 1;
        }
        let est = &curve.points[0].estimate;
        ensure(est.reads == 500 * batches as u64, || "reads do not match batch count".into())?;
        reads += est.reads;
        hits += est.hits;
    }
    let p_hat = hits as f64 / reads as f64;
    let frac = single as f64 / 200.0;
    ensure(frac >= 0.45, || format!("only {single}/200 trials stopped after one batch"))?;
    ensure(reads >= 10_000 && (p_hat - 0.1).abs() <= 0.01, || format!("pooled p = {p_hat} over {reads} reads"))?;
    Ok(format!("{single}/200 single-batch runs, pooled p = {p_hat:.4} over {reads} reads"))
}

fn act(g: &Isometry, s: &Site, side: u32) -> Site {
    g.apply_site(s, side)
}

fn criterion_7() -> Result<String, String> {
    let t = Instant::now();
    let group = enumerate_isometries();
    ensure(group.len() == 48, || format!("{} isometries", group.len()))?;
    // Compare group structure through the action on a 3x3x3 cube.
    let side = 3;
    let points: Vec<Site> = (0..27).map(|i| Site::from([i % 3, i / 3 % 3, i / 9])).collect();
    let action = |g: &Isometry| points.iter().map(|s| act(g, s, side)).collect::<Vec<_>>();
    let actions: BTreeSet<Vec<Site>> = group.iter().map(action).collect();
    ensure(actions.len() == 48, || "isometries do not act distinctly".into())?;
    for g in &group {
        for h in &group {
            let composed = g.compose(h);
            ensure(group.contains(&composed), || format!("{g:?}∘{h:?} not in group"))?;
            let by_hand: Vec<Site> = points.iter().map(|s| act(g, &act(h, s, side), side)).collect();
            ensure(action(&composed) == by_hand, || format!("compose mismatch for {g:?} {h:?}"))?;
        }
        let inv = g.inverse();
        ensure(group.contains(&inv) && points.iter().all(|s| act(g, &act(&inv, s, side), side) == *s), || {
            format!("bad inverse for {g:?}")
        })?;
    }
    let lattice = build_lattice(LatticeSpec::cube(2).unwrap());
    for i in 0..5u64 {
        let inst = generate_instance(&lattice, 500 + i).map_err(|e| e.to_string())?;
        let reference = spectrum(&inst);
        for g in &group {
            let image = apply_isometry(&inst, g).map_err(|e| e.to_string())?;
            ensure(spectrum(&image) == reference, || format!("spectrum changed under {g:?}"))?;
        }
    }
    within(t.elapsed(), Duration::from_secs(30), "isometry suite")?;
    Ok("order 48, closed under composition and inverse, 5 spectra invariant".into())
}

/// Sorted energies of all 2^n states, as integers.
fn spectrum(inst: &Instance) -> Vec<i64> {
    let g = inst.graph();
    let n = g.sites().len();
    let mut out: Vec<i64> = (0u32..(1 << n))
        .map(|bits| {
            g.edge_ends()
                .iter()
                .zip(inst.couplings())
                .map(|(&(a, b), &j)| {
                    let same = (bits >> a & 1) == (bits >> b & 1);
                    i64::from(j) * if same { 1 } else { -1 }
                })
                .sum()
        })
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Deserialize)]
struct ScalingCsv {
    #[serde(rename = "L")]
    size: u32,
    n_unsolved: u32,
    median: Option<f64>,
}

fn read_scaling(out: &Path, family: Family) -> Result<Vec<ScalingCsv>, String> {
    read_csv(&out.join(format!("summary/scaling_{}.csv", family.name()))).map_err(|e| format!("{e:#}"))
}

/// Batch cap per effort for the scaling run; see the README.
const SCALING_MAX_BATCHES: u32 = 4;

fn criterion_8() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig {
        sizes: vec![3, 4, 5, 6],
        instances: 20,
        out: dir.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    cfg.protocol.max_batches = SCALING_MAX_BATCHES;
    let t = Instant::now();
    experiment::run_scaling(&cfg).map_err(|e| format!("{e:#}"))?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(30 * 60), "scaling run")?;
    let mut medians = BTreeMap::new();
    for family in [Family::Chimera, Family::Pegasus] {
        let rows = read_scaling(dir.path(), family)?;
        let sizes: Vec<u32> = rows.iter().map(|r| r.size).collect();
        ensure(sizes == [3, 4, 5, 6], || format!("{family} rows for sizes {sizes:?}"))?;
        let m: Vec<f64> = rows.iter().map(|r| r.median.unwrap_or(f64::INFINITY)).collect();
        let unsolved: u32 = rows.iter().map(|r| r.n_unsolved).sum();
        ensure(m.windows(2).all(|w| w[0] <= w[1]), || format!("{family} medians not monotone: {m:?}"))?;
        medians.insert(family, (m, unsolved));
    }
    let chimera6 = medians[&Family::Chimera].0[3];
    let pegasus6 = medians[&Family::Pegasus].0[3];
    let directional = if pegasus6 <= chimera6 { "holds" } else { "FAILS (finding)" };
    let fmt = |m: &[f64]| m.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
    Ok(format!(
        "{:.0}s; chimera medians {} ({} unsolved); pegasus medians {} ({} unsolved); pegasus <= chimera at L=6 {directional}",
        elapsed.as_secs_f64(),
        fmt(&medians[&Family::Chimera].0),
        medians[&Family::Chimera].1,
        fmt(&medians[&Family::Pegasus].0),
        medians[&Family::Pegasus].1,
    ))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glassbench"))
}

fn run_bin(args: &[&str]) -> Result<(), String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n != "manifest.json") {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn criterion_9() -> Result<String, String> {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| root.path().join(name).to_string_lossy().into_owned();
    let mut compared = 0;
    for run in ["a", "b"] {
        run_bin(&["scaling", "--seed", "11", "--sizes", "3", "--instances", "3", "--max-batches", "2", "--out", &path(&format!("scaling_{run}"))])?;
        run_bin(&["isometry", "--seed", "11", "--sizes", "2", "--instances", "2", "--effort", "8", "--out", &path(&format!("iso_{run}"))])?;
        run_bin(&["gen", "--seed", "11", "--size", "4", "--out", &path(&format!("gen_{run}.json"))])?;
        run_bin(&["embed", "--seed", "11", "--size", "4", "--family", "pegasus", "--shape", "16", "--out", &path(&format!("emb_{run}.json"))])?;
        run_bin(&["solve", "--seed", "11", "--instance", &path(&format!("gen_{run}.json")), "--effort", "16", "--reads", "50", "--out", &path(&format!("solve_{run}.jsonl"))])?;
    }
    for stage in ["scaling", "iso"] {
        let a = read_manifest(&root.path().join(format!("{stage}_a"))).map_err(|e| format!("{e:#}"))?;
        let b = read_manifest(&root.path().join(format!("{stage}_b"))).map_err(|e| format!("{e:#}"))?;
        ensure(!a.files.is_empty() && a.files == b.files, || format!("{stage} manifests differ"))?;
        let bytes_a = dir_bytes(&root.path().join(format!("{stage}_a")));
        ensure(bytes_a == dir_bytes(&root.path().join(format!("{stage}_b"))), || format!("{stage} outputs differ"))?;
        compared += a.files.len();
    }
    for file in ["gen", "emb", "solve"] {
        let ext = if file == "solve" { "jsonl" } else { "json" };
        let a = std::fs::read(path(&format!("{file}_a.{ext}"))).map_err(|e| e.to_string())?;
        let b = std::fs::read(path(&format!("{file}_b.{ext}"))).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{file} output differs"))?;
        compared += 1;
    }
    // Re-running into an existing output directory reproduces it.
    run_bin(&["scaling", "--seed", "11", "--sizes", "3", "--instances", "3", "--max-batches", "2", "--out", &path("scaling_a")])?;
    let again = read_manifest(&root.path().join("scaling_a")).map_err(|e| format!("{e:#}"))?;
    let fresh = read_manifest(&root.path().join("scaling_b")).map_err(|e| format!("{e:#}"))?;
    ensure(again.files == fresh.files, || "rerun in place changed outputs".into())?;
    Ok(format!("{compared} files byte-identical across reruns"))
}

fn criterion_10() -> Result<String, String> {
    let t = Instant::now();
    let out = bin().arg("verify").output().map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), || format!("exit {:?}: {stdout}", out.status.code()))?;
    let passes = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    ensure(passes == 6 && !stdout.contains("FAIL"), || format!("unexpected report: {stdout}"))?;
    within(elapsed, Duration::from_secs(300), "verify")?;
    Ok(format!("6 checks passed, exit 0 in {:.1}s", elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("topology counts", criterion_1),
        ("embedding capacity", criterion_2),
        ("unbroken ground state at chain strength 2", criterion_3),
        ("programmed coupling values", criterion_4),
        ("tts identities", criterion_5),
        ("batch protocol fidelity", criterion_6),
        ("cube isometries", criterion_7),
        ("desk-scale scaling", criterion_8),
        ("determinism", criterion_9),
        ("verify command", criterion_10),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match &result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
