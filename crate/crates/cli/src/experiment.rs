use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use glassbench::embedding::{place_cube, set_parameters, EmbeddedProblem, EmbeddingMap, Placement, YieldOptions};
use glassbench::lattice::{apply_isometry, build_lattice, enumerate_isometries, generate_instance, Instance, Isometry, LatticeSpec, LogicalGraph, SpinAssignment};
use glassbench::metrics::{
    aggregate, isometry_consistency, ratio_histogram, select_optimal, speedup_pairs, AnnealingSampler, BatchSampler, InstanceResult,
    ProtocolConfig, ProtocolRun, TtsCurve,
};
use glassbench::rng::derive_seed;
use glassbench::sampler::{solve_exact, GroundTruthRegistry, LogicalOutcome, Provenance, SamplerConfig, SamplerKind, ENUMERATION_CAP};
use glassbench::topology::{apply_defects, build_ideal, sample_defect_mask, Family, HardwareGraph};
use glassbench::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, TopologyConfig};
use crate::output::{self, sha256_hex, write_csv, write_json, write_jsonl};

pub const QUANTILE_NOTE: &str =
    "quantiles by linear interpolation between order statistics (type 7) over solved instances; tts in sweeps";

fn family_tag(f: Family) -> u64 {
    match f {
        Family::Chimera => 0,
        Family::Pegasus => 1,
    }
}

pub struct Topology {
    pub config: TopologyConfig,
    pub working: HardwareGraph,
}

/// Builds each configured working graph and saves it under `graphs/`.
pub fn prepare_topologies(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<Topology>> {
    let mut list = Vec::new();
    for t in &cfg.topologies {
        let ideal = build_ideal(t.parsed_shape()?)?;
        let seed = derive_seed(cfg.seed, "defects", &[family_tag(t.family)]);
        let mask = sample_defect_mask(&ideal, t.defect_qubits, t.defect_couplers, seed)?;
        let working = apply_defects(&ideal, &mask)?;
        working.save(&out.join("graphs").join(format!("{}.json", t.family)))?;
        list.push(Topology {
            config: t.clone(),
            working,
        });
    }
    Ok(list)
}

fn yield_options(cfg: &ExperimentConfig, family: Family, size: u32) -> YieldOptions {
    YieldOptions {
        seed: derive_seed(cfg.seed, "yield", &[family_tag(family), u64::from(size)]),
        passes: 20,
    }
}

fn anneal_template(cfg: &ExperimentConfig, seed: u64) -> SamplerConfig {
    SamplerConfig {
        kind: SamplerKind::SaPhysical,
        effort: 1,
        reads: 1,
        seed,
        beta_min: cfg.anneal.beta_min,
        beta_max: cfg.anneal.beta_max,
        schedule: cfg.anneal.schedule,
    }
}

fn load_registry(out: &Path) -> anyhow::Result<GroundTruthRegistry> {
    let path = out.join("registry.json");
    if path.exists() {
        Ok(GroundTruthRegistry::load(&path)?)
    } else {
        Ok(GroundTruthRegistry::new())
    }
}

/// Registry holding only the entry for `id`, seeded exactly when feasible.
fn local_registry(global: &GroundTruthRegistry, instance: &Instance) -> anyhow::Result<GroundTruthRegistry> {
    let mut local = GroundTruthRegistry::new();
    if let Some(e) = global.get(instance.id()) {
        local.offer(instance.id(), e.energy, &e.witness, e.provenance);
    }
    if instance.num_spins() <= ENUMERATION_CAP && local.get(instance.id()).is_none_or(|e| e.provenance != Provenance::Exact) {
        let exact = solve_exact(instance)?;
        local.offer(instance.id(), exact.energy, &exact.assignment, Provenance::Exact);
    }
    Ok(local)
}

/// Extends every run until a full round leaves the registry unchanged.
fn settle(runs: &mut [(ProtocolRun, &dyn BatchSampler)], registry: &mut GroundTruthRegistry, protocol: &ProtocolConfig) -> anyhow::Result<()> {
    loop {
        let mut improved = false;
        for (run, sampler) in runs.iter_mut() {
            improved |= run.extend(*sampler, registry, protocol)?;
        }
        if !improved {
            return Ok(());
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunCache {
    fingerprint: String,
    runs: Vec<ProtocolRun>,
}

fn load_cache(path: &Path, fingerprint: &str) -> Option<Vec<ProtocolRun>> {
    let text = std::fs::read_to_string(path).ok()?;
    let cache: RunCache = serde_json::from_str(&text).ok()?;
    (cache.fingerprint == fingerprint).then_some(cache.runs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub size: u32,
    pub index: u32,
    pub t_opt: Option<u32>,
    pub tts_opt: Option<f64>,
    pub solved: bool,
    pub ground_energy: f64,
    pub budget_exhausted: bool,
    pub broken_fraction: f64,
}

impl ResultRow {
    pub fn to_result(&self) -> InstanceResult {
        InstanceResult {
            instance_id: self.instance_id.clone(),
            t_opt: self.t_opt,
            tts_opt: self.tts_opt,
            solved: self.solved,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct BatchLine<'a> {
    instance_id: &'a str,
    effort: u32,
    batch: u32,
    reads: u64,
    hits: u64,
    p_hat: f64,
    broken_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "L")]
    pub size: u32,
    pub n_instances: usize,
    pub n_unsolved: usize,
    pub p10: Option<f64>,
    pub p25: Option<f64>,
    pub median: Option<f64>,
    pub p75: Option<f64>,
    pub p90: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub family: Family,
    pub size: u32,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
struct YieldRecord {
    family: Family,
    size: u32,
    origin: (u32, u32),
    sites_embedded: usize,
    sites_total: usize,
    edges_embedded: usize,
    edges_total: usize,
    shared_sites: usize,
    shared_edges: usize,
}

struct InstanceOutcome {
    registry: GroundTruthRegistry,
    per_family: Vec<(Family, ProtocolRun, TtsCurve, ResultRow)>,
}

#[derive(Clone, Debug, Default)]
pub struct ScalingReport {
    pub summaries: BTreeMap<Family, Vec<SummaryRow>>,
    pub skipped: Vec<SkipRecord>,
    pub out: PathBuf,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

/// Scaling study: every configured size on every topology that can hold
/// it, with instances shared between topologies.
pub fn run_scaling(cfg: &ExperimentConfig) -> anyhow::Result<ScalingReport> {
    cfg.validate()?;
    with_pool(cfg.threads, || scaling_inner(cfg))?
}

fn scaling_inner(cfg: &ExperimentConfig) -> anyhow::Result<ScalingReport> {
    let started = output::unix_now();
    let out = cfg.out.clone();
    output::create_layout(&out)?;
    let topologies = prepare_topologies(cfg, &out)?;
    let mut registry = load_registry(&out)?;
    let mut report = ScalingReport {
        out: out.clone(),
        ..ScalingReport::default()
    };
    let mut rows: BTreeMap<Family, Vec<ResultRow>> = BTreeMap::new();
    let mut yields = Vec::new();

    for &size in &cfg.sizes {
        let spec = LatticeSpec::cube(size)?;
        let mut placements: Vec<(Family, Placement)> = Vec::new();
        for t in &topologies {
            let family = t.config.family;
            match place_cube(spec, &t.working, &yield_options(cfg, family, size)) {
                Ok(p) => placements.push((family, p)),
                Err(e @ Error::CapacityExceeded(_)) => report.skipped.push(SkipRecord {
                    family,
                    size,
                    reason: format!("CapacityExceeded: {e}"),
                }),
                Err(e) => return Err(e.into()),
            }
        }
        if placements.is_empty() {
            continue;
        }
        let mut logical: LogicalGraph = placements[0].1.logical.clone();
        for (_, p) in &placements[1..] {
            logical = logical.intersection(&p.logical)?;
        }
        if logical.edges().is_empty() {
            for (family, _) in &placements {
                report.skipped.push(SkipRecord {
                    family: *family,
                    size,
                    reason: "EmptyGraph: no embeddable bonds".into(),
                });
            }
            continue;
        }
        let mut embeddings: Vec<(Family, EmbeddingMap)> = Vec::new();
        for (family, p) in &placements {
            let emb = p.embedding.restrict(&logical)?;
            emb.save(&out.join("embeddings").join(format!("{family}_L{size}.json")))?;
            yields.push(YieldRecord {
                family: *family,
                size,
                origin: p.origin,
                sites_embedded: p.report.sites_embedded,
                sites_total: p.report.sites_total,
                edges_embedded: p.report.edges_embedded,
                edges_total: p.report.edges_total,
                shared_sites: logical.sites().len(),
                shared_edges: logical.edges().len(),
            });
            embeddings.push((*family, emb));
        }
        let emb_hash = sha256_hex(
            serde_json::to_string(&embeddings.iter().map(|(_, e)| e.to_doc()).collect::<Vec<_>>())?.as_bytes(),
        );

        let outcomes: Vec<InstanceOutcome> = (0..cfg.instances)
            .into_par_iter()
            .map(|index| run_scaling_instance(cfg, &out, size, index, &logical, &embeddings, &emb_hash, &registry))
            .collect::<anyhow::Result<_>>()?;

        let mut lines: BTreeMap<Family, (Vec<serde_json::Value>, Vec<TtsCurve>)> = BTreeMap::new();
        for o in outcomes {
            registry.merge(&o.registry);
            for (family, run, curve, row) in o.per_family {
                let entry = lines.entry(family).or_default();
                for effort in &run.efforts {
                    for b in &effort.batches {
                        let reads: u64 = b.energies.iter().map(|&(_, n)| u64::from(n)).sum();
                        let hits: u64 = b
                            .energies
                            .iter()
                            .filter(|(e, _)| *e <= curve.ground_energy + glassbench::sampler::ENERGY_TOLERANCE)
                            .map(|&(_, n)| u64::from(n))
                            .sum();
                        entry.0.push(serde_json::to_value(BatchLine {
                            instance_id: &run.instance_id,
                            effort: effort.effort,
                            batch: b.batch,
                            reads,
                            hits,
                            p_hat: hits as f64 / reads.max(1) as f64,
                            broken_fraction: b.broken_fraction,
                        })?);
                    }
                }
                entry.1.push(curve);
                rows.entry(family).or_default().push(row);
            }
        }
        for (family, (batch_lines, curves)) in lines {
            write_jsonl(&out.join("samples").join(format!("{family}_L{size}.jsonl")), batch_lines)?;
            write_jsonl(&out.join("curves").join(format!("{family}_L{size}.jsonl")), curves)?;
        }
    }

    registry.save(&out.join("registry.json"))?;
    write_jsonl(&out.join("embeddings").join("yield.jsonl"), &yields)?;
    write_json(&out.join("summary").join("skipped.json"), &report.skipped)?;
    for (family, family_rows) in &rows {
        write_csv(&out.join("summary").join(format!("results_{family}.csv")), &[], family_rows)?;
        let mut summary = Vec::new();
        for &size in &cfg.sizes {
            let group: Vec<InstanceResult> = family_rows.iter().filter(|r| r.size == size).map(ResultRow::to_result).collect();
            if group.is_empty() {
                continue;
            }
            summary.push(match aggregate(size, &group) {
                Ok(s) => SummaryRow {
                    size,
                    n_instances: s.n_instances,
                    n_unsolved: s.n_unsolved,
                    p10: Some(s.p10),
                    p25: Some(s.p25),
                    median: Some(s.median),
                    p75: Some(s.p75),
                    p90: Some(s.p90),
                },
                Err(Error::EmptyGroup(_)) => SummaryRow {
                    size,
                    n_instances: group.len(),
                    n_unsolved: group.len(),
                    p10: None,
                    p25: None,
                    median: None,
                    p75: None,
                    p90: None,
                },
                Err(e) => return Err(e.into()),
            });
        }
        write_csv(&out.join("summary").join(format!("scaling_{family}.csv")), &[QUANTILE_NOTE], &summary)?;
        report.summaries.insert(*family, summary);
    }
    if let (Some(a), Some(b)) = (rows.get(&Family::Chimera), rows.get(&Family::Pegasus)) {
        for &size in &cfg.sizes {
            let ra: Vec<InstanceResult> = a.iter().filter(|r| r.size == size).map(ResultRow::to_result).collect();
            let rb: Vec<InstanceResult> = b.iter().filter(|r| r.size == size).map(ResultRow::to_result).collect();
            let pairs = speedup_pairs(&ra, &rb);
            if !pairs.rows.is_empty() {
                write_speedup(&out.join("summary").join(format!("speedup_L{size}.csv")), &pairs)?;
            }
        }
    }
    output::write_manifest(&out, "scaling", cfg, started)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn run_scaling_instance(
    cfg: &ExperimentConfig,
    out: &Path,
    size: u32,
    index: u32,
    logical: &LogicalGraph,
    embeddings: &[(Family, EmbeddingMap)],
    emb_hash: &str,
    global: &GroundTruthRegistry,
) -> anyhow::Result<InstanceOutcome> {
    let seed = derive_seed(cfg.seed, "instance", &[u64::from(size), u64::from(index)]);
    let instance = generate_instance(logical, seed)?;
    instance.save(&out.join("instances").join(format!("L{size}_{index:03}.json")))?;
    let mut registry = local_registry(global, &instance)?;

    let problems: Vec<(Family, EmbeddedProblem)> = embeddings
        .iter()
        .map(|(f, e)| Ok((*f, set_parameters(&instance, e, cfg.anneal.chain_strength)?)))
        .collect::<anyhow::Result<_>>()?;
    let samplers: Vec<AnnealingSampler> = problems
        .iter()
        .map(|(f, p)| {
            let seed = derive_seed(cfg.seed, "anneal", &[family_tag(*f), u64::from(size), u64::from(index)]);
            AnnealingSampler::new(&instance, Some(p), anneal_template(cfg, seed))
        })
        .collect::<Result<_, _>>()?;

    let fingerprint = sha256_hex(
        serde_json::to_string(&(instance.id(), emb_hash, &cfg.anneal, &cfg.protocol, cfg.seed))?.as_bytes(),
    );
    let cache_dir = out.join("samples").join(format!("L{size}"));
    std::fs::create_dir_all(&cache_dir)?;
    let cache_path = cache_dir.join(format!("{index:03}.json"));
    let cached = load_cache(&cache_path, &fingerprint).filter(|r| r.len() == samplers.len());
    let fresh = || problems.iter().map(|_| ProtocolRun::new(instance.id(), &cfg.protocol.ladder)).collect();
    let initial: Vec<ProtocolRun> = cached.unwrap_or_else(fresh);
    let mut runs: Vec<(ProtocolRun, &dyn BatchSampler)> = initial
        .into_iter()
        .zip(samplers.iter().map(|s| s as &dyn BatchSampler))
        .collect();
    settle(&mut runs, &mut registry, &cfg.protocol)?;
    let runs: Vec<ProtocolRun> = runs.into_iter().map(|(r, _)| r).collect();
    write_json(
        &cache_path,
        &RunCache {
            fingerprint,
            runs: runs.clone(),
        },
    )?;

    let ground = registry.best(instance.id()).context("registry entry after sampling")?;
    let per_family = problems
        .iter()
        .zip(runs)
        .map(|((family, _), run)| {
            let curve = run.curve(ground, cfg.protocol.target_hits);
            let r = select_optimal(&curve);
            let row = ResultRow {
                instance_id: instance.id().to_string(),
                size,
                index,
                t_opt: r.t_opt,
                tts_opt: r.tts_opt,
                solved: r.solved,
                ground_energy: ground,
                budget_exhausted: curve.budget_exhausted,
                broken_fraction: run.mean_broken_fraction(),
            };
            (*family, run, curve, row)
        })
        .collect();
    Ok(InstanceOutcome { registry, per_family })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupCsvRow {
    pub instance_id: String,
    pub tts_a: Option<f64>,
    pub tts_b: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn write_speedup(path: &Path, report: &glassbench::metrics::SpeedupReport) -> anyhow::Result<()> {
    let rows = report.rows.iter().map(|r| SpeedupCsvRow {
        instance_id: r.instance_id.clone(),
        tts_a: r.tts_a,
        tts_b: r.tts_b,
        ratio: r.ratio,
    });
    let note_a = format!("unsolved by a: {}", report.unsolved_a.len());
    let note_b = format!("unsolved by b: {}", report.unsolved_b.len());
    write_csv(path, &["ratio = tts_a / tts_b", &note_a, &note_b], rows)
}

/// Compares two results CSVs instance by instance.
pub fn run_compare(a: &Path, b: &Path, out: &Path) -> anyhow::Result<glassbench::metrics::SpeedupReport> {
    let ra: Vec<ResultRow> = output::read_csv(a)?;
    let rb: Vec<ResultRow> = output::read_csv(b)?;
    let report = speedup_pairs(
        &ra.iter().map(ResultRow::to_result).collect::<Vec<_>>(),
        &rb.iter().map(ResultRow::to_result).collect::<Vec<_>>(),
    );
    if report.rows.is_empty() {
        return Err(Error::NoOverlap.into());
    }
    write_speedup(out, &report)?;
    Ok(report)
}

/// Annealing on a relabeled instance that reports witnesses in the labels
/// of the original instance.
struct Relabeled<'a> {
    inner: AnnealingSampler<'a>,
    image: &'a Instance,
    back: Isometry,
}

impl BatchSampler for Relabeled<'_> {
    fn sample_batch(&self, effort: u32, batch: u32, reads: u32) -> LogicalOutcome {
        let mut outcome = self.inner.sample_batch(effort, batch, reads);
        if let Some((_, w)) = outcome.best.as_mut() {
            *w = self.back.apply_assignment(self.image, &SpinAssignment(w.clone())).0;
        }
        outcome
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryRow {
    pub instance_id: String,
    pub isometry_index: usize,
    pub tts: Option<f64>,
    pub hits: u64,
    pub reads: u64,
    pub p_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryRatioRow {
    pub instance_id: String,
    pub median: Option<f64>,
    pub best: Option<f64>,
    pub worst: Option<f64>,
    pub ratio: Option<f64>,
    pub unsolved: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub lower: f64,
    pub upper: Option<f64>,
    pub count: usize,
}

#[derive(Clone, Debug, Default)]
pub struct IsometryReport {
    pub rows: Vec<IsometryRow>,
    pub ratios: Vec<IsometryRatioRow>,
}

/// Runs every instance under all 48 cube isometries at one effort, on a
/// single embedding of the full cube.
pub fn run_isometry(cfg: &ExperimentConfig) -> anyhow::Result<IsometryReport> {
    cfg.validate()?;
    with_pool(cfg.threads, || isometry_inner(cfg))?
}

fn isometry_inner(cfg: &ExperimentConfig) -> anyhow::Result<IsometryReport> {
    let started = output::unix_now();
    let ic = &cfg.isometry;
    let out = cfg.out.clone();
    output::create_layout(&out)?;
    let topo_cfg = cfg
        .topology(ic.family)
        .with_context(|| format!("no {} topology configured", ic.family))?;
    let single = ExperimentConfig {
        topologies: vec![topo_cfg.clone()],
        ..cfg.clone()
    };
    let topology = prepare_topologies(&single, &out)?.remove(0);
    let spec = LatticeSpec::cube(ic.size)?;
    let placement = place_cube(spec, &topology.working, &yield_options(cfg, ic.family, ic.size))?;
    if !placement.report.is_complete() {
        return Err(Error::NotFullCube(format!(
            "best placement embeds {}/{} sites and {}/{} bonds",
            placement.report.sites_embedded,
            placement.report.sites_total,
            placement.report.edges_embedded,
            placement.report.edges_total
        ))
        .into());
    }
    let emb = placement.embedding;
    emb.save(&out.join("embeddings").join(format!("{}_L{}_isometry.json", ic.family, ic.size)))?;
    let lattice = build_lattice(spec);
    let group = enumerate_isometries();
    let protocol = ProtocolConfig {
        ladder: vec![ic.effort],
        ..cfg.protocol.clone()
    };
    let global = load_registry(&out)?;

    let per_instance: Vec<(GroundTruthRegistry, Vec<IsometryRow>, IsometryRatioRow)> = (0..ic.instances)
        .into_par_iter()
        .map(|index| -> anyhow::Result<_> {
            let seed = derive_seed(cfg.seed, "isometry-instance", &[u64::from(ic.size), u64::from(index)]);
            let instance = generate_instance(&lattice, seed)?;
            instance.save(&out.join("instances").join(format!("isometry_L{}_{index:03}.json", ic.size)))?;
            let mut registry = local_registry(&global, &instance)?;
            let images: Vec<Instance> = group.iter().map(|g| apply_isometry(&instance, g)).collect::<Result<_, _>>()?;
            let problems: Vec<EmbeddedProblem> = images
                .iter()
                .map(|img| set_parameters(img, &emb, cfg.anneal.chain_strength))
                .collect::<Result<_, _>>()?;
            let samplers: Vec<Relabeled> = group
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    let seed = derive_seed(
                        cfg.seed,
                        "isometry-anneal",
                        &[u64::from(ic.size), u64::from(index), gi as u64],
                    );
                    Ok(Relabeled {
                        inner: AnnealingSampler::new(&images[gi], Some(&problems[gi]), anneal_template(cfg, seed))?,
                        image: &images[gi],
                        back: g.inverse(),
                    })
                })
                .collect::<anyhow::Result<_>>()?;
            let mut runs: Vec<(ProtocolRun, &dyn BatchSampler)> = samplers
                .iter()
                .map(|s| (ProtocolRun::new(instance.id(), &protocol.ladder), s as &dyn BatchSampler))
                .collect();
            settle(&mut runs, &mut registry, &protocol)?;
            let ground = registry.best(instance.id()).context("registry entry after sampling")?;
            let mut rows = Vec::new();
            let mut results = Vec::new();
            for (gi, (run, _)) in runs.iter().enumerate() {
                let curve = run.curve(ground, protocol.target_hits);
                let point = &curve.points[0];
                rows.push(IsometryRow {
                    instance_id: instance.id().to_string(),
                    isometry_index: gi,
                    tts: point.tts.value(),
                    hits: point.estimate.hits,
                    reads: point.estimate.reads,
                    p_hat: point.estimate.p_hat,
                });
                results.push(select_optimal(&curve));
            }
            let s = isometry_consistency(&results, ic.effort)?;
            let ratio = IsometryRatioRow {
                instance_id: instance.id().to_string(),
                median: s.median,
                best: s.best,
                worst: s.worst,
                ratio: s.ratio,
                unsolved: s.unsolved,
            };
            Ok((registry, rows, ratio))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut registry = global;
    let mut report = IsometryReport::default();
    for (r, rows, ratio) in per_instance {
        registry.merge(&r);
        report.rows.extend(rows);
        report.ratios.push(ratio);
    }
    registry.save(&out.join("registry.json"))?;
    let summary = out.join("summary");
    write_csv(&summary.join("isometry.csv"), &[], &report.rows)?;
    write_csv(&summary.join("isometry_ratios.csv"), &["ratio = worst / best tts over 48 isometries"], &report.ratios)?;
    let ratios: Vec<f64> = report.ratios.iter().filter_map(|r| r.ratio).collect();
    let hist = ratio_histogram(&ratios).into_iter().map(|b| HistogramRow {
        lower: b.lower,
        upper: b.upper,
        count: b.count,
    });
    write_csv(
        &summary.join("isometry_histogram.csv"),
        &["bins [10^(i/4), 10^((i+1)/4)) for i = 0..16, last bin open-ended"],
        hist,
    )?;
    if report.ratios.iter().any(|r| r.ratio.is_none()) {
        eprintln!("note: some instances had unsolved isometries; their ratio is undefined");
    }
    output::write_manifest(&out, "isometry", cfg, started)?;
    Ok(report)
}
