//! Command-line front end and experiment runner for glassbench.

pub mod config;
pub mod experiment;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use glassbench::embedding::{place_cube, set_parameters, validate_embedding, EmbeddingMap, YieldOptions};
use glassbench::lattice::{build_lattice, generate_instance, Instance, LatticeSpec};
use glassbench::rng::derive_seed;
use glassbench::sampler::{logical_outcome, sample_sa, solve_exact, SamplerConfig, SamplerKind};
use glassbench::topology::{apply_defects, build_ideal, graph_stats, sample_defect_mask, Family, HardwareGraph, Shape};
use glassbench::verify;

use crate::config::ExperimentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "glassbench", version, about = "Embedded 3D spin-glass benchmark toolkit")]
pub struct Cli {
    /// Master seed; overrides the configuration file.
    #[arg(long, global = true, env = "GLASSBENCH_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a (defective) hardware graph and print its statistics.
    Topology(TopologyArgs),
    /// Generate a random ±1 instance on a full lattice.
    Gen(GenArgs),
    /// Embed a lattice into a hardware graph, maximizing yield.
    Embed(EmbedArgs),
    /// Check an embedding against a working graph.
    Validate(ValidateArgs),
    /// Solve an instance exactly or sample it with annealing.
    Solve(SolveArgs),
    /// Time-to-solution scaling study.
    Scaling(ExperimentArgs),
    /// Instance-to-instance comparison of two results files.
    Compare(CompareArgs),
    /// Consistency of TTS under the 48 cube isometries.
    Isometry(ExperimentArgs),
    /// Run the built-in invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub family: Family,
    /// `rows,cols,shore` for chimera, `m` for pegasus.
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value_t = 0)]
    pub defect_qubits: usize,
    #[arg(long, default_value_t = 0)]
    pub defect_couplers: usize,
    /// Seed of the defect draw; the master seed otherwise.
    #[arg(long)]
    pub defect_seed: Option<u64>,
}

impl GraphArgs {
    fn build(&self, seed: u64) -> anyhow::Result<HardwareGraph> {
        let ideal = build_ideal(Shape::parse(self.family, &self.shape)?)?;
        if self.defect_qubits == 0 && self.defect_couplers == 0 {
            return Ok(ideal);
        }
        let seed = self.defect_seed.unwrap_or(seed);
        let mask = sample_defect_mask(&ideal, self.defect_qubits, self.defect_couplers, seed)?;
        Ok(apply_defects(&ideal, &mask)?)
    }
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Write the graph document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DimsArgs {
    /// Side of a cubic lattice.
    #[arg(long = "L", visible_alias = "size", conflicts_with = "dims")]
    pub size: Option<u32>,
    /// `l1,l2,l3` for a cuboid.
    #[arg(long)]
    pub dims: Option<String>,
}

impl DimsArgs {
    fn spec(&self) -> anyhow::Result<LatticeSpec> {
        match (&self.size, &self.dims) {
            (Some(l), None) => Ok(LatticeSpec::cube(*l)?),
            (None, Some(d)) => {
                let v: Vec<u32> = d
                    .split(',')
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("bad dims '{d}'"))?;
                anyhow::ensure!(v.len() == 3, "dims needs three values, got '{d}'");
                Ok(LatticeSpec::new(v[0], v[1], v[2])?)
            }
            _ => anyhow::bail!("give --size or --dims"),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub dims: DimsArgs,
    /// Number of instances; more than one writes into the directory `--out`.
    #[arg(long, default_value_t = 1)]
    pub count: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub dims: DimsArgs,
    /// Working graph document; the ideal graph of --family/--shape otherwise.
    #[arg(long, conflicts_with = "shape")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<Family>,
    /// Defaults to `16,16,4` for chimera and `16` for pegasus.
    #[arg(long, requires = "family")]
    pub shape: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    /// Check coverage of this instance's lattice instead of the full lattice.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "sa-logical")]
    pub kind: SamplerKind,
    /// Embedding for `sa-physical`.
    #[arg(long)]
    pub emb: Option<PathBuf>,
    /// Validate the embedding against this working graph first.
    #[arg(long, requires = "emb")]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub chain_strength: f64,
    #[arg(long, default_value_t = 256)]
    pub effort: u32,
    #[arg(long, default_value_t = 500)]
    pub reads: u32,
    /// Write one JSON line per read here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON configuration; defaults apply to missing fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated lattice sides (scaling) or a single side (isometry).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u32>>,
    #[arg(long)]
    pub instances: Option<u32>,
    #[arg(long)]
    pub max_batches: Option<u32>,
    /// Fixed effort of the isometry study.
    #[arg(long)]
    pub effort: Option<u32>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Also validate this embedding fixture (requires --graph).
    #[arg(long, requires = "graph")]
    pub emb: Option<PathBuf>,
    #[arg(long, requires = "emb")]
    pub graph: Option<PathBuf>,
}

/// Builds the experiment configuration from a file, flags and the seed override.
pub fn experiment_config(args: &ExperimentArgs, seed: Option<u64>, isometry: bool) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(sizes) = &args.sizes {
        if isometry {
            anyhow::ensure!(sizes.len() == 1, "the isometry study takes a single size");
            cfg.isometry.size = sizes[0];
        } else {
            cfg.sizes = sizes.clone();
        }
    }
    if let Some(n) = args.instances {
        if isometry {
            cfg.isometry.instances = n;
        } else {
            cfg.instances = n;
        }
    }
    if let Some(m) = args.max_batches {
        cfg.protocol.max_batches = m;
    }
    if let Some(e) = args.effort {
        cfg.isometry.effort = e;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_graph(path: &Path) -> anyhow::Result<HardwareGraph> {
    HardwareGraph::load(path).with_context(|| format!("loading graph {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::load(path).with_context(|| format!("loading instance {}", path.display()))
}

fn load_embedding(path: &Path) -> anyhow::Result<EmbeddingMap> {
    EmbeddingMap::load(path).with_context(|| format!("loading embedding {}", path.display()))
}

/// Runs one parsed command and returns its exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Topology(a) => {
            let g = a.graph.build(seed)?;
            if let Some(out) = &a.out {
                g.save(out)?;
            }
            println!("{}", serde_json::to_string_pretty(&graph_stats(&g))?);
            Ok(EXIT_OK)
        }
        Command::Gen(a) => {
            let spec = a.dims.spec()?;
            let lattice = build_lattice(spec);
            let single = a.count == 1 && a.out.extension().is_some_and(|e| e == "json");
            if !single {
                std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
            }
            for i in 0..a.count {
                let inst_seed = derive_seed(seed, "instance", &[u64::from(spec.l1), u64::from(i)]);
                let inst = generate_instance(&lattice, inst_seed)?;
                let path = if single {
                    a.out.clone()
                } else if spec.is_cube() {
                    a.out.join(format!("L{}_{i:03}.json", spec.l1))
                } else {
                    a.out.join(format!("{}x{}x{}_{i:03}.json", spec.l1, spec.l2, spec.l3))
                };
                inst.save(&path)?;
                println!("{} {} spins {} bonds", inst.id(), inst.num_spins(), inst.couplings().len());
            }
            Ok(EXIT_OK)
        }
        Command::Embed(a) => {
            let spec = a.dims.spec()?;
            let graph = match (&a.graph, a.family) {
                (Some(p), family) => {
                    let g = load_graph(p)?;
                    if let Some(f) = family {
                        anyhow::ensure!(f == g.family(), "{} is a {} graph, not {f}", p.display(), g.family());
                    }
                    g
                }
                (None, Some(f)) => {
                    let default = match f {
                        Family::Chimera => "16,16,4",
                        Family::Pegasus => "16",
                    };
                    build_ideal(Shape::parse(f, a.shape.as_deref().unwrap_or(default))?)?
                }
                (None, None) => anyhow::bail!("give --graph or --family"),
            };
            let placed = place_cube(spec, &graph, &YieldOptions { seed, passes: 20 })?;
            placed.embedding.save(&a.out)?;
            let r = &placed.report;
            println!(
                "origin {:?}: {}/{} sites, {}/{} bonds",
                placed.origin, r.sites_embedded, r.sites_total, r.edges_embedded, r.edges_total
            );
            Ok(EXIT_OK)
        }
        Command::Validate(a) => {
            let emb = load_embedding(&a.emb)?;
            let graph = load_graph(&a.graph)?;
            let logical = match &a.instance {
                Some(p) => load_instance(p)?.graph().clone(),
                None => build_lattice(emb.spec),
            };
            let report = validate_embedding(&emb, &graph, &logical);
            println!("{report}");
            Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Solve(a) => solve(a, seed),
        Command::Scaling(a) => {
            let cfg = experiment_config(&a, cli.seed, false)?;
            let report = experiment::run_scaling(&cfg)?;
            for s in &report.skipped {
                println!("skipped {} L={}: {}", s.family, s.size, s.reason);
            }
            for (family, rows) in &report.summaries {
                for r in rows {
                    let median = r.median.map_or("unsolved".to_string(), |m| format!("{m:.1}"));
                    println!("{family} L={} median tts {median} ({} unsolved)", r.size, r.n_unsolved);
                }
            }
            println!("results in {}", report.out.display());
            Ok(EXIT_OK)
        }
        Command::Isometry(a) => {
            let cfg = experiment_config(&a, cli.seed, true)?;
            let report = experiment::run_isometry(&cfg)?;
            for r in &report.ratios {
                let ratio = r.ratio.map_or("undefined".to_string(), |x| format!("{x:.2}"));
                println!("{} worst/best {ratio}", r.instance_id);
            }
            Ok(EXIT_OK)
        }
        Command::Compare(a) => {
            let report = experiment::run_compare(&a.a, &a.b, &a.out)?;
            println!(
                "{} common instances, {} unsolved by a, {} unsolved by b",
                report.rows.len(),
                report.unsolved_a.len(),
                report.unsolved_b.len()
            );
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let mut failed = false;
            if let (Some(e), Some(g)) = (&a.emb, &a.graph) {
                let emb = load_embedding(e)?;
                let graph = load_graph(g)?;
                let report = validate_embedding(&emb, &graph, &build_lattice(emb.spec));
                println!("{} fixture {}: {report}", if report.passed() { "PASS" } else { "FAIL" }, e.display());
                failed |= !report.passed();
            }
            for outcome in verify::run_suite() {
                println!("{outcome}");
                failed |= !outcome.passed;
            }
            Ok(if failed { EXIT_VERIFY } else { EXIT_OK })
        }
    }
}

fn solve(a: SolveArgs, seed: u64) -> anyhow::Result<i32> {
    let instance = load_instance(&a.instance)?;
    match a.kind {
        SamplerKind::Exact => {
            let sol = solve_exact(&instance)?;
            println!("ground energy {} ({} optimal states)", sol.energy, sol.optimum_count);
        }
        SamplerKind::SaLogical | SamplerKind::SaPhysical => {
            let config = SamplerConfig {
                kind: a.kind,
                effort: a.effort,
                reads: a.reads,
                seed,
                ..SamplerConfig::default()
            };
            let (samples, problem) = if a.kind == SamplerKind::SaPhysical {
                let path = a.emb.as_ref().context("sa-physical needs --emb")?;
                let emb = load_embedding(path)?;
                if let Some(g) = &a.graph {
                    let report = validate_embedding(&emb, &load_graph(g)?, instance.graph());
                    if !report.passed() {
                        println!("{report}");
                        return Ok(EXIT_VERIFY);
                    }
                }
                let problem = set_parameters(&instance, &emb, a.chain_strength)?;
                (sample_sa(&problem, &config)?, Some(problem))
            } else {
                (sample_sa(&instance, &config)?, None)
            };
            if let Some(out) = &a.out {
                let file = std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
                samples.write_jsonl(std::io::BufWriter::new(file))?;
            }
            let outcome = logical_outcome(&samples, problem.as_ref(), &instance);
            let best = outcome.best.as_ref().map(|b| b.0).unwrap_or(f64::NAN);
            let hits = outcome.hits(best);
            println!(
                "best logical energy {best}, seen in {hits}/{} reads, broken chain fraction {:.4}",
                outcome.reads(),
                outcome.broken_fraction
            );
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs; clap's own usage errors exit with code 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
