//! Exact enumeration, simulated annealing and ground-truth bookkeeping.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{vote, EmbeddedProblem};
use crate::error::{Error, Result};
use crate::lattice::{energy_unchecked, Instance, SpinAssignment};
use crate::rng;

/// Largest variable count [`solve_exact`] will enumerate.
pub const ENUMERATION_CAP: usize = 26;

/// Energies closer than this are considered equal.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// A classical Ising problem `Σ w_ij s_i s_j` over indexed ±1 variables.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    num_vars: usize,
    edges: Vec<(u32, u32, f64)>,
    row_start: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    /// Weights in units of ½ when all of them are half-integers, which
    /// enables the integer sweep.
    half_weights: Option<Vec<i32>>,
    /// Largest possible `|ΔE|` of a single flip, in units of ½.
    max_half_delta: usize,
}

impl IsingModel {
    pub fn new(num_vars: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut degree = vec![0usize; num_vars];
        for &(a, b, _) in &edges {
            assert!(a < num_vars && b < num_vars && a != b, "bad edge ({a}, {b})");
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut row_start = vec![0usize; num_vars + 1];
        for i in 0..num_vars {
            row_start[i + 1] = row_start[i] + degree[i];
        }
        let mut fill = row_start.clone();
        let mut neighbors = vec![0u32; row_start[num_vars]];
        let mut weights = vec![0.0; row_start[num_vars]];
        for &(a, b, w) in &edges {
            neighbors[fill[a]] = b as u32;
            weights[fill[a]] = w;
            fill[a] += 1;
            neighbors[fill[b]] = a as u32;
            weights[fill[b]] = w;
            fill[b] += 1;
        }
        let halves = weights.iter().all(|&w| (2.0 * w).fract() == 0.0 && w.abs() < 1e6);
        let half_weights = halves.then(|| weights.iter().map(|&w| (2.0 * w) as i32).collect::<Vec<i32>>());
        let max_half_delta = (0..num_vars)
            .map(|i| {
                let s: f64 = weights[row_start[i]..row_start[i + 1]].iter().map(|w| w.abs()).sum();
                (4.0 * s).ceil() as usize
            })
            .max()
            .unwrap_or(0);
        IsingModel {
            num_vars,
            edges: edges.into_iter().map(|(a, b, w)| (a as u32, b as u32, w)).collect(),
            row_start,
            neighbors,
            weights,
            half_weights,
            max_half_delta,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.num_vars
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|&(a, b, w)| (a as usize, b as usize, w))
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b, w)| w * f64::from(s[a as usize] * s[b as usize]))
            .sum()
    }

    #[inline]
    fn field(&self, i: usize, s: &[i8]) -> f64 {
        let (lo, hi) = (self.row_start[i], self.row_start[i + 1]);
        self.neighbors[lo..hi]
            .iter()
            .zip(&self.weights[lo..hi])
            .map(|(&j, &w)| w * f64::from(s[j as usize]))
            .sum()
    }
}

/// Conversion of a problem into the sampler's variable indexing.
pub trait ToIsing {
    fn to_ising(&self) -> IsingModel;
}

impl ToIsing for IsingModel {
    fn to_ising(&self) -> IsingModel {
        self.clone()
    }
}

/// Variables follow the instance's site order.
impl ToIsing for Instance {
    fn to_ising(&self) -> IsingModel {
        let edges = self
            .graph()
            .edge_ends()
            .iter()
            .zip(self.couplings())
            .map(|(&(a, b), &j)| (a, b, f64::from(j)))
            .collect();
        IsingModel::new(self.num_spins(), edges)
    }
}

/// Variables follow `problem.qubits`.
impl ToIsing for EmbeddedProblem {
    fn to_ising(&self) -> IsingModel {
        let edges = self
            .values
            .iter()
            .map(|(c, &v)| {
                let (a, b) = c.endpoints();
                (self.qubit_index(&a).unwrap(), self.qubit_index(&b).unwrap(), v)
            })
            .collect();
        IsingModel::new(self.qubits.len(), edges)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub energy: f64,
    pub assignment: Vec<i8>,
    pub optimum_count: u64,
}

/// Exhaustive minimum over all `2^n` states, visited in Gray-code order so
/// that each step flips one spin.
pub fn solve_exact<P: ToIsing + ?Sized>(problem: &P) -> Result<ExactSolution> {
    let model = problem.to_ising();
    let n = model.num_variables();
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            variables: n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut s = vec![1i8; n];
    let mut energy = model.energy(&s);
    let mut best = energy;
    let mut best_index = 0u64;
    let mut count = 1u64;
    for i in 1..(1u64 << n) {
        let bit = i.trailing_zeros() as usize;
        energy -= 2.0 * f64::from(s[bit]) * model.field(bit, &s);
        s[bit] = -s[bit];
        if energy < best - ENERGY_TOLERANCE {
            best = energy;
            best_index = i;
            count = 1;
        } else if (energy - best).abs() <= ENERGY_TOLERANCE {
            count += 1;
        }
    }
    let gray = best_index ^ (best_index >> 1);
    let assignment = SpinAssignment::from_bits(n, gray).0;
    Ok(ExactSolution {
        energy: model.energy(&assignment),
        assignment,
        optimum_count: count,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Exact,
    SaPhysical,
    SaLogical,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SamplerKind::Exact),
            "sa-physical" => Ok(SamplerKind::SaPhysical),
            "sa-logical" => Ok(SamplerKind::SaLogical),
            other => Err(Error::DomainError(format!("unknown sampler kind '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Geometric,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    /// Sweeps per anneal.
    pub effort: u32,
    pub reads: u32,
    pub seed: u64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub schedule: Schedule,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: SamplerKind::SaPhysical,
            effort: 64,
            reads: 500,
            seed: 0,
            beta_min: 0.1,
            beta_max: 10.0,
            schedule: Schedule::Geometric,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.effort == 0 || self.reads == 0 {
            return Err(Error::DomainError("effort and reads must be at least 1".into()));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(Error::DomainError(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }

    /// Inverse temperature of each sweep. A single sweep runs at `beta_max`.
    pub fn betas(&self) -> Vec<f64> {
        let n = self.effort as usize;
        if n == 1 {
            return vec![self.beta_max];
        }
        (0..n)
            .map(|t| {
                let f = t as f64 / (n - 1) as f64;
                match self.schedule {
                    Schedule::Geometric => self.beta_min * (self.beta_max / self.beta_min).powf(f),
                    Schedule::Linear => self.beta_min + (self.beta_max - self.beta_min) * f,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub spins: Vec<i8>,
    pub energy: f64,
    pub multiplicity: u32,
}

/// Distinct final states, sorted by energy then configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub num_variables: usize,
    pub config: SamplerConfig,
}

impl SampleSet {
    pub fn reads(&self) -> u64 {
        self.samples.iter().map(|s| u64::from(s.multiplicity)).sum()
    }

    pub fn lowest(&self) -> Option<&Sample> {
        self.samples.first()
    }

    fn from_reads(reads: Vec<(Vec<i8>, f64)>, num_variables: usize, config: &SamplerConfig) -> Self {
        let mut grouped: BTreeMap<Vec<i8>, (f64, u32)> = BTreeMap::new();
        for (spins, energy) in reads {
            grouped.entry(spins).or_insert((energy, 0)).1 += 1;
        }
        let mut samples: Vec<Sample> = grouped
            .into_iter()
            .map(|(spins, (energy, multiplicity))| Sample {
                spins,
                energy,
                multiplicity,
            })
            .collect();
        samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.spins.cmp(&b.spins)));
        SampleSet {
            samples,
            num_variables,
            config: config.clone(),
        }
    }

    /// One JSON object per read, expanded from the multiplicities.
    pub fn write_jsonl(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            read: u64,
            energy: f64,
            spins: &'a [i8],
        }
        let mut read = 0;
        for s in &self.samples {
            for _ in 0..s.multiplicity {
                serde_json::to_writer(&mut out, &Line { read, energy: s.energy, spins: &s.spins })?;
                out.write_all(b"\n")?;
                read += 1;
            }
        }
        Ok(())
    }
}

/// Single-spin Metropolis annealing. Read `r` starts from a uniformly random
/// state drawn from the stream `(seed, "read", r)`, then performs `effort`
/// sweeps; each sweep visits every variable once in index order at that
/// sweep's inverse temperature.
pub fn sample_sa<P: ToIsing + ?Sized>(problem: &P, config: &SamplerConfig) -> Result<SampleSet> {
    config.validate()?;
    let model = problem.to_ising();
    Ok(anneal(&model, config))
}

pub(crate) fn anneal(model: &IsingModel, config: &SamplerConfig) -> SampleSet {
    let betas = config.betas();
    let reads: Vec<(Vec<i8>, f64)> = (0..config.reads)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(config.seed, "read", &[u64::from(r)]);
            let s = anneal_one(model, &betas, &mut rng);
            let e = model.energy(&s);
            (s, e)
        })
        .collect();
    SampleSet::from_reads(reads, model.num_variables(), config)
}

fn anneal_one(model: &IsingModel, betas: &[f64], rng: &mut rng::StreamRng) -> Vec<i8> {
    let n = model.num_variables();
    let mut s: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    match &model.half_weights {
        Some(hw) => sweep_integer(model, hw, betas, &mut s, rng),
        None => sweep_real(model, betas, &mut s, rng),
    }
    s
}

/// Metropolis sweeps with `ΔE` in units of ½ and acceptance thresholds on
/// 32-bit draws; moves whose acceptance probability is below `2^-32` are
/// rejected without a draw.
fn sweep_integer(model: &IsingModel, hw: &[i32], betas: &[f64], s: &mut [i8], rng: &mut rng::StreamRng) {
    let mut threshold = vec![0u64; model.max_half_delta + 1];
    // Local fields `Σ_j w_ij s_j` in units of ½, kept current across flips.
    let mut field: Vec<i32> = (0..s.len())
        .map(|i| {
            (model.row_start[i]..model.row_start[i + 1])
                .map(|k| hw[k] * i32::from(s[model.neighbors[k] as usize]))
                .sum()
        })
        .collect();
    for &beta in betas {
        for (d, t) in threshold.iter_mut().enumerate() {
            *t = ((-beta * 0.5 * d as f64).exp() * 4_294_967_296.0) as u64;
        }
        for i in 0..s.len() {
            let delta = -2 * i32::from(s[i]) * field[i];
            let accept = delta <= 0 || {
                let t = threshold[delta as usize];
                t > 0 && u64::from(rng.next_u32()) < t
            };
            if accept {
                let change = -2 * i32::from(s[i]);
                s[i] = -s[i];
                for k in model.row_start[i]..model.row_start[i + 1] {
                    field[model.neighbors[k] as usize] += change * hw[k];
                }
            }
        }
    }
}

fn sweep_real(model: &IsingModel, betas: &[f64], s: &mut [i8], rng: &mut rng::StreamRng) {
    for &beta in betas {
        for i in 0..s.len() {
            let delta = -2.0 * f64::from(s[i]) * model.field(i, s);
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                s[i] = -s[i];
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    BestSeen,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub energy: f64,
    pub provenance: Provenance,
    pub witness: Vec<i8>,
}

/// Best known logical energy per instance id. Energies only ever decrease.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroundTruthRegistry {
    entries: BTreeMap<String, RegistryEntry>,
}

impl GroundTruthRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: &str) -> Option<&RegistryEntry> {
        self.entries.get(id)
    }

    pub fn best(&self, id: &str) -> Option<f64> {
        self.entries.get(id).map(|e| e.energy)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records `energy` if it beats the current entry (or none exists).
    /// Returns whether an existing entry was lowered.
    pub fn offer(&mut self, id: &str, energy: f64, witness: &[i8], provenance: Provenance) -> bool {
        match self.entries.get_mut(id) {
            None => {
                self.entries.insert(
                    id.to_string(),
                    RegistryEntry {
                        energy,
                        provenance,
                        witness: witness.to_vec(),
                    },
                );
                false
            }
            Some(entry) if energy < entry.energy - ENERGY_TOLERANCE => {
                *entry = RegistryEntry {
                    energy,
                    provenance,
                    witness: witness.to_vec(),
                };
                true
            }
            Some(entry) => {
                if provenance == Provenance::Exact && (energy - entry.energy).abs() <= ENERGY_TOLERANCE {
                    entry.provenance = Provenance::Exact;
                }
                false
            }
        }
    }

    /// Merges another registry, keeping the lower energy per id.
    pub fn merge(&mut self, other: &GroundTruthRegistry) {
        for (id, e) in &other.entries {
            self.offer(id, e.energy, &e.witness, e.provenance);
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

/// Logical view of a sample set: energy histogram, a lowest-energy witness
/// and the mean fraction of broken chains.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalOutcome {
    /// `(logical energy, reads)`, sorted by energy.
    pub energies: Vec<(f64, u32)>,
    pub best: Option<(f64, Vec<i8>)>,
    pub broken_fraction: f64,
}

impl LogicalOutcome {
    pub fn reads(&self) -> u64 {
        self.energies.iter().map(|&(_, n)| u64::from(n)).sum()
    }

    pub fn hits(&self, target: f64) -> u64 {
        self.energies
            .iter()
            .filter(|(e, _)| *e <= target + ENERGY_TOLERANCE)
            .map(|&(_, n)| u64::from(n))
            .sum()
    }
}

/// Maps samples to logical energies, unembedding physical samples by chain
/// majority vote. Reads of a state with tied chains are resolved one by one
/// from the stream `(tie_seed, "tie", [sample, copy])`.
pub fn logical_outcome(
    samples: &SampleSet,
    problem: Option<&EmbeddedProblem>,
    instance: &Instance,
) -> LogicalOutcome {
    let tie_seed = rng::derive_seed(samples.config.seed, "unembed", &[]);
    let mut energies: BTreeMap<i64, u32> = BTreeMap::new();
    let mut best: Option<(f64, Vec<i8>)> = None;
    let mut broken_reads = 0.0;
    let mut record = |spins: Vec<i8>, copies: u32, energies: &mut BTreeMap<i64, u32>| {
        let e = energy_unchecked(instance, &spins);
        *energies.entry(e.round() as i64).or_insert(0) += copies;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, spins));
        }
    };
    for (si, sample) in samples.samples.iter().enumerate() {
        match problem {
            None => record(sample.spins.clone(), sample.multiplicity, &mut energies),
            Some(p) => {
                let sums: Vec<i32> = p
                    .chain_members
                    .iter()
                    .map(|m| m.iter().map(|&i| i32::from(sample.spins[i])).sum())
                    .collect();
                let broken = p
                    .chain_members
                    .iter()
                    .zip(&sums)
                    .filter(|(m, &sum)| sum.unsigned_abs() as usize != m.len())
                    .count();
                if !p.chain_members.is_empty() {
                    broken_reads += f64::from(sample.multiplicity) * broken as f64 / p.chain_members.len() as f64;
                }
                let tied = sums.contains(&0);
                let groups = if tied { sample.multiplicity } else { 1 };
                for copy in 0..groups {
                    let mut rng = rng::stream(tie_seed, "tie", &[si as u64, u64::from(copy)]);
                    let spins: Vec<i8> = sums.iter().map(|&sum| vote(sum, &mut rng)).collect();
                    let weight = if tied { 1 } else { sample.multiplicity };
                    record(spins, weight, &mut energies);
                }
            }
        }
    }
    let reads = samples.reads().max(1) as f64;
    LogicalOutcome {
        energies: energies.into_iter().map(|(e, n)| (e as f64, n)).collect(),
        best,
        broken_fraction: broken_reads / reads,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HitCount {
    pub hits: u64,
    pub reads: u64,
    pub broken_fraction: f64,
    /// Set when the samples lowered an existing registry entry; hit counts
    /// made against the old entry must be recomputed.
    pub invalidated: bool,
}

/// Counts reads whose logical energy equals the best known energy, updating
/// the registry first if the samples improve on it.
pub fn count_ground_hits(
    samples: &SampleSet,
    problem: Option<&EmbeddedProblem>,
    instance: &Instance,
    registry: &mut GroundTruthRegistry,
) -> HitCount {
    let outcome = logical_outcome(samples, problem, instance);
    let mut invalidated = false;
    if let Some((e, witness)) = &outcome.best {
        invalidated = registry.offer(instance.id(), *e, witness, Provenance::BestSeen);
    }
    let target = registry.best(instance.id()).unwrap_or(f64::INFINITY);
    HitCount {
        hits: outcome.hits(target),
        reads: outcome.reads(),
        broken_fraction: outcome.broken_fraction,
        invalidated,
    }
}
