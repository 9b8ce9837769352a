//! Time-to-solution estimation and summary statistics.
//!
//! `TTS(t) = t · ln(0.01) / ln(1 - p(t))` is the effort needed to see the
//! ground state with 99% confidence. Success probabilities come from the batch
//! protocol: batches of reads at each effort until enough ground-state hits
//! accumulate, pooled over all reads at that effort.

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddedProblem;
use crate::error::{Error, Result};
use crate::lattice::Instance;
use crate::rng;
use crate::sampler::{anneal, logical_outcome, GroundTruthRegistry, IsingModel, LogicalOutcome, Provenance, SamplerConfig};

/// Largest success probability used in the TTS formula.
pub const P_CLAMP: f64 = 1.0 - 1e-12;

/// Time to solution, or `Unsolved` when no read reached the ground state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum Tts {
    Finite(f64),
    Unsolved,
}

impl Tts {
    pub fn value(self) -> Option<f64> {
        match self {
            Tts::Finite(v) => Some(v),
            Tts::Unsolved => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Tts::Finite(_))
    }
}

impl From<Option<f64>> for Tts {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Tts::Unsolved, Tts::Finite)
    }
}

impl From<Tts> for Option<f64> {
    fn from(t: Tts) -> Self {
        t.value()
    }
}

/// `effort · ln(0.01) / ln(1 - p)` with `p` clamped to [`P_CLAMP`].
pub fn tts(effort: f64, p: f64) -> Result<Tts> {
    if !(effort > 0.0 && effort.is_finite()) {
        return Err(Error::DomainError(format!("effort must be positive, got {effort}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(Tts::Unsolved);
    }
    let p = p.min(P_CLAMP);
    Ok(Tts::Finite(effort * 0.01f64.ln() / (-p).ln_1p()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub effort: u32,
    pub reads: u64,
    pub hits: u64,
    pub p_hat: f64,
}

impl SuccessEstimate {
    pub fn new(effort: u32, reads: u64, hits: u64) -> Self {
        let p_hat = if reads == 0 { 0.0 } else { hits as f64 / reads as f64 };
        SuccessEstimate {
            effort,
            reads,
            hits,
            p_hat,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub estimate: SuccessEstimate,
    pub tts: Tts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsCurve {
    pub instance_id: String,
    /// Reference energy the hits were counted against.
    pub ground_energy: f64,
    pub points: Vec<CurvePoint>,
    /// Some effort ran out of batches before reaching the hit target.
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance_id: String,
    pub t_opt: Option<u32>,
    pub tts_opt: Option<f64>,
    pub solved: bool,
}

/// The effort with the smallest finite TTS; ties go to the smaller effort.
pub fn select_optimal(curve: &TtsCurve) -> InstanceResult {
    let mut best: Option<(u32, f64)> = None;
    for p in &curve.points {
        if let Tts::Finite(v) = p.tts {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((p.estimate.effort, v));
            }
        }
    }
    InstanceResult {
        instance_id: curve.instance_id.clone(),
        t_opt: best.map(|b| b.0),
        tts_opt: best.map(|b| b.1),
        solved: best.is_some(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Sweep counts, strictly increasing.
    pub ladder: Vec<u32>,
    pub batch_size: u32,
    pub target_hits: u64,
    pub max_batches: u32,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            ladder: (1..=8).map(|i| 1 << i).collect(),
            batch_size: 500,
            target_hits: 50,
            max_batches: 20,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) || self.ladder[0] == 0 {
            return Err(Error::DomainError(format!(
                "effort ladder must be non-empty, positive and strictly increasing: {:?}",
                self.ladder
            )));
        }
        if self.batch_size == 0 || self.target_hits == 0 || self.max_batches == 0 {
            return Err(Error::DomainError("batch size, target hits and max batches must be positive".into()));
        }
        Ok(())
    }
}

/// A source of read batches for one instance.
pub trait BatchSampler {
    /// Logical outcome of `reads` reads at `effort`. `batch` numbers the
    /// batches drawn at this effort from zero, so each batch can use its
    /// own random stream.
    fn sample_batch(&self, effort: u32, batch: u32, reads: u32) -> LogicalOutcome;
}

/// Simulated annealing on a logical instance or its embedded problem.
pub struct AnnealingSampler<'a> {
    instance: &'a Instance,
    problem: Option<&'a EmbeddedProblem>,
    model: IsingModel,
    template: SamplerConfig,
}

impl<'a> AnnealingSampler<'a> {
    /// `template.seed` is the base of the per-batch streams; `template.effort`
    /// and `template.reads` are overridden per batch.
    pub fn new(instance: &'a Instance, problem: Option<&'a EmbeddedProblem>, template: SamplerConfig) -> Result<Self> {
        template.validate()?;
        use crate::sampler::ToIsing;
        let model = match problem {
            Some(p) => p.to_ising(),
            None => instance.to_ising(),
        };
        Ok(AnnealingSampler {
            instance,
            problem,
            model,
            template,
        })
    }
}

impl BatchSampler for AnnealingSampler<'_> {
    fn sample_batch(&self, effort: u32, batch: u32, reads: u32) -> LogicalOutcome {
        let config = SamplerConfig {
            effort,
            reads,
            seed: rng::derive_seed(self.template.seed, "batch", &[u64::from(effort), u64::from(batch)]),
            ..self.template.clone()
        };
        let samples = anneal(&self.model, &config);
        logical_outcome(&samples, self.problem, self.instance)
    }
}

/// Persisted outcome of one batch: the logical energy histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub batch: u32,
    pub energies: Vec<(f64, u32)>,
    pub broken_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffortRecord {
    pub effort: u32,
    pub batches: Vec<BatchRecord>,
}

impl EffortRecord {
    pub fn reads(&self) -> u64 {
        self.batches.iter().flat_map(|b| &b.energies).map(|&(_, n)| u64::from(n)).sum()
    }

    pub fn hits(&self, ground: f64) -> u64 {
        self.batches
            .iter()
            .flat_map(|b| &b.energies)
            .filter(|(e, _)| *e <= ground + crate::sampler::ENERGY_TOLERANCE)
            .map(|&(_, n)| u64::from(n))
            .sum()
    }
}

/// All batches drawn for one instance. Hit counts are always recomputed from
/// the stored histograms, so a later improvement of the reference energy
/// invalidates nothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub instance_id: String,
    pub efforts: Vec<EffortRecord>,
}

impl ProtocolRun {
    pub fn new(instance_id: &str, ladder: &[u32]) -> Self {
        ProtocolRun {
            instance_id: instance_id.to_string(),
            efforts: ladder
                .iter()
                .map(|&effort| EffortRecord {
                    effort,
                    batches: Vec::new(),
                })
                .collect(),
        }
    }

    /// Draws batches until every effort has `target_hits` hits against the
    /// registry's energy or has used `max_batches`. Whenever a batch lowers
    /// the registry entry the whole ladder is revisited, since earlier
    /// efforts may have lost hits. Returns whether the registry improved.
    pub fn extend(&mut self, sampler: &dyn BatchSampler, registry: &mut GroundTruthRegistry, cfg: &ProtocolConfig) -> Result<bool> {
        cfg.validate()?;
        let ladder: Vec<u32> = self.efforts.iter().map(|e| e.effort).collect();
        if ladder != cfg.ladder {
            return Err(Error::DomainError(format!(
                "run ladder {ladder:?} differs from configured {:?}",
                cfg.ladder
            )));
        }
        let id = self.instance_id.clone();
        let mut any_improvement = false;
        loop {
            let mut improved = false;
            for record in &mut self.efforts {
                loop {
                    let ground = registry.best(&id).unwrap_or(f64::INFINITY);
                    if record.hits(ground) >= cfg.target_hits || record.batches.len() as u32 >= cfg.max_batches {
                        break;
                    }
                    let index = record.batches.len() as u32;
                    let outcome = sampler.sample_batch(record.effort, index, cfg.batch_size);
                    if let Some((e, witness)) = &outcome.best {
                        improved |= registry.offer(&id, *e, witness, Provenance::BestSeen);
                    }
                    record.batches.push(BatchRecord {
                        batch: index,
                        energies: outcome.energies,
                        broken_fraction: outcome.broken_fraction,
                    });
                }
            }
            any_improvement |= improved;
            if !improved {
                return Ok(any_improvement);
            }
        }
    }

    /// Pooled estimates and TTS at each effort against `ground`.
    pub fn curve(&self, ground: f64, target_hits: u64) -> TtsCurve {
        let mut budget_exhausted = false;
        let points = self
            .efforts
            .iter()
            .map(|r| {
                let est = SuccessEstimate::new(r.effort, r.reads(), r.hits(ground));
                budget_exhausted |= est.hits < target_hits;
                let tts = tts(f64::from(r.effort), est.p_hat).expect("estimates lie in [0, 1]");
                CurvePoint { estimate: est, tts }
            })
            .collect();
        TtsCurve {
            instance_id: self.instance_id.clone(),
            ground_energy: ground,
            points,
            budget_exhausted,
        }
    }

    pub fn mean_broken_fraction(&self) -> f64 {
        let all: Vec<f64> = self.efforts.iter().flat_map(|r| r.batches.iter().map(|b| b.broken_fraction)).collect();
        if all.is_empty() {
            0.0
        } else {
            all.iter().sum::<f64>() / all.len() as f64
        }
    }
}

/// Runs the batch protocol from scratch and returns the curve against the
/// registry's final energy for the instance.
pub fn run_protocol(
    instance_id: &str,
    sampler: &dyn BatchSampler,
    registry: &mut GroundTruthRegistry,
    cfg: &ProtocolConfig,
) -> Result<(ProtocolRun, TtsCurve)> {
    let mut run = ProtocolRun::new(instance_id, &cfg.ladder);
    run.extend(sampler, registry, cfg)?;
    let ground = registry.best(instance_id).unwrap_or(f64::INFINITY);
    let curve = run.curve(ground, cfg.target_hits);
    Ok((run, curve))
}

/// Linear interpolation between order statistics of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub size: u32,
    pub n_instances: usize,
    pub n_unsolved: usize,
    pub p10: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p90: f64,
}

/// Quantiles of the optimal TTS over the solved instances of one size group.
pub fn aggregate(size: u32, results: &[InstanceResult]) -> Result<AggregateStats> {
    let mut values: Vec<f64> = results.iter().filter_map(|r| r.tts_opt).collect();
    if values.is_empty() {
        return Err(Error::EmptyGroup(format!("L = {size}")));
    }
    values.sort_by(f64::total_cmp);
    Ok(AggregateStats {
        size,
        n_instances: results.len(),
        n_unsolved: results.len() - values.len(),
        p10: quantile(&values, 0.10),
        p25: quantile(&values, 0.25),
        median: quantile(&values, 0.50),
        p75: quantile(&values, 0.75),
        p90: quantile(&values, 0.90),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub instance_id: String,
    pub tts_a: Option<f64>,
    pub tts_b: Option<f64>,
    /// `tts_a / tts_b` when both solved the instance.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub rows: Vec<SpeedupRow>,
    pub unsolved_a: Vec<String>,
    pub unsolved_b: Vec<String>,
}

/// Per-instance TTS ratios over the ids present in both result sets, in id order.
pub fn speedup_pairs(a: &[InstanceResult], b: &[InstanceResult]) -> SpeedupReport {
    let index: std::collections::BTreeMap<&str, &InstanceResult> = b.iter().map(|r| (r.instance_id.as_str(), r)).collect();
    let mut common: Vec<(&InstanceResult, &InstanceResult)> = a
        .iter()
        .filter_map(|ra| index.get(ra.instance_id.as_str()).map(|rb| (ra, *rb)))
        .collect();
    common.sort_by(|x, y| x.0.instance_id.cmp(&y.0.instance_id));
    common.dedup_by(|x, y| x.0.instance_id == y.0.instance_id);
    let mut report = SpeedupReport::default();
    for (ra, rb) in common {
        if ra.tts_opt.is_none() {
            report.unsolved_a.push(ra.instance_id.clone());
        }
        if rb.tts_opt.is_none() {
            report.unsolved_b.push(rb.instance_id.clone());
        }
        report.rows.push(SpeedupRow {
            instance_id: ra.instance_id.clone(),
            tts_a: ra.tts_opt,
            tts_b: rb.tts_opt,
            ratio: ra.tts_opt.zip(rb.tts_opt).map(|(x, y)| x / y),
        });
    }
    report
}

/// Number of cube isometries, and so of results per consistency check.
pub const ISOMETRY_COUNT: usize = 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometrySummary {
    pub median: Option<f64>,
    pub best: Option<f64>,
    pub worst: Option<f64>,
    /// `worst / best`; undefined when any isometry went unsolved.
    pub ratio: Option<f64>,
    pub unsolved: usize,
}

/// Spread of TTS across the 48 relabelings of one instance at a fixed effort.
pub fn isometry_consistency(results: &[InstanceResult], effort: u32) -> Result<IsometrySummary> {
    if results.len() != ISOMETRY_COUNT {
        return Err(Error::WrongCount {
            expected: ISOMETRY_COUNT,
            found: results.len(),
        });
    }
    if let Some(r) = results.iter().find(|r| r.solved && r.t_opt != Some(effort)) {
        return Err(Error::DomainError(format!(
            "result for {} uses effort {:?}, expected {effort}",
            r.instance_id, r.t_opt
        )));
    }
    let mut values: Vec<f64> = results.iter().filter_map(|r| r.tts_opt).collect();
    values.sort_by(f64::total_cmp);
    let unsolved = ISOMETRY_COUNT - values.len();
    let (best, worst) = (values.first().copied(), values.last().copied());
    Ok(IsometrySummary {
        median: (!values.is_empty()).then(|| quantile(&values, 0.5)),
        best,
        worst,
        ratio: if unsolved == 0 { best.zip(worst).map(|(b, w)| w / b) } else { None },
        unsolved,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    /// `None` for the open-ended last bin.
    pub upper: Option<f64>,
    pub count: usize,
}

/// Quarter-decade bins `[10^(i/4), 10^((i+1)/4))` for `i = 0..16`, then `[10^4, ∞)`.
pub fn ratio_histogram(ratios: &[f64]) -> Vec<HistogramBin> {
    let edges: Vec<f64> = (0..=16).map(|i| 10f64.powf(f64::from(i) / 4.0)).collect();
    let mut bins: Vec<HistogramBin> = edges
        .iter()
        .enumerate()
        .map(|(i, &lower)| HistogramBin {
            lower,
            upper: edges.get(i + 1).copied(),
            count: 0,
        })
        .collect();
    for &r in ratios {
        let slot = edges.iter().rposition(|&e| r >= e).unwrap_or(0);
        bins[slot].count += 1;
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(points: &[(u32, Option<f64>)]) -> TtsCurve {
        TtsCurve {
            instance_id: "i".into(),
            ground_energy: -1.0,
            points: points
                .iter()
                .map(|&(effort, t)| CurvePoint {
                    estimate: SuccessEstimate::new(effort, 10, u64::from(t.is_some())),
                    tts: t.into(),
                })
                .collect(),
            budget_exhausted: false,
        }
    }

    fn result(id: &str, t: Option<f64>) -> InstanceResult {
        InstanceResult {
            instance_id: id.into(),
            t_opt: t.map(|_| 128),
            tts_opt: t,
            solved: t.is_some(),
        }
    }

    #[test]
    fn tts_reference_values() {
        let one = tts(1.0, 0.99).unwrap().value().unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let Tts::Finite(v) = tts(2.0, 0.5).unwrap() else { panic!() };
        assert!((v - 2.0 * 0.01f64.ln() / 0.5f64.ln()).abs() < 1e-12);
        assert!((v - 13.287712379549449).abs() < 1e-9);
        assert_eq!(tts(8.0, 0.0).unwrap(), Tts::Unsolved);
        let Tts::Finite(tiny) = tts(4.0, 1.0).unwrap() else { panic!() };
        assert!(tiny > 0.0 && tiny < 1.0);
        assert!(tts(1.0, 1.5).is_err() && tts(1.0, -0.1).is_err() && tts(0.0, 0.5).is_err());
        assert!(tts(1.0, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn tts_monotone(e in 0.1f64..1e4, p in 0.001f64..0.998, dp in 0.0005f64..0.001) {
            let a = tts(e, p).unwrap().value().unwrap();
            let b = tts(e, p + dp).unwrap().value().unwrap();
            prop_assert!(b < a);
            let c = tts(e * 1.5, p).unwrap().value().unwrap();
            prop_assert!(c > a);
        }

        #[test]
        fn unit_identity(e in 0.001f64..1e6) {
            let v = tts(e, 0.99).unwrap().value().unwrap();
            prop_assert!(((v - e) / e).abs() < 1e-12);
        }

        #[test]
        fn quantiles_are_ordered(mut v in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let results: Vec<InstanceResult> = v.iter_mut().enumerate().map(|(i, x)| result(&i.to_string(), Some(x.abs() + 1.0))).collect();
            let s = aggregate(3, &results).unwrap();
            prop_assert!(s.p10 <= s.p25 && s.p25 <= s.median && s.median <= s.p75 && s.p75 <= s.p90);
        }

        #[test]
        fn optimum_is_minimal(ts in prop::collection::vec(prop::option::of(0.1f64..1e3), 1..9)) {
            let pts: Vec<(u32, Option<f64>)> = ts.iter().enumerate().map(|(i, t)| (2u32 << i, *t)).collect();
            let r = select_optimal(&curve(&pts));
            prop_assert_eq!(r.solved, ts.iter().any(Option::is_some));
            for t in ts.iter().flatten() {
                prop_assert!(r.tts_opt.unwrap() <= *t);
            }
        }
    }

    #[test]
    fn optimal_effort() {
        let r = select_optimal(&curve(&[(2, Some(40.0)), (4, Some(10.0)), (8, Some(30.0))]));
        assert_eq!((r.t_opt, r.tts_opt, r.solved), (Some(4), Some(10.0), true));
        let r = select_optimal(&curve(&[(2, None), (4, None)]));
        assert!(!r.solved && r.t_opt.is_none());
        let r = select_optimal(&curve(&[(16, Some(3.0))]));
        assert_eq!(r.t_opt, Some(16));
        let r = select_optimal(&curve(&[(2, Some(5.0)), (4, Some(5.0))]));
        assert_eq!(r.t_opt, Some(2));
    }

    #[test]
    fn aggregate_cases() {
        let results: Vec<InstanceResult> = (1..=100).map(|i| result(&i.to_string(), Some(f64::from(i)))).collect();
        let s = aggregate(5, &results).unwrap();
        assert_eq!(s.median, 50.5);
        assert!((s.p10 - 10.9).abs() < 1e-12 && (s.p90 - 90.1).abs() < 1e-12);
        let s = aggregate(5, &[result("a", Some(7.0))]).unwrap();
        assert_eq!([s.p10, s.p25, s.median, s.p75, s.p90], [7.0; 5]);
        let mut results: Vec<InstanceResult> = (1..=97).map(|i| result(&i.to_string(), Some(f64::from(i)))).collect();
        results.extend((0..3).map(|i| result(&format!("u{i}"), None)));
        let s = aggregate(8, &results).unwrap();
        assert_eq!((s.n_instances, s.n_unsolved, s.median), (100, 3, 49.0));
        assert!(matches!(aggregate(8, &[result("u", None)]), Err(Error::EmptyGroup(_))));
    }

    #[test]
    fn speedups() {
        let a = vec![result("x", Some(800.0)), result("y", None), result("z", Some(3.0))];
        let b = vec![result("x", Some(1.0)), result("y", Some(2.0)), result("w", Some(1.0))];
        let r = speedup_pairs(&a, &b);
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].ratio, Some(800.0));
        assert_eq!(r.rows[1].ratio, None);
        assert_eq!(r.unsolved_a, vec!["y".to_string()]);
        assert!(r.unsolved_b.is_empty());
        let same = speedup_pairs(&a, &a);
        assert!(same.rows.iter().filter_map(|r| r.ratio).all(|x| x == 1.0));
    }

    #[test]
    fn isometry_summaries() {
        let all: Vec<InstanceResult> = (0..48).map(|i| result(&i.to_string(), Some(5.0))).collect();
        let s = isometry_consistency(&all, 128).unwrap();
        assert_eq!((s.ratio, s.median, s.unsolved), (Some(1.0), Some(5.0), 0));
        assert!(matches!(
            isometry_consistency(&all[..47], 128),
            Err(Error::WrongCount { expected: 48, found: 47 })
        ));
        let mut mixed = all.clone();
        mixed[3] = result("3", None);
        mixed[4] = result("4", Some(20.0));
        let s = isometry_consistency(&mixed, 128).unwrap();
        assert_eq!((s.ratio, s.unsolved, s.worst), (None, 1, Some(20.0)));
        assert!(isometry_consistency(&all, 64).is_err());
    }

    #[test]
    fn histogram_bins() {
        let h = ratio_histogram(&[1.0, 1.5, 1.8, 10.0, 1e5]);
        assert_eq!(h.len(), 17);
        assert_eq!(h[0].lower, 1.0);
        assert_eq!(h[4].lower, 10.0);
        assert_eq!(h[16].upper, None);
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>()[..5], [2, 1, 0, 0, 1]);
        assert_eq!(h[16].count, 1);
    }

    /// Reads hit the ground state `-1` independently with probability `p`.
    struct Bernoulli {
        p: f64,
        seed: u64,
    }

    impl BatchSampler for Bernoulli {
        fn sample_batch(&self, effort: u32, batch: u32, reads: u32) -> LogicalOutcome {
            use rand::Rng;
            let mut rng = rng::stream(self.seed, "stub", &[u64::from(effort), u64::from(batch)]);
            let hits = (0..reads).filter(|_| rng.gen::<f64>() < self.p).count() as u32;
            let mut energies = Vec::new();
            if hits > 0 {
                energies.push((-1.0, hits));
            }
            if hits < reads {
                energies.push((0.0, reads - hits));
            }
            LogicalOutcome {
                energies,
                best: Some((if hits > 0 { -1.0 } else { 0.0 }, vec![1])),
                broken_fraction: 0.0,
            }
        }
    }

    #[test]
    fn certain_success_takes_one_batch() {
        let cfg = ProtocolConfig {
            ladder: vec![2, 4, 8],
            ..ProtocolConfig::default()
        };
        let mut reg = GroundTruthRegistry::new();
        reg.offer("s", -1.0, &[1], Provenance::Exact);
        let (run, curve) = run_protocol("s", &Bernoulli { p: 1.0, seed: 0 }, &mut reg, &cfg).unwrap();
        assert!(run.efforts.iter().all(|r| r.batches.len() == 1));
        assert!(curve.points.iter().all(|p| p.estimate.hits == 500 && p.tts.is_finite()));
        assert!(!curve.budget_exhausted);
    }

    #[test]
    fn unsolved_effort_is_flagged() {
        let cfg = ProtocolConfig {
            ladder: vec![2],
            max_batches: 3,
            ..ProtocolConfig::default()
        };
        let mut reg = GroundTruthRegistry::new();
        reg.offer("s", -1.0, &[1], Provenance::Exact);
        let (run, curve) = run_protocol("s", &Bernoulli { p: 0.0, seed: 0 }, &mut reg, &cfg).unwrap();
        assert_eq!(run.efforts[0].batches.len(), 3);
        assert_eq!(curve.points[0].tts, Tts::Unsolved);
        assert!(curve.budget_exhausted);
    }

    #[test]
    fn improvement_recounts_every_effort() {
        // Effort 2 never sees -1; once effort 4 finds it the reference drops
        // and effort 2 is topped up again and reported unsolved.
        struct Split;
        impl BatchSampler for Split {
            fn sample_batch(&self, effort: u32, _: u32, reads: u32) -> LogicalOutcome {
                let e = if effort == 2 { 0.0 } else { -1.0 };
                LogicalOutcome {
                    energies: vec![(e, reads)],
                    best: Some((e, vec![1])),
                    broken_fraction: 0.0,
                }
            }
        }
        let cfg = ProtocolConfig {
            ladder: vec![2, 4],
            max_batches: 4,
            ..ProtocolConfig::default()
        };
        let mut reg = GroundTruthRegistry::new();
        let (run, curve) = run_protocol("s", &Split, &mut reg, &cfg).unwrap();
        assert_eq!(reg.best("s"), Some(-1.0));
        assert_eq!(run.efforts[0].batches.len(), 4);
        assert_eq!(curve.points[0].tts, Tts::Unsolved);
        assert_eq!(curve.points[1].estimate.p_hat, 1.0);
        assert_eq!(curve.ground_energy, -1.0);
    }

    #[test]
    fn curve_json_marks_unsolved_as_null() {
        let c = curve(&[(2, None), (4, Some(3.5))]);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"tts\":null") && text.contains("\"tts\":3.5"));
        assert_eq!(serde_json::from_str::<TtsCurve>(&text).unwrap(), c);
    }
}
