//! Benchmark toolkit for embedded three-dimensional spin glasses.
//!
//! The crate covers the whole pipeline: hardware connectivity graphs
//! ([`topology`]), logical lattices and their cube symmetries ([`lattice`]),
//! minor embeddings with chain-strength parameter setting ([`embedding`]),
//! exact and simulated-annealing samplers ([`sampler`]) and the
//! time-to-solution protocol with its aggregate statistics ([`metrics`]).
//! [`verify`] bundles the structural invariants into a self-check suite.

pub mod embedding;
pub mod error;
pub mod lattice;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod topology;
pub mod verify;

pub use embedding::{
    embed_cubic_chimera, embed_cubic_pegasus, maximize_yield, physical_energy, set_parameters,
    unembed, validate_embedding, BrokenChainReport, Chain, EmbeddedProblem, EmbeddingMap,
    ValidationReport, YieldReport,
};
pub use error::{Error, Result};
pub use lattice::{
    apply_isometry, build_lattice, enumerate_isometries, generate_instance, logical_energy, Axis,
    Instance, Isometry, LatticeEdge, LatticeSpec, LogicalGraph, Site, SpinAssignment,
};
pub use metrics::{
    aggregate, isometry_consistency, run_protocol, select_optimal, speedup_pairs, tts,
    AggregateStats, InstanceResult, ProtocolConfig, SuccessEstimate, Tts, TtsCurve,
};
pub use sampler::{
    count_ground_hits, sample_sa, solve_exact, GroundTruthRegistry, IsingModel, SampleSet,
    SamplerConfig, SamplerKind,
};
pub use topology::{
    apply_defects, build_chimera, build_pegasus, graph_stats, sample_defect_mask, Coupler,
    DefectMask, Family, GraphStats, HardwareGraph, QubitId, Shape,
};
