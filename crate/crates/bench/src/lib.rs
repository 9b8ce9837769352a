//! Shared fixtures for the criterion benchmarks in `benches/`.

use glassbench::embedding::{set_parameters, EmbeddedProblem, EmbeddingMap};
use glassbench::lattice::{build_lattice, generate_instance, Instance, LatticeSpec};
use glassbench::topology::{build_ideal, HardwareGraph, Shape};

pub fn chimera() -> HardwareGraph {
    build_ideal(Shape::Chimera { rows: 16, cols: 16, shore: 4 }).expect("valid shape")
}

pub fn pegasus() -> HardwareGraph {
    build_ideal(Shape::Pegasus { m: 16 }).expect("valid shape")
}

pub fn cube_instance(l: u32, seed: u64) -> Instance {
    let lattice = build_lattice(LatticeSpec::cube(l).expect("positive side"));
    generate_instance(&lattice, seed).expect("full lattice")
}

/// Instance on the canonical embedding of an `l`-cube, with chain strength 2.
pub fn embedded(graph: &HardwareGraph, l: u32, seed: u64) -> (Instance, EmbeddingMap, EmbeddedProblem) {
    let spec = LatticeSpec::cube(l).expect("positive side");
    let emb = glassbench::embedding::embed_cubic_at(spec, graph, (0, 0)).expect("cube fits");
    let instance = cube_instance(l, seed);
    let problem = set_parameters(&instance, &emb, 2.0).expect("covering embedding");
    (instance, emb, problem)
}
