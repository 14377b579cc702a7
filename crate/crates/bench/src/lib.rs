//! Shared fixtures for the criterion benchmarks.

use pepqubo::chem_model::{cluster_alphabet, reduce_model, InteractionModel, ModelParams, RawTables};
use pepqubo::pipeline::{prepare, RunConfig};
use pepqubo::pocket::{compute_external_field, ExternalField, PocketLattice, ProteinStructure};
use pepqubo::qubo::{build_stage1_qubo, QuboProblem, Stage1Params};
use pepqubo::synthetic::toy_pocket;

pub struct Fixture {
    pub protein: ProteinStructure,
    pub lattice: PocketLattice,
    pub field: ExternalField,
    pub model: InteractionModel,
    pub params: Stage1Params,
    pub problem: QuboProblem,
}

/// Toy pocket prepared the way the pipeline does it, with `families` families.
pub fn toy(families: usize) -> Fixture {
    let mut cfg = RunConfig::default();
    cfg.stage1.families = families;
    let prep = prepare(&cfg).unwrap();
    let field = compute_external_field(&prep.lattice, &prep.protein, &prep.reduced, 0.0).unwrap();
    let problem = build_stage1_qubo(&prep.lattice, &field, &prep.reduced, &prep.params).unwrap();
    Fixture {
        protein: prep.protein,
        lattice: prep.lattice,
        field,
        model: prep.reduced,
        params: prep.params,
        problem,
    }
}

/// Straight three-point line, small enough for exhaustive search.
pub fn line(families: usize) -> QuboProblem {
    let raw = RawTables::builtin();
    let model = reduce_model(&raw, &cluster_alphabet(&raw, families, 0).unwrap(), &ModelParams::default()).unwrap();
    let lattice = PocketLattice::box_lattice([1, 3, 1], 3.8).unwrap().with_endpoints(0, 2).unwrap();
    let protein = toy_pocket().protein;
    let field = compute_external_field(&lattice, &protein, &model, 0.0).unwrap();
    build_stage1_qubo(&lattice, &field, &model, &Stage1Params::new(2)).unwrap()
}
