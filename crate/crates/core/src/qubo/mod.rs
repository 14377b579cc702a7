//! Variable registry, QUBO assembly for both design stages, Ising form,
//! resource counts and the interchange format.

mod counts;
mod interchange;
mod ising;
mod problem;
mod registry;
mod stage1;
mod stage2;

pub use counts::{box_bonds, count_for_lattice, count_variables, VariableCounts};
pub use interchange::{
    export_problem, import_problem, ising_to_json, problem_from_json, qubo_to_json, AnyProblem, ProblemKind,
};
pub use ising::{bits_to_spins, ising_to_qubo, spins_to_bits, to_ising, IsingProblem};
pub use problem::{QuboBuilder, QuboMeta, QuboProblem};
pub use registry::{Layout, VarLabel, VariableRegistry};
pub use stage1::{
    build_stage1_qubo, physical_scale, stage1_terms, LengthWeight, PenaltyPolicy, Stage1Params, TermEnergies,
};
pub use stage2::{build_stage2_qubo, validate_path};
