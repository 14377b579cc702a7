//! Receptor ingestion, the in-pocket lattice, and the precomputed field.

mod contacts;
mod field;
mod lattice;
mod pdb;

pub use contacts::{
    contacts_per_residue, estimate_contacts, partial_contacts, ContactEstimate, ContactOptions, PosedResidue,
};
pub use field::{compute_external_field, mean_field_offset, ExternalField};
pub use lattice::{
    build_lattice, choose_endpoints, principal_axes, LatticeParams, PocketLattice, DEFAULT_CLASH_FACTOR,
    DEFAULT_RADIUS, DEFAULT_SPACING,
};
pub use pdb::{format_ca_records, parse_models, parse_pdb_str, parse_structure, ProteinStructure, Residue};
