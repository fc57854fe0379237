//! Charge functions of n-dimensional partitions.
//!
//! The charge function `psi(u)` of a partition is a product of linear
//! factors in `u` whose roots sit on the projected lattice
//! `Z^n / (1, ..., 1)`. Everything here is exact: pole orders are kept as
//! signed integers per projected point, and the optional rational oracle
//! uses arbitrary-precision weights.
//!
//! - [`lattice`]: boxes, partitions, addable/removable sets.
//! - [`projection`]: projected points and generic weights.
//! - [`charge`]: pole ledgers, the potential function, property checks.
//! - [`oracle`]: independent expansion on rational roots.
//! - [`hypercube`]: down-sets of Boolean hypercubes.
//! - [`lemma`]: exhaustive pole-order checks on hypercube down-sets.
//! - [`sampler`]: Monte Carlo checks for hypercubes too large to enumerate.

pub mod charge;
pub mod cli;
pub mod error;
pub mod hypercube;
pub mod lattice;
pub mod lemma;
pub mod oracle;
pub mod projection;
pub mod sampler;

pub use charge::{
    build_ledger, build_ledger_with, cluster_projection, enumerate_clusters, phi1_4d_symmetric_equiv,
    pole_order, potential_omega0, verify_properties, verify_properties_with, ChargeModel, Cluster,
    LedgerOptions, PoleLedger, PropertyReport,
};
pub use error::{Error, MeltingViolation, Result};
pub use hypercube::{
    count_downsets, enumerate_downsets, fold_downsets, hypercube_g_characterization, CellMask,
    HypercubeConfig,
};
pub use lattice::{make_hypercube, validate_partition, LatticeBox, Partition};
pub use lemma::{neighbor_count, omega_hypercube_closed_form, verify_lemma, LemmaReport, TargetProbe};
pub use oracle::rational_oracle_ledger;
pub use projection::{eval_point, generic_weights, ProjectedPoint, WeightAssignment};
pub use sampler::{
    run_mc_experiment, sample_downset_chain, sample_downset_sequential, McParams, McReport,
    SampleMethod, SampleRecord,
};
