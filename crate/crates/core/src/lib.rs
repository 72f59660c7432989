//! Multistability of bi-reaction networks under mass-action kinetics.
//!
//! A network of two irreversible reactions whose stoichiometric subspace is
//! one-dimensional is classified exactly from its stoichiometric
//! coefficients ([`criterion::decide`]). For multistable networks,
//! [`witness::make_witness`] builds rate constants and total constants with
//! at least two stable positive steady states, and [`verifier`] certifies
//! any parameter choice independently.

pub mod criterion;
pub mod gfunction;
pub mod network;
pub mod parser;
pub mod poly;
pub mod report;
pub mod verifier;
pub mod witness;

pub use criterion::{decide, subset_in_open_interval, Case, Verdict};
pub use gfunction::{GeometryParams, Limit, RootReport};
pub use network::{
    analyze_network, partition_indices, reduce_s5, stoich_data, Applicability, IndexPartition, SpeciesSet, StoichData,
};
pub use parser::{parse_network, serialize_network, BiNetwork, ParseError, Reaction};
