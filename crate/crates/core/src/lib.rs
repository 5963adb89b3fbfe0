//! Classical Monte Carlo for the POVM-outcome ensemble of spin-3/2 AKLT states
//! on trivalent Archimedean lattices.
//!
//! A configuration assigns one of three labels to each lattice site. Sites
//! joined by same-label edges form domains; the domains, with inter-domain
//! edges reduced modulo two, form the graph of the post-measurement graph
//! state. This crate samples configurations with weight `2^(|V| - |E|)`,
//! builds those graphs, measures their statistics, runs deletion percolation
//! on them and implements the Pauli-measurement graph rewrites used to relate
//! cluster states on different lattices.
//!
//! The crate is `no_std` with `alloc`. File formats, parallel campaigns and the
//! command line live in the companion `aklt` crate.

#![no_std]

extern crate alloc;

pub mod domain;
pub mod error;
pub mod graph_rules;
pub mod lattice;
pub mod percolation;
pub mod sampler;
pub mod stats;
pub mod union_find;

pub use domain::{
    build_domain_graph, compute_stats, identify_domains, DomainGraph, DomainPartition, GraphSample, GraphStats,
};
pub use error::{GraphError, LatticeError, PercolationError, SamplerError, StatsError};
pub use graph_rules::{
    local_complement, measure_pauli, reduce_to_honeycomb, suppress_degree2, MeasurementPattern, Pauli, Reduction,
    SimpleGraph,
};
pub use lattice::{build_lattice, enumerate_triangles, Boundary, Lattice, LatticeKind};
pub use percolation::{
    bare_lattice_percolation, deletion_sweep, estimate_threshold, spans, DeletionMode, PercolationCurve, SpanRule,
    Threshold,
};
pub use sampler::{
    local_acceptance, metropolis_sweep, run_chain, weight_exponent, ChainParams, ChainSummary, Measurement, Observer,
    PovmConfig, PovmLabel, Sampler,
};
pub use stats::Estimate;
