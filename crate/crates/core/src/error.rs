use alloc::string::String;

use thiserror::Error;

use crate::lattice::LatticeKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("L = {size} is not compatible with the {kind} lattice (must be a positive multiple of {step})", step = kind.size_step())]
    IncompatibleSize { kind: LatticeKind, size: u32 },
    #[error("L = {size} is too small for a periodic {kind} lattice")]
    TooSmall { kind: LatticeKind, size: u32 },
    #[error("L = {size} is too large for the {kind} lattice")]
    TooLarge { kind: LatticeKind, size: u32 },
    #[error("invalid graph: {0}")]
    InvalidGraph(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("configuration has {config} labels but the lattice has {sites} sites")]
    SizeMismatch { config: usize, sites: usize },
    #[error("site {0} is out of range")]
    SiteOutOfRange(u32),
    #[error("proposed label equals the current label at site {0}")]
    SameLabel(u32),
    #[error("configuration contains a monochromatic triangle")]
    Frustrated,
    #[error("invalid chain parameters: {0}")]
    InvalidParams(&'static str),
    #[error("observer failed: {0}")]
    Observer(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PercolationError {
    #[error("lattice has no boundary columns; spanning needs a generated lattice")]
    MissingBoundary,
    #[error("graph provenance does not match the lattice")]
    ProvenanceMismatch,
    #[error("no graphs to sweep")]
    EmptyStream,
    #[error("deletion probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("need curves for at least two system sizes")]
    TooFewSizes,
    #[error("spanning probability at L = {size} never crosses 1/2 on the grid (p_span from {first} to {last})")]
    NoCrossing { size: u32, first: f64, last: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(u32),
    #[error("vertex {0} is measured twice")]
    RepeatedVertex(u32),
    #[error("the {0} lattice has no reduction to the honeycomb")]
    NoReduction(LatticeKind),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
