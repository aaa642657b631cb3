//! Color-cohomology machinery and decoders for 3D color-code circuits.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf2`]: sparse linear algebra over the two-element field,
//! - [`colex`]: colored cell complexes (hexagonal 2-colexes, bitruncated-cubic
//!   3-colexes) with vertex signs and time slicing,
//! - [`cohomology`]: cellular and color chain complexes, chain maps between
//!   them, and boundary variants,
//! - [`action`]: the mod-8 path-integral action, cup products, flux pairing
//!   and twisted charge detectors,
//! - [`defects`]: flux/charge configurations, noise sampling, syndromes and
//!   logical verdicts,
//! - [`matching`]: exact minimum-weight perfect matching on defect graphs,
//! - [`decoders`]: global flux/charge decoders, just-in-time flux decoding
//!   and twisted charge decoding,
//! - [`harness`]: seeded Monte Carlo driver producing logical error rates.

pub mod action;
pub mod cohomology;
pub mod colex;
pub mod decoders;
pub mod defects;
pub mod gf2;
pub mod harness;
pub mod matching;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Lattice construction rejected the requested dimensions or topology.
    #[error("lattice construction: {0}")]
    Construction(String),
    /// An operation was asked for an unsupported combination (direction,
    /// topology, boundary placement).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Input data violates a documented precondition (e.g. a syndrome that is
    /// not in the image of the coboundary map).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A linear system that the caller expected to be solvable was not.
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    /// Malformed configuration or serialized record.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
