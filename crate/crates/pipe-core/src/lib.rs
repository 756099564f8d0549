//! Positional encodings, vertex-colour persistent homology, Weisfeiler-Leman
//! refinement and the PiPE message-passing layer for small simple graphs.
//!
//! Everything operates on dense `0..n` vertex labels and is deterministic.

pub mod encode;
pub mod graphcore;
pub mod persist;
pub mod pipe;
pub mod rng;
pub mod spectral;
pub mod wl;

pub use graphcore::{BettiPair, Graph, GraphError};
