//! Registry of graph-pair constructions, claim reproduction, BREC-style pair
//! suites and report emission on top of `pipe-core`.

pub mod checks;
pub mod pair_suite;
pub mod registry;
pub mod reconstruct;
pub mod report;
pub mod reproduce;
pub mod tables;

use pipe_core::encode::EncodeError;
use pipe_core::persist::PersistError;
use pipe_core::pipe::PipeError;
use pipe_core::wl::WlError;
use pipe_core::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown claim id {0:?}")]
    UnknownId(String),
    #[error("scale parameter must be >= 1, got {0}")]
    Scale(usize),
    #[error("unknown report format {0:?} (expected json or tsv)")]
    UnknownFormat(String),
    #[error("unknown method {0:?} (expected ph, ph_lpe or pipe)")]
    UnknownMethod(String),
    #[error("pair corpus has an odd number of graphs ({0})")]
    OddLineCount(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Reconstruct(#[from] reconstruct::ReconstructError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Persist(#[from] PersistError),
    #[error(transparent)]
    Pipe(#[from] PipeError),
    #[error(transparent)]
    Wl(#[from] WlError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
