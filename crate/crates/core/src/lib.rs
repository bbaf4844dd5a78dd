//! Key-node identification on hypergraphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`hypergraph`]: incidence structure, ingestion, degree accounting, node removal.
//! - [`sline`]: s-line graphs, hyperedge and node s-distances.
//! - [`generators`]: uniform ERH / WSH / SFH synthetic hypergraphs.
//! - [`diffusion`]: single-hyperedge-activation SIR and ground-truth influence labels.
//! - [`centrality`]: DC, HEDC, VC, HCC and HDF baselines.
//! - [`fractal`]: fractal dimensions and representative-node selection.
//! - [`neural`]: HGNN autoencoder, ListMLE ranker, Adam, training loops.
//! - [`eval`]: Kendall tau, rank overlap, s-efficiency and dismantling curves.
//! - [`pipeline`]: end-to-end orchestration used by the CLI and the acceptance suite.

pub mod centrality;
pub mod diffusion;
pub mod error;
pub mod eval;
pub mod fractal;
pub mod generators;
pub mod hypergraph;
pub mod neural;
pub mod pipeline;
pub mod rng;
pub mod score;
pub mod sline;

pub use error::{Error, Result};
pub use hypergraph::{DegreeProfile, GraphStats, Hypergraph, NodeLabels};
pub use score::ScoreVector;
