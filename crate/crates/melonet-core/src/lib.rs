//! melonet-core converts symbolic music scores into weighted directed
//! note-transition networks and computes the complex-network metrics used
//! to characterize them: degree structure, distances, clustering,
//! betweenness, small-world coefficient, and community modularity.
//!
//! Pipeline: parse a score (`score`), build the network (`graph`), then
//! analyze it (`metrics`, `smallworld`, `community`) one track at a time
//! or across a directory (`corpus`).

pub mod community;
pub mod corpus;
mod error;
pub mod graph;
pub mod metrics;
pub mod score;
pub mod smallworld;

pub use error::{Error, Result};
pub use graph::{build_network, GraphKind, MelodyNetwork, NodeLabel};
pub use score::{Duration, EventKind, MelodyEvent, ParseOutput, Pitch, PitchClass};

// Compile and run the README's code example as a doctest.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
