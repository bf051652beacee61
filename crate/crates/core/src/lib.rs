//! Topic and topic-burst mapping for time-stamped publication corpora.
//!
//! The pipeline runs in stages:
//!
//! 1. [`corpus`]: ingest line-delimited records, keep the most cited
//!    documents per year and extract title words and keyword phrases.
//! 2. [`term_stats`]: per-term yearly document counts and frequency ranking.
//! 3. [`burst`]: burst detection over each term's yearly series with a
//!    multi-state rate automaton.
//! 4. [`coword`]: pick the map vocabulary from the frequency and burst
//!    rankings and count document-level co-occurrences.
//! 5. [`pathfinder`]: prune the co-occurrence network with PFNet(r, q).
//! 6. [`layout`]: Fruchterman-Reingold placement.
//! 7. [`map_render`]: SVG topic map, Pajek export and a frequency chart.
//!
//! [`pipeline`] wires the stages together through plain-text artifacts.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burst;
pub mod corpus;
pub mod coword;
pub mod error;
pub mod layout;
pub mod map_render;
pub mod matrix;
pub mod pathfinder;
pub mod pipeline;
pub mod term_stats;

pub use error::{Error, Result};
