//! Candidate recommendation and evaluation engine for photo lineup assembly.
//!
//! The crate is organised around the life of a lineup:
//!
//! - [`catalog`] ingests the person dataset and derives token vocabularies.
//! - [`recommenders`] builds the attribute (TF-IDF) and visual-descriptor
//!   similarity indices and answers exact top-k queries.
//! - [`interleave`] merges two ranked lists by seeded coin flips.
//! - [`session`] drives an interactive assembly session with an append-only
//!   event log and iterative re-ranking.
//! - [`fairness`] estimates lineup bias with simulated mock witnesses.
//! - [`studylab`] computes selection statistics, Krippendorff's alpha and
//!   paired t-tests from study logs.
//!
//! Scoring loops run on rayon when the `parallel` feature is enabled (the
//! default). Every such loop also has a sequential path selected through
//! [`Execution`], and both paths produce identical results.

pub mod catalog;
pub mod descriptor_file;
mod error;
pub mod fairness;
pub mod interleave;
mod par;
pub mod recommenders;
pub mod rng;
pub mod session;
pub mod studylab;

pub use catalog::{AgeGroup, Catalog, DatasetStats, PersonRecord};
pub use error::{Error, Result};
pub use interleave::{interleave_lists, Arm, MergedEntry, MergedList, Provenance};
pub use par::Execution;
pub use recommenders::{
    cosine_dense, cosine_sparse, hybrid_score, top_k, CbIndex, DescriptorMatrix, RankedList,
    ScoredCandidate, SimilarityIndex, SparseVector, Strategy,
};
pub use session::{AssemblySession, Engine, FeedbackEvent, LineupRecord, SessionParams};
