//! Founder-screening pipeline built from LLM-generated YES/NO questions.
//!
//! Each question acts as a weak binary classifier over founder profiles.
//! The pipeline generates candidate questions in feedback-driven rounds,
//! scores them on labeled batches, filters and de-duplicates them on a
//! validation split, and aggregates the survivors with threshold voting
//! tuned by constrained grid search.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`dataset`]: founder records, synthetic split generation, profile
//!   rendering, insight summaries, expert descriptors.
//! - [`oracle`]: the LLM boundary. Prompt builders, response parsers, an
//!   HTTP chat-completions backend, and a deterministic mock backend that
//!   answers questions by evaluating structured predicates.
//! - [`questgen`]: the iterative generate/evaluate/score/feedback loop
//!   that accumulates the candidate question pool.
//! - [`metrics`]: confusion counts, precision/recall, the answer matrix,
//!   and incremental precision trajectories.
//! - [`refine`]: precision filtering, Jaccard de-duplication, and ranking.
//! - [`ensemble`]: threshold voting, constrained grid search, heatmap
//!   data, and held-out evaluation.

pub mod dataset;
pub mod ensemble;
pub mod metrics;
pub mod oracle;
pub mod questgen;
pub mod refine;
mod seeding;
