//! Ranking of alternatives on a hierarchy of interacting criteria.
//!
//! The pipeline per parameter vector is: partial concordance/discordance per
//! elementary criterion ([`electre`]), credibility at every non-elementary
//! node, descending and ascending distillation and their intersection
//! ([`ranking`]). Weights come from card decks ([`srf`]); [`smaa`] samples
//! every vector compatible with imprecise decks and aggregates how often each
//! preference, indifference or incomparability occurs.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod document;
pub mod electre;
pub mod error;
pub mod model;
pub mod ranking;
pub mod smaa;
pub mod srf;

pub use document::{parse_problem, LoadedProblem, ProblemDocument, ReportDocument, ReportFormat};
pub use error::{Error, Result};
pub use model::{NodeIdx, Problem};
pub use smaa::{run_smaa, SamplingConfig, SmaaReport};
