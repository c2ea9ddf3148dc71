//! Haiku and renga generation.
//!
//! Corpus haiku lines are reduced to part-of-speech skeletons, and the open
//! slots are filled under exact syllable budgets by a beam search that
//! prefers likely n-grams and words close to a topic vector. Renga sessions
//! chain haikus, blending the previous link with each link's prompt and
//! choosing among candidates by a filter.

pub mod cli;
pub mod engine;
pub mod error;
pub mod evaluation;
#[cfg(test)]
mod fixture;
pub mod generator;
pub mod grammar;
pub mod ngram;
pub mod phonology;
pub mod renga;
pub mod semantics;
pub mod service;
pub mod text;

pub use engine::Engine;
pub use error::Error;
pub use generator::{GenConfig, Haiku};
pub use renga::{RengaRuleset, RengaSession};
