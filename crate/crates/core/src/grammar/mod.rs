//! Part-of-speech tagging and skeleton templates.
//!
//! A haiku corpus line such as "the pale winter sun" is tagged and reduced
//! to a skeleton: closed-class tokens stay literal and every open-class
//! token becomes a slot carrying its tag and syllable budget. Three
//! skeletons with totals 5, 7 and 5 make a template.

mod skeleton;
mod tagger;

use thiserror::Error;

pub use skeleton::{
    assemble_template, extract_skeletons, ExtractStats, HaikuTemplate, SkeletonFragment,
    SkeletonPool, Slot, HAIKU_FORM,
};
pub use tagger::{PosTag, TagLexicon, SEED_TAGS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("haiku corpus is empty")]
    EmptyCorpus,
    #[error("no corpus line scans as five syllables")]
    NoFiveFragments,
    #[error("no corpus line scans as seven syllables")]
    NoSevenFragments,
    #[error("skeleton pool needs at least one 5- and one 7-syllable fragment")]
    InsufficientFragments,
    #[error("unknown part-of-speech tag {0:?}")]
    UnknownTag(String),
    #[error("tag lexicon line {line}: expected word<TAB>TAG")]
    MalformedTagRow { line: usize },
    #[error("{0}")]
    Io(String),
}

impl GrammarError {
    pub fn code(&self) -> &'static str {
        match self {
            GrammarError::EmptyCorpus => "EmptyCorpus",
            GrammarError::NoFiveFragments => "NoFiveFragments",
            GrammarError::NoSevenFragments => "NoSevenFragments",
            GrammarError::InsufficientFragments => "InsufficientFragments",
            GrammarError::UnknownTag(_) => "UnknownTag",
            GrammarError::MalformedTagRow { .. } => "MalformedTagRow",
            GrammarError::Io(_) => "Io",
        }
    }
}
