//! Renga sessions: a chain of haiku links under a ruleset of per-link
//! prompts, with form and repetition checks and turns that may be taken by
//! the machine or a human.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::engine::Engine;
use crate::evaluation::{select, Criterion, EvaluationError, FilterKind};
use crate::generator::{generate_for_topic, GenConfig, GenerateError, Haiku};
use crate::grammar::{TagLexicon, HAIKU_FORM};
use crate::semantics::{blend, SemanticsError, TopicVector};
use crate::text::lemma;

pub const MIN_LINKS: usize = 2;
pub const MAX_LINKS: usize = 100;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum RengaError {
    #[error("invalid ruleset: {0}")]
    InvalidRuleset(String),
    #[error("session is complete")]
    SessionComplete,
    #[error("every candidate for link {link} broke a constraint, twice")]
    AllCandidatesViolate { link: usize },
    #[error("verse rejected with {} violation(s)", .0.len())]
    Rejected(Vec<Violation>),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
}

impl RengaError {
    pub fn code(&self) -> &'static str {
        match self {
            RengaError::InvalidRuleset(_) => "InvalidRuleset",
            RengaError::SessionComplete => "SessionComplete",
            RengaError::AllCandidatesViolate { .. } => "AllCandidatesViolate",
            RengaError::Rejected(_) => "ConstraintViolation",
            RengaError::Generate(e) => e.code(),
            RengaError::Semantics(e) => e.code(),
            RengaError::Evaluation(e) => e.code(),
        }
    }
}

/// Lowercased whitespace-separated words of a prompt.
pub fn split_prompt(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

// Prompts may be written as "flower blossom" or ["flower", "blossom"].
fn prompt_words<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Prompt {
        Text(String),
        Words(Vec<String>),
    }
    Ok(match Prompt::deserialize(d)? {
        Prompt::Text(s) => split_prompt(&s),
        Prompt::Words(ws) => ws.iter().flat_map(|w| split_prompt(w)).collect(),
    })
}

fn default_filter() -> FilterKind {
    FilterKind::MostPositive
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_blend() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRule {
    #[serde(deserialize_with = "prompt_words")]
    pub prompt: Vec<String>,
    #[serde(default = "default_filter")]
    pub filter: FilterKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RengaRuleset {
    #[serde(deserialize_with = "prompt_words")]
    pub initial_prompt: Vec<String>,
    #[serde(default = "default_filter")]
    pub initial_filter: FilterKind,
    /// One rule per link after the first.
    pub links: Vec<LinkRule>,
    /// How many preceding links a content word may not repeat from.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Weights of (previous link, constraint prompt) in the topic blend.
    #[serde(default = "default_blend")]
    pub blend_weights: [f64; 2],
}

impl RengaRuleset {
    pub fn from_json(text: &str) -> Result<Self, RengaError> {
        let rs: RengaRuleset =
            serde_json::from_str(text).map_err(|e| RengaError::InvalidRuleset(e.to_string()))?;
        rs.validate()?;
        Ok(rs)
    }

    pub fn total_links(&self) -> usize {
        1 + self.links.len()
    }

    pub fn validate(&self) -> Result<(), RengaError> {
        let bad = |m: String| Err(RengaError::InvalidRuleset(m));
        let total = self.total_links();
        if !(MIN_LINKS..=MAX_LINKS).contains(&total) {
            return bad(format!(
                "a renga has {MIN_LINKS} to {MAX_LINKS} links, this one has {total}"
            ));
        }
        if self.initial_prompt.is_empty() {
            return bad("initial_prompt is empty".into());
        }
        if let Some(i) = self.links.iter().position(|l| l.prompt.is_empty()) {
            return bad(format!("prompt of link {} is empty", i + 2));
        }
        let [a, b] = self.blend_weights;
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return bad("blend_weights must be finite, non-negative and not both zero".into());
        }
        Ok(())
    }

    /// The filter used to pick link `index`.
    pub fn filter(&self, index: usize) -> FilterKind {
        match index {
            0 => self.initial_filter,
            i => self.links[i - 1].filter,
        }
    }

    /// The prompt for link `index`.
    pub fn prompt(&self, index: usize) -> &[String] {
        match index {
            0 => &self.initial_prompt,
            i => &self.links[i - 1].prompt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Author {
    Machine,
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub haiku: Haiku,
    pub author: Author,
    /// Size of the generated batch the link was chosen from; 0 for humans.
    pub candidates: usize,
    /// Candidates left after the constraint check.
    pub eligible: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Open,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ViolationKind {
    /// `line` is 1-based.
    FormViolation {
        line: usize,
        expected: u32,
        got: u32,
    },
    LineCount {
        expected: usize,
        got: usize,
    },
    /// `link_index` is the 0-based index of the most recent link using the word.
    RepetitionViolation {
        word: String,
        link_index: usize,
    },
    SessionComplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    pub fn new(kind: ViolationKind) -> Self {
        let message = match &kind {
            ViolationKind::FormViolation {
                line,
                expected,
                got,
            } => {
                format!("line {line} has {got} syllables, expected {expected}")
            }
            ViolationKind::LineCount { expected, got } => {
                format!("verse has {got} lines, expected {expected}")
            }
            ViolationKind::RepetitionViolation { word, link_index } => {
                format!("\"{word}\" repeats a word from link {}", link_index + 1)
            }
            ViolationKind::SessionComplete => "the renga is complete".to_string(),
        };
        Violation { kind, message }
    }
}

/// Lemmas of the content words of a haiku.
pub fn content_lemmas(haiku: &Haiku, tags: &TagLexicon) -> BTreeSet<String> {
    haiku
        .words()
        .filter(|w| tags.is_content_word(w))
        .map(lemma)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RengaSession {
    pub ruleset: RengaRuleset,
    pub links: Vec<Link>,
    pub seed: u64,
    pub status: SessionStatus,
}

impl RengaSession {
    pub fn new(ruleset: RengaRuleset, seed: u64) -> Result<Self, RengaError> {
        ruleset.validate()?;
        Ok(RengaSession {
            ruleset,
            links: Vec::new(),
            seed,
            status: SessionStatus::Open,
        })
    }

    /// Index of the next link.
    pub fn cursor(&self) -> usize {
        self.links.len()
    }

    pub fn is_complete(&self) -> bool {
        self.status == SessionStatus::Complete
    }

    /// Indices of the links a new verse must not repeat content words from.
    fn window(&self) -> std::ops::Range<usize> {
        let n = self.links.len();
        n.saturating_sub(self.ruleset.window)..n
    }

    /// Form and repetition problems of `haiku` as the next link. Empty when
    /// the verse is acceptable.
    pub fn check_constraints(&self, haiku: &Haiku, engine: &Engine) -> Vec<Violation> {
        let mut out = Vec::new();
        if haiku.lines.len() != HAIKU_FORM.len() {
            out.push(Violation::new(ViolationKind::LineCount {
                expected: HAIKU_FORM.len(),
                got: haiku.lines.len(),
            }));
        }
        for (i, (line, expected)) in haiku.lines.iter().zip(HAIKU_FORM).enumerate() {
            let got = engine.lexicon.line_syllables(line);
            if got != expected {
                out.push(Violation::new(ViolationKind::FormViolation {
                    line: i + 1,
                    expected,
                    got,
                }));
            }
        }
        let window: Vec<(usize, BTreeSet<String>)> = self
            .window()
            .map(|i| (i, content_lemmas(&self.links[i].haiku, &engine.tags)))
            .collect();
        let mut seen = BTreeSet::new();
        for word in haiku.words().filter(|w| engine.tags.is_content_word(w)) {
            let l = lemma(word);
            if !seen.insert(l.clone()) {
                continue;
            }
            if let Some((i, _)) = window.iter().rev().find(|(_, ls)| ls.contains(&l)) {
                out.push(Violation::new(ViolationKind::RepetitionViolation {
                    word: word.to_string(),
                    link_index: *i,
                }));
            }
        }
        out
    }

    /// Topic for the next link: the initial prompt for link 0, otherwise a
    /// blend of the previous link and the link's constraint prompt.
    pub fn next_topic(&self, engine: &Engine) -> Result<TopicVector, RengaError> {
        let idx = self.cursor();
        let constraint = engine.space.topic_vector(self.ruleset.prompt(idx))?;
        let Some(prev) = self.links.last() else {
            return Ok(constraint);
        };
        let words: Vec<&str> = prev.haiku.words().collect();
        match engine.space.topic_vector(&words) {
            Ok(prev) => Ok(blend(&[prev, constraint], &self.ruleset.blend_weights)?),
            // a human verse made only of unknown words
            Err(SemanticsError::NoVectorCoverage(_)) => Ok(constraint),
            Err(e) => Err(e.into()),
        }
    }

    /// Generates a batch for the next link, drops candidates that break a
    /// constraint and appends the one the link's filter selects. One retry
    /// with fresh seeds if every candidate is rejected.
    pub fn next_link(&mut self, engine: &Engine, cfg: &GenConfig) -> Result<&Link, RengaError> {
        if self.is_complete() {
            return Err(RengaError::SessionComplete);
        }
        let idx = self.cursor();
        let topic = self.next_topic(engine)?;
        let avoid: BTreeSet<String> = self
            .window()
            .flat_map(|i| content_lemmas(&self.links[i].haiku, &engine.tags))
            .collect();
        let n = cfg.batch_size.max(1);
        let base = self
            .seed
            .wrapping_add((idx as u64).wrapping_mul(2 * n as u64));
        for attempt in 0..2u64 {
            let batch_cfg = GenConfig {
                seed: base.wrapping_add(attempt * n as u64),
                avoid: avoid.clone(),
                ..cfg.clone()
            };
            let batch = match generate_for_topic(&topic, n, engine, &batch_cfg) {
                Ok(b) => b,
                // the avoided words emptied some slot; let the check filter instead
                Err(GenerateError::SlotUnfillable { .. }) => generate_for_topic(
                    &topic,
                    n,
                    engine,
                    &GenConfig {
                        avoid: BTreeSet::new(),
                        ..batch_cfg
                    },
                )?,
                Err(e) => return Err(e.into()),
            };
            let eligible: Vec<Haiku> = batch
                .into_iter()
                .filter(|h| self.check_constraints(h, engine).is_empty())
                .collect();
            if eligible.is_empty() {
                continue;
            }
            let criterion = match self.ruleset.filter(idx) {
                FilterKind::MostPositive => Criterion::MostPositive,
                FilterKind::LeastVariety => Criterion::LeastVariety,
                FilterKind::MostCoherent => match self.links.last() {
                    Some(prev) => Criterion::MostCoherent(&prev.haiku),
                    None => Criterion::OnTopic(&topic),
                },
            };
            let pick = select(&eligible, criterion, &engine.affect, &engine.space)?;
            let count = eligible.len();
            let haiku = eligible
                .into_iter()
                .nth(pick)
                .expect("selected index is in range");
            self.push(Link {
                haiku,
                author: Author::Machine,
                candidates: n,
                eligible: count,
            });
            return Ok(self.links.last().expect("just pushed"));
        }
        Err(RengaError::AllCandidatesViolate { link: idx })
    }

    /// Appends a human verse if it passes every check. On rejection the
    /// session is left untouched.
    pub fn submit_link(&mut self, haiku: Haiku, engine: &Engine) -> Result<&Link, RengaError> {
        if self.is_complete() {
            return Err(RengaError::SessionComplete);
        }
        let violations = self.check_constraints(&haiku, engine);
        if !violations.is_empty() {
            return Err(RengaError::Rejected(violations));
        }
        self.push(Link {
            haiku,
            author: Author::Human,
            candidates: 0,
            eligible: 0,
        });
        Ok(self.links.last().expect("just pushed"))
    }

    /// Appends a link without checking it. Used when replaying a log of
    /// links that were accepted earlier.
    pub fn push(&mut self, link: Link) {
        self.links.push(link);
        if self.links.len() >= self.ruleset.total_links() {
            self.status = SessionStatus::Complete;
        }
    }
}

/// Runs a machine-only renga to completion.
pub fn run_renga(
    ruleset: RengaRuleset,
    seed: u64,
    engine: &Engine,
    cfg: &GenConfig,
) -> Result<RengaSession, RengaError> {
    let mut session = RengaSession::new(ruleset, seed)?;
    while !session.is_complete() {
        session.next_link(engine, cfg)?;
    }
    Ok(session)
}
