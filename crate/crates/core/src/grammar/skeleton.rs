use std::io::BufRead;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GrammarError, PosTag, TagLexicon};
use crate::phonology::PronouncingLexicon;
use crate::text::{is_punctuation, tokenize};

/// Syllables per line of a haiku.
pub const HAIKU_FORM: [u32; 3] = [5, 7, 5];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Fixed(String),
    Open { tag: PosTag, syllables: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonFragment {
    pub slots: Vec<Slot>,
    pub total_syllables: u32,
    pub source_line: String,
}

impl SkeletonFragment {
    /// Recomputes the syllable total from the slots.
    pub fn recount(&self, lex: &PronouncingLexicon) -> u32 {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Fixed(tok) => lex.line_syllables(std::slice::from_ref(tok)),
                Slot::Open { syllables, .. } => *syllables,
            })
            .sum()
    }

    pub fn open_slots(&self) -> impl Iterator<Item = (PosTag, u32)> + '_ {
        self.slots.iter().filter_map(|s| match s {
            Slot::Open { tag, syllables } => Some((*tag, *syllables)),
            Slot::Fixed(_) => None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonPool {
    pub five: Vec<SkeletonFragment>,
    pub seven: Vec<SkeletonFragment>,
}

impl SkeletonPool {
    pub fn len(&self) -> usize {
        self.five.len() + self.seven.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&SkeletonFragment) -> bool) {
        self.five.retain(&mut keep);
        self.seven.retain(&mut keep);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExtractStats {
    pub lines: usize,
    pub kept: usize,
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaikuTemplate {
    pub lines: [SkeletonFragment; 3],
}

fn fragment_from_line(
    line: &str,
    tl: &TagLexicon,
    lex: &PronouncingLexicon,
) -> Option<SkeletonFragment> {
    let tokens = tokenize(line);
    if tokens.is_empty() {
        return None;
    }
    let mut slots = Vec::with_capacity(tokens.len());
    let mut total = 0;
    for (token, tag) in tl.tag_tokens(&tokens) {
        let syllables = lex.line_syllables(std::slice::from_ref(&token));
        total += syllables;
        if is_punctuation(&token) || tag.is_closed_class() {
            slots.push(Slot::Fixed(token));
        } else {
            slots.push(Slot::Open { tag, syllables });
        }
    }
    Some(SkeletonFragment {
        slots,
        total_syllables: total,
        source_line: line.trim().to_string(),
    })
}

/// Reduces every corpus line to a skeleton, keeping 5- and 7-syllable ones.
///
/// Corpus format: one haiku per three lines, blank lines between haikus,
/// `#` comment lines.
pub fn extract_skeletons<R: BufRead>(
    corpus: R,
    tl: &TagLexicon,
    lex: &PronouncingLexicon,
) -> Result<(SkeletonPool, ExtractStats), GrammarError> {
    let mut pool = SkeletonPool::default();
    let mut stats = ExtractStats::default();
    for line in corpus.lines() {
        let line = line.map_err(|e| GrammarError::Io(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        stats.lines += 1;
        match fragment_from_line(trimmed, tl, lex) {
            Some(f) if f.total_syllables == 5 => pool.five.push(f),
            Some(f) if f.total_syllables == 7 => pool.seven.push(f),
            _ => {
                stats.discarded += 1;
                continue;
            }
        }
        stats.kept += 1;
    }
    if stats.lines == 0 {
        return Err(GrammarError::EmptyCorpus);
    }
    if pool.five.is_empty() {
        return Err(GrammarError::NoFiveFragments);
    }
    if pool.seven.is_empty() {
        return Err(GrammarError::NoSevenFragments);
    }
    Ok((pool, stats))
}

/// Draws a 5-, a 7- and a 5-syllable fragment uniformly from the pool.
pub fn assemble_template(pool: &SkeletonPool, seed: u64) -> Result<HaikuTemplate, GrammarError> {
    if pool.five.is_empty() || pool.seven.is_empty() {
        return Err(GrammarError::InsufficientFragments);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = pool.five[rng.gen_range(0..pool.five.len())].clone();
    let middle = pool.seven[rng.gen_range(0..pool.seven.len())].clone();
    let last = pool.five[rng.gen_range(0..pool.five.len())].clone();
    Ok(HaikuTemplate {
        lines: [first, middle, last],
    })
}
