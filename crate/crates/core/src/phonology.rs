//! Pronouncing lexicon (CMU dictionary format) and syllable counting.
//!
//! Entries look like `AUTUMN  AO1 T AH0 M`. Vowel phonemes carry a stress
//! digit, so the syllable count of a pronunciation is the number of
//! phonemes ending in a digit. Alternates (`READ(1)`) are merged under the
//! bare word, in file order.

use std::collections::HashMap;
use std::io::BufRead;

use serde::Serialize;
use thiserror::Error;

use crate::text::{is_punctuation, strip_punctuation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhonologyError {
    #[error("pronouncing lexicon contains no entries")]
    EmptyLexicon,
    #[error("empty token")]
    EmptyToken,
    #[error("reading pronouncing lexicon: {0}")]
    Io(String),
}

impl PhonologyError {
    pub fn code(&self) -> &'static str {
        match self {
            PhonologyError::EmptyLexicon => "EmptyLexicon",
            PhonologyError::EmptyToken => "EmptyToken",
            PhonologyError::Io(_) => "Io",
        }
    }
}

/// A line that could not be parsed. Parsing continues past it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pronunciation(Vec<String>);

impl Pronunciation {
    pub fn phonemes(&self) -> &[String] {
        &self.0
    }

    pub fn syllables(&self) -> u32 {
        self.0
            .iter()
            .filter(|p| p.chars().last().is_some_and(|c| c.is_ascii_digit()))
            .count() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SyllableSource {
    Lexicon,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyllableCount {
    pub count: u32,
    pub source: SyllableSource,
}

#[derive(Debug, Clone, Default)]
pub struct PronouncingLexicon {
    entries: HashMap<String, Vec<Pronunciation>>,
}

impl PronouncingLexicon {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(&word.to_uppercase()).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.get(word).is_some()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Syllables of `word`, from the first pronunciation when the word is
    /// known and from the orthographic heuristic otherwise.
    pub fn syllable_count(&self, word: &str) -> Result<SyllableCount, PhonologyError> {
        let word = strip_punctuation(word);
        if word.is_empty() {
            return Err(PhonologyError::EmptyToken);
        }
        if let Some(first) = self.get(word).and_then(|p| p.first()) {
            let n = first.syllables();
            // entries with no stress digits (rare abbreviations) fall through
            if n > 0 {
                return Ok(SyllableCount {
                    count: n,
                    source: SyllableSource::Lexicon,
                });
            }
        }
        Ok(SyllableCount {
            count: heuristic_syllables(word),
            source: SyllableSource::Heuristic,
        })
    }

    /// Sum of syllables over a line; punctuation tokens count zero.
    pub fn line_syllables<S: AsRef<str>>(&self, tokens: &[S]) -> u32 {
        tokens
            .iter()
            .map(AsRef::as_ref)
            .filter(|t| !is_punctuation(t))
            .map(|t| self.syllable_count(t).map_or(0, |c| c.count))
            .sum()
    }
}

/// Vowel groups (a e i o u y), minus one for a silent final "e" after a
/// consonant, never less than one.
pub fn heuristic_syllables(word: &str) -> u32 {
    let w: Vec<char> = word.to_lowercase().chars().collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0i64;
    let mut prev = false;
    for &c in &w {
        let v = is_vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    if w.len() >= 2
        && w[w.len() - 1] == 'e'
        && w[w.len() - 2].is_alphabetic()
        && !is_vowel(w[w.len() - 2])
    {
        groups -= 1;
    }
    groups.max(1) as u32
}

/// Parses CMU dictionary text. Malformed lines are returned alongside the
/// lexicon rather than aborting the parse.
pub fn parse_pronouncing_lexicon<R: BufRead>(
    mut reader: R,
) -> Result<(PronouncingLexicon, Vec<MalformedLine>), PhonologyError> {
    let mut entries: HashMap<String, Vec<Pronunciation>> = HashMap::new();
    let mut malformed = Vec::new();
    let mut buf = Vec::new();
    let mut lineno = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| PhonologyError::Io(e.to_string()))?;
        if n == 0 {
            break;
        }
        lineno += 1;
        // comments may hold Latin-1 bytes
        let raw = String::from_utf8_lossy(&buf);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with(";;;") {
            continue;
        }
        let mut parts = line.split_whitespace();
        let Some(head) = parts.next() else { continue };
        let phonemes: Vec<String> = parts.map(str::to_string).collect();
        if phonemes.is_empty() || !phonemes.iter().all(|p| is_phoneme(p)) {
            malformed.push(MalformedLine {
                line: lineno,
                text: raw.trim_end().to_string(),
            });
            continue;
        }
        let word = strip_variant(head).to_uppercase();
        entries
            .entry(word)
            .or_default()
            .push(Pronunciation(phonemes));
    }
    if entries.is_empty() {
        return Err(PhonologyError::EmptyLexicon);
    }
    Ok((PronouncingLexicon { entries }, malformed))
}

fn strip_variant(head: &str) -> &str {
    match head.find('(') {
        Some(i)
            if head.ends_with(')')
                && head[i + 1..head.len() - 1]
                    .chars()
                    .all(|c| c.is_ascii_digit()) =>
        {
            &head[..i]
        }
        _ => head,
    }
}

fn is_phoneme(p: &str) -> bool {
    let letters = p.trim_end_matches(|c: char| c.is_ascii_digit());
    !letters.is_empty()
        && letters.chars().all(|c| c.is_ascii_alphabetic())
        && p.len() - letters.len() <= 1
}
