use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GrammarError;

/// Penn Treebank part-of-speech tags plus the punctuation tags used by the
/// Treebank tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PosTag {
    CC,
    CD,
    DT,
    EX,
    FW,
    IN,
    JJ,
    JJR,
    JJS,
    LS,
    MD,
    NN,
    NNS,
    NNP,
    NNPS,
    PDT,
    POS,
    PRP,
    PRPS,
    RB,
    RBR,
    RBS,
    RP,
    SYM,
    TO,
    UH,
    VB,
    VBD,
    VBG,
    VBN,
    VBP,
    VBZ,
    WDT,
    WP,
    WPS,
    WRB,
    Comma,
    Period,
    Colon,
    OpenQuote,
    CloseQuote,
    LeftParen,
    RightParen,
}

const TAG_NAMES: &[(PosTag, &str)] = &[
    (PosTag::CC, "CC"),
    (PosTag::CD, "CD"),
    (PosTag::DT, "DT"),
    (PosTag::EX, "EX"),
    (PosTag::FW, "FW"),
    (PosTag::IN, "IN"),
    (PosTag::JJ, "JJ"),
    (PosTag::JJR, "JJR"),
    (PosTag::JJS, "JJS"),
    (PosTag::LS, "LS"),
    (PosTag::MD, "MD"),
    (PosTag::NN, "NN"),
    (PosTag::NNS, "NNS"),
    (PosTag::NNP, "NNP"),
    (PosTag::NNPS, "NNPS"),
    (PosTag::PDT, "PDT"),
    (PosTag::POS, "POS"),
    (PosTag::PRP, "PRP"),
    (PosTag::PRPS, "PRP$"),
    (PosTag::RB, "RB"),
    (PosTag::RBR, "RBR"),
    (PosTag::RBS, "RBS"),
    (PosTag::RP, "RP"),
    (PosTag::SYM, "SYM"),
    (PosTag::TO, "TO"),
    (PosTag::UH, "UH"),
    (PosTag::VB, "VB"),
    (PosTag::VBD, "VBD"),
    (PosTag::VBG, "VBG"),
    (PosTag::VBN, "VBN"),
    (PosTag::VBP, "VBP"),
    (PosTag::VBZ, "VBZ"),
    (PosTag::WDT, "WDT"),
    (PosTag::WP, "WP"),
    (PosTag::WPS, "WP$"),
    (PosTag::WRB, "WRB"),
    (PosTag::Comma, ","),
    (PosTag::Period, "."),
    (PosTag::Colon, ":"),
    (PosTag::OpenQuote, "``"),
    (PosTag::CloseQuote, "''"),
    (PosTag::LeftParen, "-LRB-"),
    (PosTag::RightParen, "-RRB-"),
];

impl PosTag {
    pub fn as_str(self) -> &'static str {
        TAG_NAMES
            .iter()
            .find(|(t, _)| *t == self)
            .map(|(_, s)| *s)
            .unwrap_or("?")
    }

    pub fn is_punctuation(self) -> bool {
        matches!(
            self,
            PosTag::Comma
                | PosTag::Period
                | PosTag::Colon
                | PosTag::OpenQuote
                | PosTag::CloseQuote
                | PosTag::LeftParen
                | PosTag::RightParen
        )
    }

    /// Function-word tags whose tokens stay literal in skeletons.
    pub fn is_closed_class(self) -> bool {
        self.is_punctuation()
            || matches!(
                self,
                PosTag::DT
                    | PosTag::IN
                    | PosTag::CC
                    | PosTag::PRP
                    | PosTag::PRPS
                    | PosTag::TO
                    | PosTag::MD
                    | PosTag::WDT
            )
    }

    /// The coarse class used when relaxing an unfillable slot.
    pub fn coarse_class(self) -> &'static [PosTag] {
        use PosTag::*;
        match self {
            NN | NNS | NNP | NNPS => &[NN, NNS, NNP, NNPS],
            VB | VBD | VBG | VBN | VBP | VBZ => &[VB, VBD, VBG, VBN, VBP, VBZ],
            JJ | JJR | JJS => &[JJ, JJR, JJS],
            RB | RBR | RBS => &[RB, RBR, RBS],
            WP | WPS => &[WP, WPS],
            PRP | PRPS => &[PRP, PRPS],
            _ => std::slice::from_ref(
                TAG_NAMES
                    .iter()
                    .find(|(t, _)| *t == self)
                    .map(|(t, _)| t)
                    .unwrap_or(&NN),
            ),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TAG_NAMES
            .iter()
            .find(|(_, name)| *name == s)
            .map(|(t, _)| *t)
            .ok_or_else(|| GrammarError::UnknownTag(s.to_string()))
    }
}

impl TryFrom<String> for PosTag {
    type Error = GrammarError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PosTag> for String {
    fn from(t: PosTag) -> String {
        t.as_str().to_string()
    }
}

const DEFAULT_SUFFIXES: &[(&str, PosTag)] = &[
    ("ing", PosTag::VBG),
    ("ed", PosTag::VBD),
    ("ly", PosTag::RB),
    ("ss", PosTag::NN),
    ("s", PosTag::NNS),
    ("ness", PosTag::NN),
    ("tion", PosTag::NN),
    ("sion", PosTag::NN),
    ("ment", PosTag::NN),
    ("ity", PosTag::NN),
    ("ism", PosTag::NN),
    ("ous", PosTag::JJ),
    ("ful", PosTag::JJ),
    ("less", PosTag::JJ),
    ("able", PosTag::JJ),
    ("ible", PosTag::JJ),
    ("ive", PosTag::JJ),
    ("ish", PosTag::JJ),
    ("est", PosTag::JJS),
    ("ize", PosTag::VB),
    ("ise", PosTag::VB),
];

pub const SEED_TAGS: &str = include_str!("../../data/seed-tags.tsv");

/// Word → most frequent tag, with suffix rules for unknown words.
#[derive(Debug, Clone)]
pub struct TagLexicon {
    words: HashMap<String, PosTag>,
    // longest suffix first
    suffixes: Vec<(String, PosTag)>,
}

impl TagLexicon {
    pub fn new(words: HashMap<String, PosTag>, mut suffixes: Vec<(String, PosTag)>) -> Self {
        suffixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        let words = words
            .into_iter()
            .map(|(w, t)| (w.to_lowercase(), t))
            .collect();
        TagLexicon { words, suffixes }
    }

    /// The lexicon compiled into the crate, with default suffix rules.
    pub fn seed() -> Self {
        Self::parse(SEED_TAGS.as_bytes()).expect("seed tag lexicon is well formed")
    }

    pub fn default_suffixes() -> Vec<(String, PosTag)> {
        DEFAULT_SUFFIXES
            .iter()
            .map(|(s, t)| (s.to_string(), *t))
            .collect()
    }

    /// Reads `word<TAB>TAG` rows; the first row for a word wins.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, GrammarError> {
        let mut words = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| GrammarError::Io(e.to_string()))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or(GrammarError::MalformedTagRow { line: i + 1 })?;
            let tag: PosTag = tag.trim().parse()?;
            words.entry(word.trim().to_lowercase()).or_insert(tag);
        }
        Ok(Self::new(words, Self::default_suffixes()))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn lookup(&self, word: &str) -> Option<PosTag> {
        self.words.get(&word.to_lowercase()).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, PosTag)> {
        self.words.iter().map(|(w, t)| (w.as_str(), *t))
    }

    /// Lexicon tag, else the longest matching suffix rule, else NN.
    pub fn tag(&self, word: &str) -> PosTag {
        let lower = word.to_lowercase();
        if let Some(t) = self.words.get(&lower) {
            return *t;
        }
        self.suffixes
            .iter()
            .find(|(suffix, _)| lower.len() > suffix.len() && lower.ends_with(suffix.as_str()))
            .map(|(_, t)| *t)
            .unwrap_or(PosTag::NN)
    }

    pub fn tag_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(String, PosTag)> {
        tokens
            .iter()
            .map(|t| (t.as_ref().to_string(), self.tag(t.as_ref())))
            .collect()
    }

    /// True for words that fill open slots (and count as repetitions).
    pub fn is_content_word(&self, word: &str) -> bool {
        !crate::text::is_punctuation(word) && !self.tag(word).is_closed_class()
    }
}
