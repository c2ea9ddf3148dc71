//! Template filling.
//!
//! Slots are filled left to right with a beam search. An open slot
//! `Open(tag, s)` accepts vocabulary words with exactly that tag and exactly
//! `s` syllables, so every completed haiku scans 5/7/5 by construction. A
//! partial fill is scored by
//!
//! ```text
//! lambda_ngram * ln P_backoff(word | previous tokens) + lambda_topic * cos(vec(word), topic)
//! ```
//!
//! summed over positions. Words without a vector contribute 0 to the topic
//! term.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Engine;
use crate::evaluation;
use crate::grammar::TagLexicon;
use crate::grammar::{assemble_template, GrammarError, HaikuTemplate, PosTag, Slot, HAIKU_FORM};
use crate::ngram::{NGramModel, UNKNOWN};
use crate::phonology::PronouncingLexicon;
use crate::semantics::{blend, word_similarity, SemanticsError, TopicVector, VectorSpace};
use crate::text::{is_punctuation, lemma, tokenize};

/// Templates tried per batch member before a `SlotUnfillable` is surfaced.
pub const TEMPLATE_ATTEMPTS: u64 = 16;

/// Dither floor for batch members so the candidates differ.
pub const BATCH_MIN_DITHER: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("no {tag} word of {syllables} syllable(s) for line {line}, slot {slot}")]
    SlotUnfillable {
        line: usize,
        slot: usize,
        tag: PosTag,
        syllables: u32,
    },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("filled line {line} has {got} syllables, expected {expected}")]
    FormMismatch {
        line: usize,
        expected: u32,
        got: u32,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl GenerateError {
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::SlotUnfillable { .. } => "SlotUnfillable",
            GenerateError::InvalidConfig(_) => "InvalidConfig",
            GenerateError::FormMismatch { .. } => "FormMismatch",
            GenerateError::Grammar(e) => e.code(),
            GenerateError::Semantics(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub lambda_ngram: f64,
    pub lambda_topic: f64,
    pub beam_width: usize,
    /// 0 picks the best completed beam; above 0 samples a softmax over them.
    pub dither_temperature: f64,
    pub seed: u64,
    pub batch_size: usize,
    /// Lemmas that must not fill any open slot.
    #[serde(skip)]
    pub avoid: BTreeSet<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            lambda_ngram: 1.0,
            lambda_topic: 1.0,
            beam_width: 32,
            dither_temperature: 0.0,
            seed: 0,
            batch_size: 10,
            avoid: BTreeSet::new(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |m: &str| Err(GenerateError::InvalidConfig(m.to_string()));
        if !(self.lambda_ngram >= 0.0 && self.lambda_topic >= 0.0) {
            return bad("lambdas must be non-negative");
        }
        if self.lambda_ngram + self.lambda_topic <= 0.0 {
            return bad("lambda_ngram + lambda_topic must be positive");
        }
        if self.beam_width == 0 {
            return bad("beam_width must be at least 1");
        }
        if !self.dither_temperature.is_finite() || self.dither_temperature < 0.0 {
            return bad("dither_temperature must be a finite non-negative number");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub ngram_total: f64,
    pub topic_cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub template: Vec<String>,
    pub seed: u64,
}

/// Three lines of tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Haiku {
    pub lines: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<ScoreBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Haiku {
    pub fn new(lines: Vec<Vec<String>>) -> Self {
        Haiku {
            lines,
            scores: None,
            provenance: None,
        }
    }

    /// Tokenizes verse text, one line per non-empty text line.
    pub fn parse(text: &str) -> Self {
        Self::from_line_texts(text.lines().filter(|l| !l.trim().is_empty()))
    }

    pub fn from_line_texts<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::new(lines.into_iter().map(|l| tokenize(l.as_ref())).collect())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().flatten().map(String::as_str)
    }

    /// Tokens that are not punctuation.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens().filter(|t| !is_punctuation(t))
    }

    pub fn line_texts(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.join(" ")).collect()
    }

    pub fn syllables(&self, lex: &PronouncingLexicon) -> Vec<u32> {
        self.lines.iter().map(|l| lex.line_syllables(l)).collect()
    }

    pub fn is_form_valid(&self, lex: &PronouncingLexicon) -> bool {
        self.syllables(lex) == HAIKU_FORM
    }
}

impl fmt::Display for Haiku {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.line_texts().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            f.write_str(line)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    id: u32,
    lemma: u32,
    vector: Option<usize>,
}

/// Words usable in open slots, grouped by (tag, syllables). A word must be
/// in the n-gram vocabulary and the pronouncing lexicon; its tag comes from
/// the tagger.
#[derive(Debug, Clone, Default)]
pub struct CandidateIndex {
    slots: HashMap<(PosTag, u32), Vec<usize>>,
    candidates: Vec<Candidate>,
    lemmas: Vec<String>,
    vectors: Vec<Vec<f32>>,
}

impl CandidateIndex {
    pub fn build(
        lex: &PronouncingLexicon,
        tags: &TagLexicon,
        ngram: &NGramModel,
        space: &VectorSpace,
    ) -> Self {
        let mut index = CandidateIndex::default();
        let mut lemma_ids: HashMap<String, u32> = HashMap::new();
        // vocabulary is sorted, so each slot list is in lexicographic order
        for (id, word) in ngram.vocabulary().iter().enumerate() {
            if is_punctuation(word) {
                continue;
            }
            let tag = tags.tag(word);
            if tag.is_closed_class() || !lex.contains(word) {
                continue;
            }
            let Ok(count) = lex.syllable_count(word) else {
                continue;
            };
            let l = lemma(word);
            let next = lemma_ids.len() as u32;
            let lemma_id = *lemma_ids.entry(l.clone()).or_insert_with(|| {
                index.lemmas.push(l);
                next
            });
            let vector = space.get(word).map(|v| {
                index.vectors.push(v.to_vec());
                index.vectors.len() - 1
            });
            index
                .slots
                .entry((tag, count.count))
                .or_default()
                .push(index.candidates.len());
            index.candidates.push(Candidate {
                id: id as u32,
                lemma: lemma_id,
                vector,
            });
        }
        index
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    fn exact(&self, tag: PosTag, syllables: u32) -> &[usize] {
        self.slots.get(&(tag, syllables)).map_or(&[], Vec::as_slice)
    }

    /// Candidates for a slot, widening to the tag's coarse class once if the
    /// exact tag has none.
    fn for_slot(&self, tag: PosTag, syllables: u32) -> Vec<usize> {
        let exact = self.exact(tag, syllables);
        if !exact.is_empty() {
            return exact.to_vec();
        }
        let mut wide: Vec<usize> = tag
            .coarse_class()
            .iter()
            .flat_map(|t| self.exact(*t, syllables).iter().copied())
            .collect();
        wide.sort_unstable();
        wide
    }

    pub fn can_fill(&self, tag: PosTag, syllables: u32) -> bool {
        !self.exact(tag, syllables).is_empty()
            || tag
                .coarse_class()
                .iter()
                .any(|t| !self.exact(*t, syllables).is_empty())
    }
}

#[derive(Clone)]
struct Beam {
    ids: Vec<u32>,
    words: Vec<String>,
    lemmas: Vec<u32>,
    score: f64,
}

fn ln_estimate(ngram: &NGramModel, lambda: f64, seq: &[u32]) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        lambda * ngram.estimate_ids(seq).ln()
    }
}

/// Fills `template` by beam search, preferring likely n-grams and words
/// close to `topic`.
pub fn fill_template(
    template: &HaikuTemplate,
    engine: &Engine,
    topic: &TopicVector,
    cfg: &GenConfig,
) -> Result<Haiku, GenerateError> {
    cfg.validate()?;
    let index = engine.candidates();
    let ngram = &engine.ngram;
    let blocked: Vec<bool> = index.lemmas.iter().map(|l| cfg.avoid.contains(l)).collect();
    let mut topic_sim: HashMap<usize, f64> = HashMap::new();

    let mut beams = vec![Beam {
        ids: Vec::new(),
        words: Vec::new(),
        lemmas: Vec::new(),
        score: 0.0,
    }];
    let mut line_lengths = [0usize; 3];
    for (line_no, fragment) in template.lines.iter().enumerate() {
        line_lengths[line_no] = fragment.slots.len();
        for (slot_no, slot) in fragment.slots.iter().enumerate() {
            match slot {
                Slot::Fixed(token) => {
                    let id = ngram.token_id(token).unwrap_or(UNKNOWN);
                    for b in &mut beams {
                        b.ids.push(id);
                        b.score += ln_estimate(ngram, cfg.lambda_ngram, &b.ids);
                        b.words.push(token.clone());
                    }
                    sort_beams(&mut beams);
                }
                Slot::Open { tag, syllables } => {
                    let unfillable = || GenerateError::SlotUnfillable {
                        line: line_no + 1,
                        slot: slot_no,
                        tag: *tag,
                        syllables: *syllables,
                    };
                    let pool = index.for_slot(*tag, *syllables);
                    if pool.is_empty() {
                        return Err(unfillable());
                    }
                    for &c in &pool {
                        topic_sim.entry(c).or_insert_with(|| {
                            index.candidates[c]
                                .vector
                                .and_then(|v| {
                                    word_similarity(&index.vectors[v], &topic.components).ok()
                                })
                                .unwrap_or(0.0)
                        });
                    }
                    let mut extensions: Vec<(f64, usize, usize)> = Vec::new();
                    let mut scratch = Vec::new();
                    for (bi, b) in beams.iter().enumerate() {
                        scratch.clear();
                        scratch.extend_from_slice(&b.ids);
                        scratch.push(UNKNOWN);
                        let last = scratch.len() - 1;
                        for &c in &pool {
                            let cand = &index.candidates[c];
                            if blocked[cand.lemma as usize] || b.lemmas.contains(&cand.lemma) {
                                continue;
                            }
                            scratch[last] = cand.id;
                            let s = b.score
                                + ln_estimate(ngram, cfg.lambda_ngram, &scratch)
                                + cfg.lambda_topic * topic_sim[&c];
                            extensions.push((s, bi, c));
                        }
                    }
                    if extensions.is_empty() {
                        return Err(unfillable());
                    }
                    let order = |a: &(f64, usize, usize), b: &(f64, usize, usize)| {
                        b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
                    };
                    if extensions.len() > cfg.beam_width {
                        extensions.select_nth_unstable_by(cfg.beam_width - 1, order);
                        extensions.truncate(cfg.beam_width);
                    }
                    extensions.sort_by(order);
                    beams = extensions
                        .into_iter()
                        .map(|(score, bi, c)| {
                            let cand = &index.candidates[c];
                            let mut b = beams[bi].clone();
                            b.ids.push(cand.id);
                            b.words
                                .push(ngram.word(cand.id).unwrap_or_default().to_string());
                            b.lemmas.push(cand.lemma);
                            b.score = score;
                            b
                        })
                        .collect();
                }
            }
        }
    }

    let chosen = if cfg.dither_temperature > 0.0 && beams.len() > 1 {
        let best = beams[0].score;
        let weights: Vec<f64> = beams
            .iter()
            .map(|b| ((b.score - best) / cfg.dither_temperature).exp())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(&mut rng),
            Err(_) => 0,
        }
    } else {
        0
    };
    let words = std::mem::take(&mut beams[chosen].words);
    let mut rest = words.into_iter();
    let lines: Vec<Vec<String>> = line_lengths
        .iter()
        .map(|n| rest.by_ref().take(*n).collect())
        .collect();

    let mut haiku = Haiku::new(lines);
    for (i, (got, expected)) in haiku
        .syllables(&engine.lexicon)
        .into_iter()
        .zip(HAIKU_FORM)
        .enumerate()
    {
        if got != expected {
            return Err(GenerateError::FormMismatch {
                line: i + 1,
                expected,
                got,
            });
        }
    }
    let tokens: Vec<&str> = haiku.tokens().collect();
    haiku.scores = Some(ScoreBreakdown {
        ngram_total: ngram.score(&tokens),
        topic_cosine: evaluation::topic_score(&engine.space, &haiku, topic),
    });
    haiku.provenance = Some(Provenance {
        template: template
            .lines
            .iter()
            .map(|l| l.source_line.clone())
            .collect(),
        seed: cfg.seed,
    });
    Ok(haiku)
}

fn sort_beams(beams: &mut [Beam]) {
    beams.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.words.cmp(&b.words))
    });
}

/// Seed for batch member `i`, retry `attempt`. Attempt 0 is `seed + i`.
pub fn derive_seed(seed: u64, i: u64, attempt: u64) -> u64 {
    seed.wrapping_add(i)
        .wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Equal-weight blend of the prompts' topic vectors.
pub fn prompt_topic<S: AsRef<str>>(
    space: &VectorSpace,
    prompts: &[Vec<S>],
) -> Result<TopicVector, SemanticsError> {
    let topics = prompts
        .iter()
        .map(|p| space.topic_vector(p))
        .collect::<Result<Vec<_>, _>>()?;
    blend(&topics, &vec![1.0; topics.len()])
}

/// Generates `n` haikus for the blended prompts, each from its own template.
pub fn generate_batch<S: AsRef<str> + Sync>(
    prompts: &[Vec<S>],
    n: usize,
    engine: &Engine,
    cfg: &GenConfig,
) -> Result<Vec<Haiku>, GenerateError> {
    let topic = prompt_topic(&engine.space, prompts)?;
    generate_for_topic(&topic, n, engine, cfg)
}

pub fn generate_for_topic(
    topic: &TopicVector,
    n: usize,
    engine: &Engine,
    cfg: &GenConfig,
) -> Result<Vec<Haiku>, GenerateError> {
    cfg.validate()?;
    if n > 0 && (engine.skeletons.five.is_empty() || engine.skeletons.seven.is_empty()) {
        return Err(GrammarError::InsufficientFragments.into());
    }
    (0..n as u64)
        .into_par_iter()
        .map(|i| generate_member(topic, i, engine, cfg))
        .collect()
}

fn generate_member(
    topic: &TopicVector,
    i: u64,
    engine: &Engine,
    cfg: &GenConfig,
) -> Result<Haiku, GenerateError> {
    let mut last_err = None;
    for attempt in 0..TEMPLATE_ATTEMPTS {
        let seed = derive_seed(cfg.seed, i, attempt);
        let template = assemble_template(&engine.skeletons, seed)?;
        let member_cfg = GenConfig {
            seed,
            dither_temperature: cfg.dither_temperature.max(BATCH_MIN_DITHER),
            ..cfg.clone()
        };
        match fill_template(&template, engine, topic, &member_cfg) {
            Ok(h) => return Ok(h),
            Err(e @ GenerateError::SlotUnfillable { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::grammar::SkeletonFragment;
    use crate::semantics::similarity;

    fn fragment(engine: &Engine, slots: Vec<Slot>) -> SkeletonFragment {
        let mut f = SkeletonFragment {
            slots,
            total_syllables: 0,
            source_line: String::new(),
        };
        f.total_syllables = f.recount(&engine.lexicon);
        f.source_line = f
            .slots
            .iter()
            .map(|s| match s {
                Slot::Fixed(t) => t.clone(),
                Slot::Open { tag, syllables } => format!("<{tag}:{syllables}>"),
            })
            .collect::<Vec<_>>()
            .join(" ");
        f
    }

    fn fixed(words: &str) -> Vec<Slot> {
        words
            .split_whitespace()
            .map(|w| Slot::Fixed(w.to_string()))
            .collect()
    }

    fn open(tag: PosTag, syllables: u32) -> Slot {
        Slot::Open { tag, syllables }
    }

    fn template(engine: &Engine, last: Vec<Slot>) -> HaikuTemplate {
        HaikuTemplate {
            lines: [
                fragment(engine, fixed("the cold river flows")),
                fragment(engine, fixed("the moonlight falls on the pond")),
                fragment(engine, last),
            ],
        }
    }

    fn topic(engine: &Engine, words: &[&str]) -> TopicVector {
        engine.space.topic_vector(words).unwrap()
    }

    fn cfg(lambda_ngram: f64, lambda_topic: f64) -> GenConfig {
        GenConfig {
            lambda_ngram,
            lambda_topic,
            ..GenConfig::default()
        }
    }

    #[test]
    fn fixed_only_template_is_verbatim() {
        let e = fixture::engine();
        let t = template(&e, fixed("a bright summer sky"));
        let h = fill_template(&t, &e, &topic(&e, &["moon"]), &GenConfig::default()).unwrap();
        assert_eq!(
            h.line_texts(),
            [
                "the cold river flows",
                "the moonlight falls on the pond",
                "a bright summer sky"
            ]
        );
        assert_eq!(h.syllables(&e.lexicon), HAIKU_FORM);
        assert_eq!(
            h.provenance.as_ref().unwrap().template[2],
            "a bright summer sky"
        );
    }

    #[test]
    fn syllable_filter_picks_the_only_fit() {
        let e = fixture::engine_with_text("the sun. the autumn.");
        assert_eq!(e.candidates().len(), 2);
        let mut last = fixed("a bright");
        last.push(open(PosTag::NN, 2));
        last.extend(fixed("sky"));
        let t = template(&e, last);
        let h = fill_template(&t, &e, &topic(&e, &["sun"]), &cfg(1.0, 0.0)).unwrap();
        assert_eq!(h.line_texts()[2], "a bright autumn sky");
    }

    #[test]
    fn unfillable_slot() {
        let e = fixture::engine();
        let mut last = fixed("the old");
        last.push(open(PosTag::VBZ, 9));
        let t = template(&e, last);
        let err = fill_template(&t, &e, &topic(&e, &["moon"]), &GenConfig::default()).unwrap_err();
        assert_eq!(
            err,
            GenerateError::SlotUnfillable {
                line: 3,
                slot: 2,
                tag: PosTag::VBZ,
                syllables: 9
            }
        );
    }

    #[test]
    fn coarse_relaxation() {
        // no NNS of two syllables, but NN has several
        let e = fixture::engine();
        let mut last = fixed("a bright");
        last.push(open(PosTag::NNS, 2));
        last.extend(fixed("sky"));
        let h = fill_template(
            &template(&e, last),
            &e,
            &topic(&e, &["autumn"]),
            &GenConfig::default(),
        )
        .unwrap();
        assert!(h.is_form_valid(&e.lexicon));
    }

    // (prefix of line 3, tag of the final slot)
    const CASES: &[(&str, PosTag)] = &[
        ("the old pond frog", PosTag::VBZ),
        ("the cold wind", PosTag::NN),
        ("a bright summer", PosTag::NN),
        ("the pale cold moon", PosTag::VBZ),
        ("over the", PosTag::NN),
        ("the silent", PosTag::JJ),
        ("the old cold", PosTag::NN),
    ];

    fn slot_case(e: &Engine, prefix: &str, tag: PosTag) -> (HaikuTemplate, Vec<String>, u32) {
        let tokens: Vec<String> = prefix.split_whitespace().map(str::to_string).collect();
        let s = 5 - e.lexicon.line_syllables(&tokens);
        let mut last = fixed(prefix);
        last.push(open(tag, s));
        let candidates: Vec<String> = e
            .ngram
            .vocabulary()
            .iter()
            .filter(|w| e.tags.tag(w) == tag && e.lexicon.contains(w))
            .filter(|w| e.lexicon.syllable_count(w).unwrap().count == s)
            .cloned()
            .collect();
        (template(e, last), candidates, s)
    }

    fn argmax(candidates: &[String], key: impl Fn(&str) -> f64) -> &str {
        let mut best = &candidates[0];
        for c in candidates {
            if key(c) > key(best) {
                best = c;
            }
        }
        best
    }

    #[test]
    fn ngram_only_choice_is_argmax_of_estimate() {
        let e = fixture::engine();
        for (prefix, tag) in CASES {
            let (t, candidates, _) = slot_case(&e, prefix, *tag);
            assert!(!candidates.is_empty(), "{prefix}");
            let context: Vec<&str> = t.lines[..2]
                .iter()
                .chain(std::iter::once(&t.lines[2]))
                .flat_map(|f| f.slots.iter())
                .filter_map(|s| match s {
                    Slot::Fixed(w) => Some(w.as_str()),
                    Slot::Open { .. } => None,
                })
                .collect();
            let expected = argmax(&candidates, |w| e.ngram.estimate(&context, w));
            let c = GenConfig {
                beam_width: candidates.len(),
                ..cfg(1.0, 0.0)
            };
            let h = fill_template(&t, &e, &topic(&e, &["moon"]), &c).unwrap();
            assert_eq!(h.lines[2].last().unwrap(), expected, "{prefix}");
        }
    }

    #[test]
    fn topic_only_choice_is_argmax_of_similarity() {
        let e = fixture::engine();
        for prompt in [["moon"], ["autumn"], ["pond"], ["love"]] {
            let tv = topic(&e, &prompt);
            for (prefix, tag) in CASES {
                let (t, candidates, _) = slot_case(&e, prefix, *tag);
                let sim = |w: &str| {
                    e.space.get(w).map_or(0.0, |v| {
                        let v: Vec<f64> = v.iter().map(|x| f64::from(*x)).collect();
                        similarity(&v, &tv.components).unwrap()
                    })
                };
                let expected = argmax(&candidates, sim);
                let h = fill_template(&t, &e, &tv, &cfg(0.0, 1.0)).unwrap();
                assert_eq!(h.lines[2].last().unwrap(), expected, "{prompt:?} {prefix}");
            }
        }
    }

    #[test]
    fn batch_is_form_valid_and_deterministic() {
        let e = fixture::engine();
        let prompts = vec![vec!["frog", "pond"], vec!["moon"]];
        let c = GenConfig {
            seed: 7,
            ..GenConfig::default()
        };
        let a = generate_batch(&prompts, 10, &e, &c).unwrap();
        let b = generate_batch(&prompts, 10, &e, &c).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        assert!(a.iter().all(|h| h.is_form_valid(&e.lexicon)));
        for (i, h) in a.iter().enumerate() {
            let seed = h.provenance.as_ref().unwrap().seed;
            assert!((0..TEMPLATE_ATTEMPTS).any(|k| seed == derive_seed(7, i as u64, k)));
        }
    }

    #[test]
    fn empty_batch_and_oov_prompts() {
        let e = fixture::engine();
        assert!(
            generate_batch(&[vec!["moon"]], 0, &e, &GenConfig::default())
                .unwrap()
                .is_empty()
        );
        let err = generate_batch(&[vec!["qwzx"]], 3, &e, &GenConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            GenerateError::Semantics(SemanticsError::NoVectorCoverage(_))
        ));
    }

    #[test]
    fn avoided_lemmas_never_appear() {
        let e = fixture::engine();
        let avoid: BTreeSet<String> = ["moon", "pond", "fall", "cold"]
            .iter()
            .map(|s| lemma(s))
            .collect();
        let c = GenConfig {
            seed: 3,
            avoid: avoid.clone(),
            ..GenConfig::default()
        };
        for h in generate_batch(&[vec!["moon"]], 10, &e, &c).unwrap() {
            for (line, fragment) in h.lines.iter().zip(&h.provenance.as_ref().unwrap().template) {
                let fixed_words = tokenize(fragment);
                for w in line.iter().filter(|w| !fixed_words.contains(w)) {
                    assert!(!avoid.contains(&lemma(w)), "{w} in {h}");
                }
            }
        }
    }

    #[test]
    fn invalid_config() {
        let e = fixture::engine();
        for c in [
            cfg(0.0, 0.0),
            cfg(-1.0, 1.0),
            GenConfig {
                beam_width: 0,
                ..GenConfig::default()
            },
        ] {
            assert!(matches!(
                generate_batch(&[vec!["moon"]], 1, &e, &c),
                Err(GenerateError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn parses_and_prints_verse() {
        let h = Haiku::parse("Old pond --\n\nfrog jumps in,\nsplash");
        assert_eq!(h.lines.len(), 3);
        assert_eq!(h.lines[0], ["old", "pond", "--"]);
        assert_eq!(h.to_string(), "old pond --\nfrog jumps in ,\nsplash");
        assert_eq!(h.words().count(), 6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn shared() -> &'static Engine {
            static E: OnceLock<Engine> = OnceLock::new();
            E.get_or_init(fixture::engine)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn every_member_is_575(seed in any::<u64>(), dither in 0.0f64..2.0,
                                   prompt in prop::sample::select(vec!["moon", "pond", "autumn", "river wind", "love"])) {
                let engine = shared();
                let cfg = GenConfig { seed, dither_temperature: dither, ..GenConfig::default() };
                let prompts = [prompt.split_whitespace().collect::<Vec<_>>()];
                let batch = generate_batch(&prompts, 4, engine, &cfg).unwrap();
                prop_assert_eq!(batch.len(), 4);
                for h in &batch {
                    prop_assert_eq!(h.syllables(&engine.lexicon), vec![5, 7, 5]);
                }
                prop_assert_eq!(generate_batch(&prompts, 4, engine, &cfg).unwrap(), batch);
            }
        }
    }
}
