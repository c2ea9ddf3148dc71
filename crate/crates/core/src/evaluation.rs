//! Scoring and filtration: sense (n-gram likelihood), topic (cosine to the
//! prompt), emotion (AFINN valence) and word variety (normalised edit
//! distance), plus selection of one haiku from a batch.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::Haiku;
use crate::ngram::NGramModel;
use crate::semantics::{similarity, TopicVector, VectorSpace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvaluationError {
    #[error("affect lexicon contains no entries")]
    EmptyLexicon,
    #[error("no candidates to select from")]
    EmptyCandidates,
    #[error("{0}")]
    Io(String),
}

impl EvaluationError {
    pub fn code(&self) -> &'static str {
        match self {
            EvaluationError::EmptyLexicon => "EmptyLexicon",
            EvaluationError::EmptyCandidates => "EmptyCandidates",
            EvaluationError::Io(_) => "Io",
        }
    }
}

/// Word → valence in [-5, 5].
#[derive(Debug, Clone, Default)]
pub struct AffectLexicon {
    valence: HashMap<String, i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub line: usize,
    pub text: String,
}

impl AffectLexicon {
    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<i32> {
        self.valence
            .get(word)
            .or_else(|| self.valence.get(&word.to_lowercase()))
            .copied()
    }
}

/// Reads AFINN `word<TAB>score` rows; scores outside [-5, 5] are rejected.
pub fn parse_afinn<R: BufRead>(
    reader: R,
) -> Result<(AffectLexicon, Vec<RejectedRow>), EvaluationError> {
    let mut valence = HashMap::new();
    let mut rejected = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| EvaluationError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line
            .rsplit_once('\t')
            .and_then(|(w, s)| Some((w.trim(), s.trim().parse::<i32>().ok()?)))
            .filter(|(w, s)| !w.is_empty() && (-5..=5).contains(s));
        match parsed {
            Some((w, s)) => {
                valence.entry(w.to_lowercase()).or_insert(s);
            }
            None => rejected.push(RejectedRow {
                line: i + 1,
                text: line,
            }),
        }
    }
    if valence.is_empty() {
        return Err(EvaluationError::EmptyLexicon);
    }
    Ok((AffectLexicon { valence }, rejected))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    /// Mean n-gram log-score per token.
    pub sense: f64,
    pub topic: f64,
    pub emotion: i32,
    pub variety: f64,
}

/// Mean per-token n-gram log score of the haiku read as one stream.
pub fn sense_score(model: &NGramModel, haiku: &Haiku) -> f64 {
    let tokens: Vec<&str> = haiku.tokens().collect();
    if tokens.is_empty() {
        0.0
    } else {
        model.score(&tokens) / tokens.len() as f64
    }
}

/// Cosine between the summed vectors of the haiku's words and `topic`;
/// 0 when no word has a vector.
pub fn topic_score(space: &VectorSpace, haiku: &Haiku, topic: &TopicVector) -> f64 {
    let words: Vec<&str> = haiku.words().collect();
    space
        .topic_vector(&words)
        .ok()
        .and_then(|v| similarity(&v.components, &topic.components).ok())
        .unwrap_or(0.0)
}

pub fn emotion_score(lexicon: &AffectLexicon, haiku: &Haiku) -> i32 {
    haiku.tokens().filter_map(|t| lexicon.get(t)).sum()
}

/// Unit-cost edit distance between two sequences.
pub fn levenshtein_seq<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_seq(&a, &b)
}

/// Mean over all pairs of word positions of the edit distance divided by
/// the longer word's length. Punctuation is ignored; fewer than two words
/// gives 0.
pub fn word_variety(haiku: &Haiku) -> f64 {
    let words: Vec<Vec<char>> = haiku.words().map(|w| w.chars().collect()).collect();
    if words.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let longest = words[i].len().max(words[j].len());
            total += levenshtein_seq(&words[i], &words[j]) as f64 / longest as f64;
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// Cosine between the topic vectors of two haikus; 0 if either has no
/// coverage.
pub fn link_coherence(space: &VectorSpace, previous: &Haiku, next: &Haiku) -> f64 {
    let prev: Vec<&str> = previous.words().collect();
    let next: Vec<&str> = next.words().collect();
    match (space.topic_vector(&prev), space.topic_vector(&next)) {
        (Ok(a), Ok(b)) => similarity(&a.components, &b.components).unwrap_or(0.0),
        _ => 0.0,
    }
}

pub fn score_report(
    model: &NGramModel,
    space: &VectorSpace,
    affect: &AffectLexicon,
    haiku: &Haiku,
    topic: &TopicVector,
) -> ScoreReport {
    ScoreReport {
        sense: sense_score(model, haiku),
        topic: topic_score(space, haiku, topic),
        emotion: emotion_score(affect, haiku),
        variety: word_variety(haiku),
    }
}

/// Named filter for a renga link, as written in ruleset files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    MostPositive,
    LeastVariety,
    MostCoherent,
}

#[derive(Debug, Clone, Copy)]
pub enum Criterion<'a> {
    MostPositive,
    LeastVariety,
    MostCoherent(&'a Haiku),
    /// Highest cosine to a topic; used for a coherence filter on the first
    /// link, which has no predecessor.
    OnTopic(&'a TopicVector),
}

/// Index of the selected candidate. Ties go to the lowest index.
pub fn select(
    candidates: &[Haiku],
    criterion: Criterion<'_>,
    affect: &AffectLexicon,
    space: &VectorSpace,
) -> Result<usize, EvaluationError> {
    if candidates.is_empty() {
        return Err(EvaluationError::EmptyCandidates);
    }
    let key = |h: &Haiku| -> f64 {
        match criterion {
            Criterion::MostPositive => f64::from(emotion_score(affect, h)),
            Criterion::LeastVariety => -word_variety(h),
            Criterion::MostCoherent(prev) => link_coherence(space, prev, h),
            Criterion::OnTopic(t) => topic_score(space, h, t),
        }
    };
    let mut best = 0;
    let mut best_key = key(&candidates[0]);
    for (i, h) in candidates.iter().enumerate().skip(1) {
        let k = key(h);
        if k > best_key {
            best = i;
            best_key = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::load_vectors;

    fn haiku(lines: &[&str]) -> Haiku {
        Haiku::from_line_texts(lines.iter().copied())
    }

    fn afinn() -> AffectLexicon {
        parse_afinn("love\t3\nhate\t-3\ndoes not work\t-3\n".as_bytes())
            .unwrap()
            .0
    }

    #[test]
    fn parses_afinn_rows() {
        let (lex, rejected) = parse_afinn("love\t3\nx\t9\nbad row\n".as_bytes()).unwrap();
        assert_eq!(lex.get("love"), Some(3));
        assert_eq!(lex.get("x"), None);
        assert_eq!(rejected.len(), 2);
        assert_eq!(rejected[0].line, 2);
        assert_eq!(
            parse_afinn("".as_bytes()).unwrap_err(),
            EvaluationError::EmptyLexicon
        );
    }

    #[test]
    fn emotion_sums_valence() {
        let lex = afinn();
        assert_eq!(
            emotion_score(&lex, &haiku(&["grey stone", "rain", "moss"])),
            0
        );
        assert_eq!(emotion_score(&lex, &haiku(&["my Love", "rain", "moss"])), 3);
        let a = haiku(&["love", "hate love"]);
        let b = haiku(&["love love"]);
        let mut both = a.clone();
        both.lines.extend(b.lines.clone());
        assert_eq!(
            emotion_score(&lex, &both),
            emotion_score(&lex, &a) + emotion_score(&lex, &b)
        );
    }

    #[test]
    fn edit_distances() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("moon", "moon"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("über", "uber"), 1);
        assert_eq!(levenshtein_seq(&["the", "moon"], &["a", "moon"]), 1);
    }

    #[test]
    fn variety_cases() {
        assert_eq!(word_variety(&haiku(&["moon moon", "moon", "moon"])), 0.0);
        assert_eq!(word_variety(&haiku(&["a b"])), 1.0);
        assert_eq!(word_variety(&haiku(&["moon --"])), 0.0);
        assert_eq!(word_variety(&Haiku::new(vec![])), 0.0);
        // pairs: (cat,cats)=1/4, (cat,dog)=3/3, (cats,dog)=4/4
        let v = word_variety(&haiku(&["cat cats", "dog"]));
        assert!((v - (0.25 + 1.0 + 1.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sense_cases() {
        let m = NGramModel::build(
            "the moon rises over the pond. the frog sleeps.".as_bytes(),
            3,
        )
        .unwrap();
        assert_eq!(sense_score(&m, &Haiku::new(vec![])), 0.0);
        let single = sense_score(&m, &haiku(&["moon"]));
        assert!((single - (1.0f64 / 9.0).ln()).abs() < 1e-12);
        let phrase = sense_score(&m, &haiku(&["the moon rises", "over the pond"]));
        let shuffled = sense_score(&m, &haiku(&["pond the over", "rises moon the"]));
        assert!(phrase >= shuffled);
    }

    fn toy_space() -> VectorSpace {
        load_vectors(
            "moon 1 0 0\nsun 0 1 0\nriver 0 0 1\npond 1 1 0\n".as_bytes(),
            None,
        )
        .unwrap()
        .0
    }

    #[test]
    fn topic_cases() {
        let space = toy_space();
        let topic = space.topic_vector(&["moon", "sun"]).unwrap();
        assert!((topic_score(&space, &haiku(&["moon sun"]), &topic) - 1.0).abs() < 1e-12);
        let river = space.topic_vector(&["river"]).unwrap();
        assert_eq!(topic_score(&space, &haiku(&["moon", "sun"]), &river), 0.0);
        // (1,0,0)+(1,1,0)+(0,0,1) = (2,1,1) against (1,0,0): 2/sqrt(6)
        let moon = space.topic_vector(&["moon"]).unwrap();
        let got = topic_score(
            &space,
            &haiku(&["the moon", "over the pond --", "river"]),
            &moon,
        );
        assert!((got - 2.0 / 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(topic_score(&space, &haiku(&["zzz"]), &moon), 0.0);
    }

    #[test]
    fn coherence_cases() {
        let space = toy_space();
        let a = haiku(&["moon pond"]);
        assert!((link_coherence(&space, &a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(
            link_coherence(&space, &haiku(&["moon"]), &haiku(&["river"])),
            0.0
        );
        // (1,0,0) vs (1,1,0): 1/sqrt(2)
        let got = link_coherence(&space, &haiku(&["moon"]), &haiku(&["pond"]));
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(link_coherence(&space, &haiku(&["zzz"]), &a), 0.0);
    }

    #[test]
    fn selection_rules() {
        let lex = afinn();
        let space = toy_space();
        let cands = vec![haiku(&["rain"]), haiku(&["love"]), haiku(&["love"])];
        assert_eq!(
            select(&cands, Criterion::MostPositive, &lex, &space).unwrap(),
            1
        );
        assert_eq!(
            select(&cands[..1], Criterion::MostPositive, &lex, &space).unwrap(),
            0
        );
        assert_eq!(
            select(&[], Criterion::MostPositive, &lex, &space).unwrap_err(),
            EvaluationError::EmptyCandidates
        );
        let varied = vec![
            haiku(&["cat dog"]),
            haiku(&["moon moon"]),
            haiku(&["sun sun"]),
        ];
        assert_eq!(
            select(&varied, Criterion::LeastVariety, &lex, &space).unwrap(),
            1
        );
        let prev = haiku(&["moon"]);
        let next = vec![haiku(&["river"]), haiku(&["pond"]), haiku(&["moon"])];
        assert_eq!(
            select(&next, Criterion::MostCoherent(&prev), &lex, &space).unwrap(),
            2
        );
    }

    #[test]
    fn filter_kind_names() {
        let k: FilterKind = serde_json::from_str("\"least_variety\"").unwrap();
        assert_eq!(k, FilterKind::LeastVariety);
        assert_eq!(
            serde_json::to_string(&FilterKind::MostPositive).unwrap(),
            "\"most_positive\""
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn variety_in_unit_interval(words in proptest::collection::vec("[a-c]{1,5}", 0..12)) {
                let h = Haiku::new(vec![words]);
                let v = word_variety(&h);
                prop_assert!((0.0..=1.0).contains(&v));
            }

            #[test]
            fn levenshtein_is_a_metric(x in "[abé]{0,8}", y in "[abé]{0,8}", z in "[abé]{0,8}") {
                let d = levenshtein;
                prop_assert_eq!(d(&x, &x), 0);
                prop_assert_eq!(d(&x, &y) == 0, x == y);
                prop_assert_eq!(d(&x, &y), d(&y, &x));
                prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
                prop_assert!(d(&x, &y) <= x.chars().count().max(y.chars().count()));
            }

            #[test]
            fn selection_returns_a_first_extreme(vals in proptest::collection::vec(-3i32..4, 1..10)) {
                let lex = afinn();
                let batch: Vec<Haiku> = vals
                    .iter()
                    .map(|v| {
                        let word = if *v >= 0 { "love" } else { "hate" };
                        Haiku::new(vec![vec![word.to_string(); v.unsigned_abs() as usize]])
                    })
                    .collect();
                let space = load_vectors("x 1\n".as_bytes(), None).unwrap().0;
                let i = select(&batch, Criterion::MostPositive, &lex, &space).unwrap();
                let scores: Vec<i32> = batch.iter().map(|h| emotion_score(&lex, h)).collect();
                let best = *scores.iter().max().unwrap();
                prop_assert_eq!(scores[i], best);
                prop_assert!(scores[..i].iter().all(|s| *s < best));
            }
        }
    }
}
