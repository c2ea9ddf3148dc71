//! Order-k n-gram counts with stupid-backoff scoring.
//!
//! Scores are unnormalised: when `context ++ w` was never seen the estimate
//! backs off to the shorter context and is multiplied by `alpha`. The base
//! case is the unigram relative frequency, with a floor of
//! `1 / (2 * total_unigrams)` for words never seen at all.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use thiserror::Error;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_ALPHA: f64 = 0.4;

const CACHE_MAGIC: &[u8; 8] = b"HKNGRAM\0";
const CACHE_VERSION: u32 = 1;

/// Id used for tokens outside the vocabulary. Never part of a stored key.
pub const UNKNOWN: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum NGramError {
    #[error("text corpus contains no tokens")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
    #[error("n-gram cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl NGramError {
    pub fn code(&self) -> &'static str {
        match self {
            NGramError::EmptyCorpus => "EmptyCorpus",
            NGramError::InvalidOrder => "InvalidOrder",
            NGramError::Cache(_) => "CacheFormat",
            NGramError::Io(_) => "Io",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    alpha: f64,
    vocab: Vec<String>,
    ids: HashMap<String, u32>,
    counts: HashMap<Box<[u32]>, u64>,
    total_unigrams: u64,
}

/// Splits corpus text into lowercase sentences. A sentence ends at a token
/// carrying `.`, `!` or `?`, or at a blank line. Characters other than
/// letters, apostrophes and hyphens are dropped from tokens.
pub fn corpus_sentences<R: BufRead>(reader: R) -> std::io::Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        for chunk in line.split_whitespace() {
            let token: String = chunk
                .chars()
                .filter(|c| c.is_alphabetic() || *c == '\'' || *c == '-')
                .flat_map(char::to_lowercase)
                .collect();
            if !token.is_empty() {
                current.push(token);
            }
            if chunk.ends_with(['.', '!', '?']) && !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

impl NGramModel {
    pub fn build<R: BufRead>(corpus: R, order: usize) -> Result<Self, NGramError> {
        let sentences = corpus_sentences(corpus)?;
        Self::from_sentences(&sentences, order)
    }

    pub fn from_sentences<S: AsRef<str>>(
        sentences: &[Vec<S>],
        order: usize,
    ) -> Result<Self, NGramError> {
        if order == 0 {
            return Err(NGramError::InvalidOrder);
        }
        let mut vocab: Vec<String> = sentences
            .iter()
            .flatten()
            .map(|t| t.as_ref().to_lowercase())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if vocab.is_empty() {
            return Err(NGramError::EmptyCorpus);
        }
        vocab.shrink_to_fit();
        let ids: HashMap<String, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let mut counts: HashMap<Box<[u32]>, u64> = HashMap::new();
        let mut total = 0u64;
        for sentence in sentences {
            let seq: Vec<u32> = sentence
                .iter()
                .map(|t| ids[&t.as_ref().to_lowercase()])
                .collect();
            total += seq.len() as u64;
            for n in 1..=order {
                for window in seq.windows(n) {
                    *counts.entry(window.into()).or_insert(0) += 1;
                }
            }
        }
        Ok(NGramModel {
            order,
            alpha: DEFAULT_ALPHA,
            vocab,
            ids,
            counts,
            total_unigrams: total,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!(
            alpha > 0.0 && alpha < 1.0,
            "backoff alpha must lie in (0, 1)"
        );
        self.alpha = alpha;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn total_unigrams(&self) -> u64 {
        self.total_unigrams
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.ids
            .get(token)
            .copied()
            .or_else(|| self.ids.get(&token.to_lowercase()).copied())
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    /// Maps tokens to ids, `UNKNOWN` for out-of-vocabulary tokens.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .map(|t| self.token_id(t.as_ref()).unwrap_or(UNKNOWN))
            .collect()
    }

    pub fn count<S: AsRef<str>>(&self, ngram: &[S]) -> u64 {
        self.count_ids(&self.encode(ngram))
    }

    pub fn count_ids(&self, ids: &[u32]) -> u64 {
        self.counts.get(ids).copied().unwrap_or(0)
    }

    /// Number of distinct stored n-grams across all orders.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Stupid-backoff estimate of the last id in `seq` given the ids before
    /// it; only the trailing `order - 1` context ids are consulted.
    pub fn estimate_ids(&self, seq: &[u32]) -> f64 {
        let Some((&w, context)) = seq.split_last() else {
            return 1.0;
        };
        let ctx_len = context.len().min(self.order - 1);
        let mut factor = 1.0;
        for m in (1..=ctx_len).rev() {
            let key = &seq[seq.len() - 1 - m..];
            let joint = self.count_ids(key);
            if joint > 0 {
                return factor * joint as f64 / self.count_ids(&key[..m]) as f64;
            }
            factor *= self.alpha;
        }
        let unigram = self.count_ids(&[w]);
        let base = if unigram > 0 {
            unigram as f64 / self.total_unigrams as f64
        } else {
            1.0 / (2.0 * self.total_unigrams as f64)
        };
        factor * base
    }

    pub fn estimate<S: AsRef<str>>(&self, context: &[S], word: &str) -> f64 {
        let mut seq = self.encode(context);
        seq.push(self.token_id(word).unwrap_or(UNKNOWN));
        self.estimate_ids(&seq)
    }

    /// Sum of log estimates over every position of `tokens`; 0 for an empty
    /// sequence.
    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        self.score_ids(&self.encode(tokens))
    }

    pub fn score_ids(&self, ids: &[u32]) -> f64 {
        (0..ids.len())
            .map(|i| self.estimate_ids(&ids[..=i]).ln())
            .sum()
    }

    /// Vocabulary words passing both filters, most probable continuation of
    /// `context` first, ties in lexicographic order.
    pub fn continuations<S, T, Y>(
        &self,
        context: &[S],
        tag_filter: T,
        syllable_filter: Y,
    ) -> Vec<(String, f64)>
    where
        S: AsRef<str>,
        T: Fn(&str) -> bool,
        Y: Fn(&str) -> bool,
    {
        let mut seq = self.encode(context);
        let keep = seq.len().saturating_sub(self.order - 1);
        seq.drain(..keep);
        seq.push(UNKNOWN);
        let last = seq.len() - 1;
        let mut out: Vec<(String, f64)> = self
            .vocab
            .iter()
            .enumerate()
            .filter(|(_, w)| tag_filter(w) && syllable_filter(w))
            .map(|(id, w)| {
                seq[last] = id as u32;
                (w.clone(), self.estimate_ids(&seq))
            })
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Writes the versioned binary cache: header, vocabulary, then records
    /// sorted by key.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<(), NGramError> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.order as u32).to_le_bytes())?;
        w.write_all(&self.alpha.to_le_bytes())?;
        w.write_all(&self.total_unigrams.to_le_bytes())?;
        w.write_all(&(self.vocab.len() as u32).to_le_bytes())?;
        for word in &self.vocab {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
        }
        let mut records: Vec<(&[u32], u64)> = self.counts.iter().map(|(k, v)| (&**k, *v)).collect();
        records.sort_unstable();
        w.write_all(&(records.len() as u64).to_le_bytes())?;
        for (key, count) in records {
            w.write_all(&[key.len() as u8])?;
            for id in key {
                w.write_all(&id.to_le_bytes())?;
            }
            w.write_all(&count.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self, NGramError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(NGramError::Cache("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(NGramError::Cache(format!("unsupported version {version}")));
        }
        let order = read_u32(&mut r)? as usize;
        if order == 0 {
            return Err(NGramError::InvalidOrder);
        }
        let alpha = f64::from_le_bytes(read_array(&mut r)?);
        let total_unigrams = u64::from_le_bytes(read_array(&mut r)?);
        let vocab_len = read_u32(&mut r)? as usize;
        let mut vocab = Vec::with_capacity(vocab_len);
        for _ in 0..vocab_len {
            let len = read_u32(&mut r)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            vocab.push(String::from_utf8(buf).map_err(|e| NGramError::Cache(e.to_string()))?);
        }
        let n = u64::from_le_bytes(read_array(&mut r)?);
        let mut counts = HashMap::with_capacity(n as usize);
        for _ in 0..n {
            let [len] = read_array::<1>(&mut r)?;
            let mut key = Vec::with_capacity(len as usize);
            for _ in 0..len {
                let id = read_u32(&mut r)?;
                if id as usize >= vocab_len {
                    return Err(NGramError::Cache(format!("id {id} outside vocabulary")));
                }
                key.push(id);
            }
            counts.insert(
                key.into_boxed_slice(),
                u64::from_le_bytes(read_array(&mut r)?),
            );
        }
        let ids = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Ok(NGramModel {
            order,
            alpha,
            vocab,
            ids,
            counts,
            total_unigrams,
        })
    }
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N], NGramError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> Result<u32, NGramError> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abab(order: usize) -> NGramModel {
        NGramModel::build("a b a b".as_bytes(), order).unwrap()
    }

    #[test]
    fn counts_on_tiny_stream() {
        let m = abab(2);
        assert_eq!(m.count(&["a"]), 2);
        assert_eq!(m.count(&["b"]), 2);
        assert_eq!(m.count(&["a", "b"]), 2);
        assert_eq!(m.count(&["b", "a"]), 1);
        assert_eq!(m.count(&["b", "b"]), 0);
        assert_eq!(m.total_unigrams(), 4);
    }

    #[test]
    fn unigram_only_model() {
        let m = abab(1);
        assert_eq!(m.count(&["a"]), 2);
        assert_eq!(m.count(&["a", "b"]), 0);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            NGramModel::build("".as_bytes(), 2),
            Err(NGramError::EmptyCorpus)
        ));
        assert!(matches!(
            NGramModel::build("12 34 !!".as_bytes(), 2),
            Err(NGramError::EmptyCorpus)
        ));
        assert!(matches!(
            NGramModel::build("a".as_bytes(), 0),
            Err(NGramError::InvalidOrder)
        ));
    }

    #[test]
    fn scores_with_backoff() {
        let m = abab(2);
        assert!((m.score(&["a", "b"]) - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(m.score::<&str>(&[]), 0.0);
        let expected = (2.0f64 / 4.0).ln() + (0.4 * 2.0 / 4.0f64).ln();
        assert!((m.score(&["b", "b"]) - expected).abs() < 1e-12);
    }

    #[test]
    fn unseen_word_floor() {
        let m = abab(2);
        assert!((m.estimate::<&str>(&[], "zebra") - 1.0 / 8.0).abs() < 1e-15);
        assert!((m.estimate(&["a"], "zebra") - 0.4 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn sentence_boundaries_reset_context() {
        let m = NGramModel::build("The moon. Rises slowly!\n\nmoon rises".as_bytes(), 2).unwrap();
        assert_eq!(m.count(&["moon", "rises"]), 1);
        assert_eq!(m.count(&["moon"]), 2);
        assert_eq!(m.count(&["the", "moon"]), 1);
    }

    #[test]
    fn continuation_ranking() {
        let m = abab(2);
        let ranked = m.continuations(&["a"], |_| true, |_| true);
        assert_eq!(
            ranked.iter().map(|(w, _)| w.as_str()).collect::<Vec<_>>(),
            ["b", "a"]
        );
        assert_eq!(ranked[0].1, 1.0);
        assert!((ranked[1].1 - 0.2).abs() < 1e-15);
        assert!(m.continuations(&["a"], |_| false, |_| true).is_empty());
        let unigram = m.continuations::<&str, _, _>(&[], |_| true, |_| true);
        assert_eq!(
            unigram.iter().map(|(w, _)| w.as_str()).collect::<Vec<_>>(),
            ["a", "b"]
        );
    }

    #[test]
    fn cache_round_trip() {
        let m = NGramModel::build(
            "the pale moon rises. the moon sets over the pond.".as_bytes(),
            3,
        )
        .unwrap();
        let mut bytes = Vec::new();
        m.write_cache(&mut bytes).unwrap();
        let back = NGramModel::read_cache(bytes.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        back.write_cache(&mut again).unwrap();
        assert_eq!(again, bytes);
        bytes[0] = b'X';
        assert!(matches!(
            NGramModel::read_cache(bytes.as_slice()),
            Err(NGramError::Cache(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn corpus() -> impl Strategy<Value = Vec<String>> {
            proptest::collection::vec(prop_oneof!["a", "b", "c", "d"], 1..40)
        }

        proptest! {
            #[test]
            fn positional_terms_never_positive(toks in corpus(), probe in corpus()) {
                let m = NGramModel::from_sentences(&[toks], 3).unwrap();
                let mut prev = 0.0;
                for i in 1..=probe.len() {
                    let s = m.score(&probe[..i]);
                    prop_assert!(s <= prev + 1e-12);
                    prev = s;
                }
            }

            #[test]
            fn continuations_agree_with_score(toks in corpus(), ctx in corpus()) {
                let m = NGramModel::from_sentences(&[toks], 3).unwrap();
                let ranked = m.continuations(&ctx, |_| true, |_| true);
                for pair in ranked.windows(2) {
                    let mut a = ctx.clone();
                    a.push(pair[0].0.clone());
                    let mut b = ctx.clone();
                    b.push(pair[1].0.clone());
                    prop_assert!(m.score(&a) >= m.score(&b) - 1e-9);
                }
            }
        }
    }
}
