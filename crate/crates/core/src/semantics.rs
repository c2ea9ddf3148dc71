//! Word vectors in GloVe text format, topic vectors and blending.
//!
//! A topic is the componentwise sum of the vectors of its words. Vectors are
//! stored as `f32` (as distributed) and summed in `f64`, which keeps sums of
//! a few hundred words exact for GloVe-scale magnitudes.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SemanticsError {
    #[error("vector file contains no usable rows")]
    EmptySpace,
    #[error("none of {0:?} has a vector")]
    NoVectorCoverage(Vec<String>),
    #[error("topic vector has zero length")]
    ZeroTopic,
    #[error("similarity of a zero vector")]
    ZeroVector,
    #[error("blend needs one non-negative weight per topic, not all zero")]
    InvalidWeights,
    #[error("vectors of dimension {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0}")]
    Io(String),
}

impl SemanticsError {
    pub fn code(&self) -> &'static str {
        match self {
            SemanticsError::EmptySpace => "EmptySpace",
            SemanticsError::NoVectorCoverage(_) => "NoVectorCoverage",
            SemanticsError::ZeroTopic => "ZeroTopic",
            SemanticsError::ZeroVector => "ZeroVector",
            SemanticsError::InvalidWeights => "InvalidWeights",
            SemanticsError::DimensionMismatch(..) => "DimensionMismatch",
            SemanticsError::Io(_) => "Io",
        }
    }
}

/// A row skipped while loading because its arity or numbers were wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRow {
    pub line: usize,
    pub word: String,
    pub found: usize,
    pub expected: usize,
}

#[derive(Debug, Clone)]
pub struct VectorSpace {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl VectorSpace {
    pub fn from_rows<I, S>(rows: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        let mut space = VectorSpace {
            dim: 0,
            index: HashMap::new(),
            data: Vec::new(),
        };
        for (word, v) in rows {
            if space.dim == 0 {
                space.dim = v.len();
            }
            if v.len() != space.dim || v.is_empty() {
                return Err(SemanticsError::DimensionMismatch(space.dim, v.len()));
            }
            space.insert(word.into(), &v);
        }
        if space.index.is_empty() {
            return Err(SemanticsError::EmptySpace);
        }
        Ok(space)
    }

    fn insert(&mut self, word: String, v: &[f32]) {
        let word = word.to_lowercase();
        if self.index.contains_key(&word) {
            return;
        }
        self.index.insert(word, self.index.len());
        self.data.extend_from_slice(v);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, word: &str) -> Option<&[f32]> {
        let i = match self.index.get(word) {
            Some(i) => *i,
            None => *self.index.get(&word.to_lowercase())?,
        };
        Some(&self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Sum of the vectors of the in-vocabulary words; the others are
    /// recorded as missing.
    pub fn topic_vector<S: AsRef<str>>(&self, words: &[S]) -> Result<TopicVector, SemanticsError> {
        let mut components = vec![0.0f64; self.dim];
        let mut contributing = Vec::new();
        let mut missing = Vec::new();
        for w in words {
            let w = w.as_ref();
            match self.get(w) {
                Some(v) => {
                    for (c, x) in components.iter_mut().zip(v) {
                        *c += f64::from(*x);
                    }
                    contributing.push(w.to_lowercase());
                }
                None => missing.push(w.to_string()),
            }
        }
        if contributing.is_empty() {
            return Err(SemanticsError::NoVectorCoverage(missing));
        }
        if components.iter().all(|c| *c == 0.0) {
            return Err(SemanticsError::ZeroTopic);
        }
        Ok(TopicVector {
            components,
            contributing,
            missing,
        })
    }
}

/// Reads GloVe text rows `word v1 ... vd`. The dimension is taken from the
/// first row unless given; rows of another arity are skipped and reported.
pub fn load_vectors<R: BufRead>(
    reader: R,
    expected_dim: Option<usize>,
) -> Result<(VectorSpace, Vec<SkippedRow>), SemanticsError> {
    let mut space = VectorSpace {
        dim: expected_dim.unwrap_or(0),
        index: HashMap::new(),
        data: Vec::new(),
    };
    let mut skipped = Vec::new();
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| SemanticsError::Io(e.to_string()))?;
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        values.clear();
        let mut bad = false;
        for p in parts {
            match p.parse::<f32>() {
                Ok(x) if x.is_finite() => values.push(x),
                _ => bad = true,
            }
        }
        if space.dim == 0 && !bad && !values.is_empty() {
            space.dim = values.len();
        }
        if bad || values.len() != space.dim {
            skipped.push(SkippedRow {
                line: i + 1,
                word: word.to_string(),
                found: values.len(),
                expected: space.dim,
            });
            continue;
        }
        space.insert(word.to_string(), &values);
    }
    if space.index.is_empty() {
        return Err(SemanticsError::EmptySpace);
    }
    Ok((space, skipped))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicVector {
    pub components: Vec<f64>,
    pub contributing: Vec<String>,
    #[serde(default)]
    pub missing: Vec<String>,
}

impl TopicVector {
    pub fn norm(&self) -> f64 {
        norm(&self.components)
    }

    pub fn unit(&self) -> Result<Vec<f64>, SemanticsError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SemanticsError::ZeroTopic);
        }
        Ok(self.components.iter().map(|c| c / n).collect())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weighted sum of the unit-normalised topics. Normalising first stops a
/// seventeen-word haiku from drowning a one-word prompt.
pub fn blend(topics: &[TopicVector], weights: &[f64]) -> Result<TopicVector, SemanticsError> {
    if topics.is_empty()
        || topics.len() != weights.len()
        || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
        || weights.iter().all(|w| *w == 0.0)
    {
        return Err(SemanticsError::InvalidWeights);
    }
    let dim = topics[0].components.len();
    let mut components = vec![0.0; dim];
    let mut contributing = Vec::new();
    let mut missing = Vec::new();
    for (t, w) in topics.iter().zip(weights) {
        if t.components.len() != dim {
            return Err(SemanticsError::DimensionMismatch(dim, t.components.len()));
        }
        let unit = t.unit()?;
        for (c, u) in components.iter_mut().zip(&unit) {
            *c += w * u;
        }
        contributing.extend(t.contributing.iter().cloned());
        missing.extend(t.missing.iter().cloned());
    }
    if components.iter().all(|c| *c == 0.0) {
        return Err(SemanticsError::ZeroTopic);
    }
    Ok(TopicVector {
        components,
        contributing,
        missing,
    })
}

/// Cosine of the angle between `a` and `b`, clamped to [-1, 1].
pub fn similarity(a: &[f64], b: &[f64]) -> Result<f64, SemanticsError> {
    if a.len() != b.len() {
        return Err(SemanticsError::DimensionMismatch(a.len(), b.len()));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(SemanticsError::ZeroVector);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine between a stored `f32` word vector and a topic.
pub fn word_similarity(word: &[f32], topic: &[f64]) -> Result<f64, SemanticsError> {
    let w: Vec<f64> = word.iter().map(|x| f64::from(*x)).collect();
    similarity(&w, topic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> VectorSpace {
        let text = "frog 0.1 0.2\npond 0.5 -0.3\nmoon 1 0\nsun 0 1\n";
        load_vectors(text.as_bytes(), None).unwrap().0
    }

    #[test]
    fn loads_rows() {
        let s = toy();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.get("frog").unwrap(), &[0.1f32, 0.2]);
        assert_eq!(s.get("FROG").unwrap(), &[0.1f32, 0.2]);
    }

    #[test]
    fn wrong_arity_skipped() {
        let (s, skipped) =
            load_vectors("frog 0.1 0.2\nbad 1 2 3\nnan x 1\n".as_bytes(), Some(2)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(skipped.len(), 2);
        assert_eq!(
            skipped[0],
            SkippedRow {
                line: 2,
                word: "bad".into(),
                found: 3,
                expected: 2
            }
        );
    }

    #[test]
    fn empty_space() {
        assert_eq!(
            load_vectors("".as_bytes(), None).unwrap_err(),
            SemanticsError::EmptySpace
        );
    }

    #[test]
    fn topic_sums_vectors() {
        let s = toy();
        let t = s.topic_vector(&["frog", "pond"]).unwrap();
        let expect = [
            f64::from(0.1f32) + f64::from(0.5f32),
            f64::from(0.2f32) + f64::from(-0.3f32),
        ];
        assert_eq!(t.components, expect);
        let one = s.topic_vector(&["moon"]).unwrap();
        assert_eq!(one.components, vec![1.0, 0.0]);
        let partial = s.topic_vector(&["moon", "zzz"]).unwrap();
        assert_eq!(partial.missing, vec!["zzz".to_string()]);
    }

    #[test]
    fn all_oov_topic() {
        assert!(matches!(
            toy().topic_vector(&["zzz", "qqq"]),
            Err(SemanticsError::NoVectorCoverage(_))
        ));
    }

    #[test]
    fn blends() {
        let s = toy();
        let t = s.topic_vector(&["frog", "pond"]).unwrap();
        let single = blend(std::slice::from_ref(&t), &[1.0]).unwrap();
        assert!((single.norm() - 1.0).abs() < 1e-12);
        let double = blend(&[t.clone(), t.clone()], &[1.0, 1.0]).unwrap();
        assert!((double.norm() - 2.0).abs() < 1e-12);
        assert!((similarity(&double.components, &t.components).unwrap() - 1.0).abs() < 1e-12);
        let moon = s.topic_vector(&["moon"]).unwrap();
        let sun = s.topic_vector(&["sun"]).unwrap();
        let mix = blend(&[moon.clone(), sun.clone()], &[1.0, 1.0]).unwrap();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert!((similarity(&mix.components, &moon.components).unwrap() - half).abs() < 1e-12);
        assert!((similarity(&mix.components, &sun.components).unwrap() - half).abs() < 1e-12);
    }

    #[test]
    fn blend_rejects_bad_input() {
        let s = toy();
        let t = s.topic_vector(&["moon"]).unwrap();
        assert_eq!(blend(&[], &[]).unwrap_err(), SemanticsError::InvalidWeights);
        assert_eq!(
            blend(std::slice::from_ref(&t), &[0.0]).unwrap_err(),
            SemanticsError::InvalidWeights
        );
        assert_eq!(
            blend(std::slice::from_ref(&t), &[1.0, 1.0]).unwrap_err(),
            SemanticsError::InvalidWeights
        );
        let zero = TopicVector {
            components: vec![0.0, 0.0],
            contributing: vec!["x".into()],
            missing: vec![],
        };
        assert_eq!(
            blend(&[t, zero], &[1.0, 1.0]).unwrap_err(),
            SemanticsError::ZeroTopic
        );
    }

    #[test]
    fn cosine_cases() {
        let v = [0.3, -1.2, 2.0];
        assert!((similarity(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(similarity(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 0.0);
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((similarity(&v, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(
            similarity(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(),
            SemanticsError::ZeroVector
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (1usize..24).prop_flat_map(|n| {
                let v = proptest::collection::vec(-1e3f64..1e3, n);
                (v.clone(), v)
            })
        }

        proptest! {
            #[test]
            fn cosine_bounded_symmetric_scale_free((a, b) in vec_pair(), k in 1e-3f64..1e3) {
                prop_assume!(norm(&a) > 1e-6 && norm(&b) > 1e-6);
                let s = similarity(&a, &b).unwrap();
                prop_assert!((-1.0..=1.0).contains(&s));
                prop_assert!((s - similarity(&b, &a).unwrap()).abs() <= 1e-12);
                let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
                prop_assert!((s - similarity(&scaled, &b).unwrap()).abs() <= 1e-9);
            }

            #[test]
            fn blend_ignores_order(words in proptest::collection::vec(prop::sample::select(vec!["frog", "pond", "moon", "sun"]), 1..5), rot in 0usize..5) {
                let s = toy();
                let mut topics: Vec<TopicVector> = words.iter().map(|w| s.topic_vector(&[*w]).unwrap()).collect();
                let weights = vec![1.0; topics.len()];
                let Ok(a) = blend(&topics, &weights) else { return Ok(()) };
                let r = rot % topics.len();
                topics.rotate_left(r);
                let b = blend(&topics, &weights).unwrap();
                for (x, y) in a.components.iter().zip(&b.components) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }

            #[test]
            fn topic_sum_is_additive(a in proptest::collection::vec(prop::sample::select(vec!["frog", "pond", "moon", "sun"]), 1..6),
                                     b in proptest::collection::vec(prop::sample::select(vec!["frog", "pond", "moon", "sun"]), 1..6)) {
                let s = toy();
                let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
                let (ta, tb, tab) = (s.topic_vector(&a).unwrap(), s.topic_vector(&b).unwrap(), s.topic_vector(&ab).unwrap());
                let sum: Vec<f64> = ta.components.iter().zip(&tb.components).map(|(x, y)| x + y).collect();
                prop_assert_eq!(tab.components, sum);
            }
        }
    }
}
