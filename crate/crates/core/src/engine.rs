//! The loaded model set and its on-disk cache directory.
//!
//! A model directory holds:
//!
//! | file             | contents                                     |
//! |------------------|----------------------------------------------|
//! | `manifest.json`  | format name and version, build statistics     |
//! | `ngram.bin`      | binary n-gram counts (see [`NGramModel::write_cache`]) |
//! | `skeletons.json` | the extracted skeleton pool                   |
//! | `cmudict.dict`   | pronouncing lexicon, CMU text format          |
//! | `vectors.txt`    | word vectors, GloVe text format               |
//! | `afinn.txt`      | affect lexicon, AFINN format                  |
//! | `tags.tsv`       | tag lexicon, `word<TAB>TAG`                   |

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::evaluation::{parse_afinn, AffectLexicon};
use crate::generator::CandidateIndex;
use crate::grammar::{extract_skeletons, ExtractStats, SkeletonPool, TagLexicon};
use crate::ngram::NGramModel;
use crate::phonology::{parse_pronouncing_lexicon, PronouncingLexicon};
use crate::semantics::{load_vectors, VectorSpace};

pub const MODEL_FORMAT: &str = "renga-models";
pub const MODEL_VERSION: u32 = 1;

pub struct Engine {
    pub lexicon: PronouncingLexicon,
    pub tags: TagLexicon,
    pub ngram: NGramModel,
    pub space: VectorSpace,
    pub affect: AffectLexicon,
    pub skeletons: SkeletonPool,
    candidates: CandidateIndex,
    pruned_fragments: usize,
}

impl Engine {
    /// Assembles an engine and drops skeleton fragments with a slot no
    /// vocabulary word can fill.
    pub fn new(
        lexicon: PronouncingLexicon,
        tags: TagLexicon,
        ngram: NGramModel,
        space: VectorSpace,
        affect: AffectLexicon,
        mut skeletons: SkeletonPool,
    ) -> Self {
        let candidates = CandidateIndex::build(&lexicon, &tags, &ngram, &space);
        let before = skeletons.len();
        skeletons.retain(|f| f.open_slots().all(|(tag, s)| candidates.can_fill(tag, s)));
        let pruned_fragments = before - skeletons.len();
        Engine {
            lexicon,
            tags,
            ngram,
            space,
            affect,
            skeletons,
            candidates,
            pruned_fragments,
        }
    }

    pub fn candidates(&self) -> &CandidateIndex {
        &self.candidates
    }

    pub fn pruned_fragments(&self) -> usize {
        self.pruned_fragments
    }

    pub fn load(dir: &Path) -> Result<Self, Error> {
        let manifest: Manifest = serde_json::from_reader(open(&dir.join("manifest.json"))?)?;
        if manifest.format != MODEL_FORMAT || manifest.version != MODEL_VERSION {
            return Err(Error::Cache(format!(
                "{}: expected {MODEL_FORMAT} v{MODEL_VERSION}, found {} v{}",
                dir.display(),
                manifest.format,
                manifest.version
            )));
        }
        let (lexicon, _) = parse_pronouncing_lexicon(open(&dir.join("cmudict.dict"))?)?;
        let tags = TagLexicon::parse(open(&dir.join("tags.tsv"))?)?;
        let ngram = NGramModel::read_cache(open(&dir.join("ngram.bin"))?)?;
        let (space, _) = load_vectors(open(&dir.join("vectors.txt"))?, None)?;
        let (affect, _) = parse_afinn(open(&dir.join("afinn.txt"))?)?;
        let skeletons: SkeletonPool = serde_json::from_reader(open(&dir.join("skeletons.json"))?)?;
        Ok(Engine::new(lexicon, tags, ngram, space, affect, skeletons))
    }
}

/// Source files for `build-models`.
#[derive(Debug, Clone)]
pub struct Sources {
    pub haiku_corpus: PathBuf,
    pub text_corpus: PathBuf,
    pub vectors: PathBuf,
    pub cmudict: PathBuf,
    pub afinn: PathBuf,
    /// Defaults to the seed lexicon compiled into the crate.
    pub tags: Option<PathBuf>,
    pub order: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    #[serde(default)]
    pub stats: BuildStats,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BuildStats {
    pub lexicon_entries: usize,
    pub malformed_lexicon_lines: usize,
    pub tag_entries: usize,
    pub ngram_order: usize,
    pub ngram_entries: usize,
    pub ngram_tokens: u64,
    pub vectors: usize,
    pub vector_dim: usize,
    pub skipped_vector_rows: usize,
    pub afinn_entries: usize,
    pub rejected_afinn_rows: usize,
    pub corpus_lines: usize,
    pub fragments_five: usize,
    pub fragments_seven: usize,
    pub discarded_lines: usize,
    pub unfillable_fragments: usize,
    pub candidate_words: usize,
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn copy(from: &Path, to: &Path) -> Result<(), Error> {
    fs::copy(from, to).map(|_| ()).map_err(|source| Error::Io {
        path: from.to_path_buf(),
        source,
    })
}

/// Parses and validates every source, then writes a model directory.
pub fn build_model_dir(sources: &Sources, out: &Path) -> Result<(Engine, BuildStats), Error> {
    let (lexicon, malformed) = parse_pronouncing_lexicon(open(&sources.cmudict)?)?;
    let tags = match &sources.tags {
        Some(p) => TagLexicon::parse(open(p)?)?,
        None => TagLexicon::seed(),
    };
    let ngram = NGramModel::build(open(&sources.text_corpus)?, sources.order)?;
    let (space, skipped) = load_vectors(open(&sources.vectors)?, None)?;
    let (affect, rejected) = parse_afinn(open(&sources.afinn)?)?;
    let (skeletons, extract): (SkeletonPool, ExtractStats) =
        extract_skeletons(open(&sources.haiku_corpus)?, &tags, &lexicon)?;

    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let create = |name: &str| {
        let p = out.join(name);
        File::create(&p)
            .map(BufWriter::new)
            .map_err(|source| Error::Io { path: p, source })
    };
    ngram.write_cache(create("ngram.bin")?)?;
    let mut w = create("skeletons.json")?;
    serde_json::to_writer(&mut w, &skeletons)?;
    w.flush().map_err(|source| Error::Io {
        path: out.join("skeletons.json"),
        source,
    })?;
    copy(&sources.cmudict, &out.join("cmudict.dict"))?;
    copy(&sources.vectors, &out.join("vectors.txt"))?;
    copy(&sources.afinn, &out.join("afinn.txt"))?;
    match &sources.tags {
        Some(p) => copy(p, &out.join("tags.tsv"))?,
        None => fs::write(out.join("tags.tsv"), crate::grammar::SEED_TAGS).map_err(|source| {
            Error::Io {
                path: out.join("tags.tsv"),
                source,
            }
        })?,
    }

    let mut stats = BuildStats {
        lexicon_entries: lexicon.len(),
        malformed_lexicon_lines: malformed.len(),
        tag_entries: tags.len(),
        ngram_order: ngram.order(),
        ngram_entries: ngram.len(),
        ngram_tokens: ngram.total_unigrams(),
        vectors: space.len(),
        vector_dim: space.dim(),
        skipped_vector_rows: skipped.len(),
        afinn_entries: affect.len(),
        rejected_afinn_rows: rejected.len(),
        corpus_lines: extract.lines,
        fragments_five: skeletons.five.len(),
        fragments_seven: skeletons.seven.len(),
        discarded_lines: extract.discarded,
        ..BuildStats::default()
    };
    let engine = Engine::new(lexicon, tags, ngram, space, affect, skeletons);
    stats.unfillable_fragments = engine.pruned_fragments();
    stats.candidate_words = engine.candidates().len();
    let manifest = Manifest {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        stats: stats.clone(),
    };
    let mut w = create("manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.flush().map_err(|source| Error::Io {
        path: out.join("manifest.json"),
        source,
    })?;
    Ok((engine, stats))
}
