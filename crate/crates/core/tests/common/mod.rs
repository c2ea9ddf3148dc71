#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use renga::engine::{build_model_dir, Sources};
use renga::Engine;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn data(name: &str) -> PathBuf {
    data_dir().join(name)
}

pub fn sources() -> Sources {
    Sources {
        haiku_corpus: data("haiku-corpus.txt"),
        text_corpus: data("text-corpus.txt"),
        vectors: data("vectors-demo.txt"),
        cmudict: data("cmudict-demo.dict"),
        afinn: data("afinn-111.txt"),
        tags: None,
        order: 3,
    }
}

/// Model directory built once per test binary.
pub fn models_dir() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        build_model_dir(&sources(), dir.path()).unwrap();
        dir
    })
    .path()
}

pub fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| Engine::load(models_dir()).unwrap())
}
