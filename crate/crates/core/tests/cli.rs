mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn renga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renga"))
        .args(args)
        .env_remove("RENGA_MODELS")
        .output()
        .unwrap()
}

fn models() -> String {
    common::models_dir().display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Poems in output order, comment lines dropped.
fn poems(text: &str) -> Vec<Vec<String>> {
    text.split("\n\n")
        .map(|block| {
            block
                .lines()
                .filter(|l| !l.starts_with('#'))
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .filter(|p| !p.is_empty())
        .collect()
}

#[test]
fn build_models_writes_a_loadable_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let d = |f: &str| common::data(f).display().to_string();
    let o = renga(&[
        "build-models",
        "--haiku-corpus",
        &d("haiku-corpus.txt"),
        "--text-corpus",
        &d("text-corpus.txt"),
        "--vectors",
        &d("vectors-demo.txt"),
        "--cmudict",
        &d("cmudict-demo.dict"),
        "--afinn",
        &d("afinn-111.txt"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"fragments_five\""));
    for f in [
        "manifest.json",
        "ngram.bin",
        "skeletons.json",
        "cmudict.dict",
        "vectors.txt",
        "afinn.txt",
        "tags.tsv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    renga::Engine::load(&out).unwrap();
}

#[test]
fn haiku_is_reproducible_and_well_formed() {
    let args = [
        "haiku",
        "--models",
        &models(),
        "--t1",
        "frog pond",
        "--t2",
        "moon",
        "-n",
        "10",
        "--seed",
        "7",
    ];
    let a = renga(&args);
    let b = renga(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# seed 7\n"));
    let ps = poems(&text);
    assert_eq!(ps.len(), 10);
    let e = common::engine();
    for p in &ps {
        let h = renga::Haiku::from_line_texts(p);
        assert!(h.is_form_valid(&e.lexicon), "{p:?}");
    }
    assert_eq!(text.matches("\n# sense ").count(), 10);
}

#[test]
fn haiku_without_t1_is_a_usage_error() {
    let o = renga(&["haiku", "--models", &models()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(renga(&["compose"]).status.code(), Some(2));
}

#[test]
fn missing_models_exit_1_with_code() {
    let o = renga(&["haiku", "--models", "/nonexistent/models", "--t1", "moon"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[Io]"));
}

#[test]
fn oov_topic_reports_module_code() {
    let o = renga(&["haiku", "--models", &models(), "--t1", "qwzx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[NoVectorCoverage]"));
}

#[test]
fn renga_free_run() {
    let ruleset = common::data("exp2.json").display().to_string();
    let args = [
        "renga",
        "--models",
        &models(),
        "--ruleset",
        &ruleset,
        "--seed",
        "1",
    ];
    let a = renga(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, renga(&args).stdout);
    let text = stdout(&a);
    assert_eq!(poems(&text).len(), 4);
    assert_eq!(text.matches("machine, prompt").count(), 4);
    assert_eq!(text.matches("10 candidates").count(), 4);
}

#[test]
fn bad_ruleset_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    std::fs::write(&f, r#"{"initial_prompt": "moon", "links": []}"#).unwrap();
    let o = renga(&[
        "renga",
        "--models",
        &models(),
        "--ruleset",
        f.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[InvalidRuleset]"));
}

#[test]
fn interactive_renga_alternates_and_echoes_violations() {
    let ruleset = common::data("exp2.json").display().to_string();
    let mut child = Command::new(env!("CARGO_BIN_EXE_renga"))
        .args([
            "renga",
            "--models",
            &models(),
            "--ruleset",
            &ruleset,
            "--seed",
            "2",
            "--interactive",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // six syllables first, then a clean verse of words the machine never uses
    let input = "zigzag quokka gnu gnu\nzigzag quokka gnu zigzag\nzigzag quokka gnu\n\n\
                 zigzag quokka gnu\nzigzag quokka gnu zigzag\nzigzag quokka gnu\n";
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(
        text.contains("# rejected: line 1 has 6 syllables, expected 5"),
        "{text}"
    );
    assert!(text.contains("# link 2 human"), "{text}");
    assert!(text.contains("# link 3 machine"), "{text}");
    assert!(!text.contains("# link 4"), "{text}");
}

#[test]
fn score_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let poem = dir.path().join("poem.txt");
    std::fs::write(
        &poem,
        "the quiet pond sleeps\na lonely frog waits for rain\nthe night is silent\n",
    )
    .unwrap();
    let o = renga(&[
        "score",
        "--models",
        &models(),
        "--poem",
        poem.to_str().unwrap(),
        "--topic",
        "frog pond",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let keys: Vec<&str> = text.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(
        keys,
        ["syllables", "form", "sense", "topic", "emotion", "variety"]
    );
    assert!(text.starts_with("syllables 5 7 5\nform valid\n"));
}
