//! The `renga` command line.

use std::fs;
use std::io::{self, BufRead, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::engine::{build_model_dir, Engine, Sources};
use crate::error::Error;
use crate::evaluation::score_report;
use crate::generator::{generate_for_topic, prompt_topic, GenConfig, Haiku};
use crate::ngram::DEFAULT_ORDER;
use crate::renga::{split_prompt, Author, Link, RengaError, RengaRuleset, RengaSession};
use crate::service::{self, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(
    name = "renga",
    version,
    about = "Haiku and renga generation from corpus-derived templates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate source resources and write a model directory
    BuildModels(BuildArgs),
    /// Generate haikus for one or two topic prompts
    Haiku(HaikuArgs),
    /// Compose a renga from a ruleset file
    Renga(RengaArgs),
    /// Score a poem against a topic
    Score(ScoreArgs),
    /// Run the HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub haiku_corpus: PathBuf,
    #[arg(long)]
    pub text_corpus: PathBuf,
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long)]
    pub cmudict: PathBuf,
    #[arg(long)]
    pub afinn: PathBuf,
    /// word<TAB>TAG lexicon; the built-in one if omitted
    #[arg(long)]
    pub tags: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model directory written by build-models
    #[arg(long, env = "RENGA_MODELS", default_value = "models")]
    pub models: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuningArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda_ngram: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_topic: f64,
    #[arg(long, default_value_t = 32)]
    pub beam_width: usize,
    /// Softmax temperature for the final beam pick
    #[arg(long, default_value_t = 0.0)]
    pub dither: f64,
}

impl TuningArgs {
    fn config(&self, seed: u64, batch_size: usize) -> GenConfig {
        GenConfig {
            lambda_ngram: self.lambda_ngram,
            lambda_topic: self.lambda_topic,
            beam_width: self.beam_width,
            dither_temperature: self.dither,
            seed,
            batch_size,
            ..GenConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct HaikuArgs {
    #[arg(long)]
    pub t1: String,
    #[arg(long)]
    pub t2: Option<String>,
    #[arg(short, long, default_value_t = 10)]
    pub n: usize,
    /// Random if omitted; printed in the output either way
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub models: ModelArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct RengaArgs {
    #[arg(long)]
    pub ruleset: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Alternate machine links with verses typed on standard input
    #[arg(long)]
    pub interactive: bool,
    #[command(flatten)]
    pub models: ModelArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Three-line poem file
    #[arg(long)]
    pub poem: PathBuf,
    #[arg(long)]
    pub topic: String,
    #[command(flatten)]
    pub models: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub models: ModelArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Append-only session log, replayed on startup
    #[arg(long)]
    pub session_log: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
/// Usage errors exit 2 from inside clap.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error[{}]: {e}", e.code());
            1
        }
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<(), Error> {
    match cli.command {
        Command::BuildModels(a) => build_models(a, out),
        Command::Haiku(a) => haiku(a, out),
        Command::Renga(a) => renga(a, out),
        Command::Score(a) => score(a, out),
        Command::Serve(a) => serve(a),
    }
}

fn stdout_err(e: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn load(models: &ModelArgs) -> Result<Engine, Error> {
    Engine::load(&models.models)
}

fn build_models(a: BuildArgs, out: &mut impl Write) -> Result<(), Error> {
    let sources = Sources {
        haiku_corpus: a.haiku_corpus,
        text_corpus: a.text_corpus,
        vectors: a.vectors,
        cmudict: a.cmudict,
        afinn: a.afinn,
        tags: a.tags,
        order: a.order,
    };
    let (_, stats) = build_model_dir(&sources, &a.out)?;
    writeln!(out, "# models written to {}", a.out.display()).map_err(stdout_err)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&stats)?).map_err(stdout_err)
}

fn write_haiku(out: &mut impl Write, h: &Haiku) -> io::Result<()> {
    for line in h.line_texts() {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn haiku(a: HaikuArgs, out: &mut impl Write) -> Result<(), Error> {
    let engine = load(&a.models)?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let mut prompts = vec![split_prompt(&a.t1)];
    prompts.extend(a.t2.as_deref().map(split_prompt));
    let topic = prompt_topic(&engine.space, &prompts)?;
    let cfg = a.tuning.config(seed, a.n);
    let haikus = generate_for_topic(&topic, a.n, &engine, &cfg)?;
    let mut w = || -> io::Result<()> {
        writeln!(out, "# seed {seed}")?;
        for (i, h) in haikus.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            write_haiku(out, h)?;
            let r = score_report(&engine.ngram, &engine.space, &engine.affect, h, &topic);
            writeln!(
                out,
                "# sense {:.6} topic {:.6} emotion {} variety {:.6}",
                r.sense, r.topic, r.emotion, r.variety
            )?;
        }
        Ok(())
    };
    w().map_err(stdout_err)
}

fn write_link(
    out: &mut impl Write,
    session: &RengaSession,
    index: usize,
    link: &Link,
) -> io::Result<()> {
    if index > 0 {
        writeln!(out)?;
    }
    let prompt = session.ruleset.prompt(index).join(" ");
    match link.author {
        Author::Machine => writeln!(
            out,
            "# link {} machine, prompt \"{prompt}\", filter {}, {} candidates, {} eligible",
            index + 1,
            serde_json::to_value(session.ruleset.filter(index))
                .unwrap_or_default()
                .as_str()
                .unwrap_or(""),
            link.candidates,
            link.eligible
        )?,
        Author::Human => writeln!(out, "# link {} human, prompt \"{prompt}\"", index + 1)?,
    }
    write_haiku(out, &link.haiku)
}

fn read_ruleset(path: &Path) -> Result<RengaRuleset, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(RengaRuleset::from_json(&text)?)
}

fn renga(a: RengaArgs, out: &mut impl Write) -> Result<(), Error> {
    let ruleset = read_ruleset(&a.ruleset)?;
    let engine = load(&a.models)?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let cfg = a.tuning.config(seed, crate::service::DEFAULT_N);
    let mut session = RengaSession::new(ruleset, seed)?;
    writeln!(
        out,
        "# renga seed {seed}, {} links",
        session.ruleset.total_links()
    )
    .map_err(stdout_err)?;
    let stdin = io::stdin();
    let mut input = stdin.lock();
    while !session.is_complete() {
        let index = session.cursor();
        if a.interactive && index % 2 == 1 {
            match read_verse(&mut input, &session, index)? {
                None => break,
                Some(verse) => match session.submit_link(verse, &engine) {
                    Ok(_) => {}
                    Err(RengaError::Rejected(violations)) => {
                        for v in violations {
                            writeln!(out, "# rejected: {}", v.message).map_err(stdout_err)?;
                        }
                        out.flush().map_err(stdout_err)?;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                },
            }
        } else {
            session.next_link(&engine, &cfg)?;
        }
        write_link(out, &session, index, &session.links[index]).map_err(stdout_err)?;
        out.flush().map_err(stdout_err)?;
    }
    Ok(())
}

/// Reads three non-blank lines from `input`. `None` at end of input.
fn read_verse(
    input: &mut impl BufRead,
    session: &RengaSession,
    index: usize,
) -> Result<Option<Haiku>, Error> {
    eprintln!(
        "your link {} (prompt \"{}\"), three lines:",
        index + 1,
        session.ruleset.prompt(index).join(" ")
    );
    let mut lines = Vec::new();
    let mut buf = String::new();
    while lines.len() < 3 {
        buf.clear();
        let n = input.read_line(&mut buf).map_err(|source| Error::Io {
            path: PathBuf::from("<stdin>"),
            source,
        })?;
        if n == 0 {
            return Ok(None);
        }
        if !buf.trim().is_empty() {
            lines.push(buf.trim().to_string());
        }
    }
    Ok(Some(Haiku::from_line_texts(&lines)))
}

fn score(a: ScoreArgs, out: &mut impl Write) -> Result<(), Error> {
    let text = fs::read_to_string(&a.poem).map_err(|source| Error::Io {
        path: a.poem.clone(),
        source,
    })?;
    let engine = load(&a.models)?;
    let poem = Haiku::parse(&text);
    let topic = engine.space.topic_vector(&split_prompt(&a.topic))?;
    let r = score_report(&engine.ngram, &engine.space, &engine.affect, &poem, &topic);
    let syllables: Vec<String> = poem
        .syllables(&engine.lexicon)
        .iter()
        .map(u32::to_string)
        .collect();
    let mut w = || -> io::Result<()> {
        writeln!(out, "syllables {}", syllables.join(" "))?;
        writeln!(
            out,
            "form {}",
            if poem.is_form_valid(&engine.lexicon) {
                "valid"
            } else {
                "invalid"
            }
        )?;
        writeln!(out, "sense {:.6}", r.sense)?;
        writeln!(out, "topic {:.6}", r.topic)?;
        writeln!(out, "emotion {}", r.emotion)?;
        writeln!(out, "variety {:.6}", r.variety)
    };
    w().map_err(stdout_err)
}

fn serve(a: ServeArgs) -> Result<(), Error> {
    let engine = match load(&a.models) {
        Ok(e) => Some(Arc::new(e)),
        Err(e) => {
            eprintln!(
                "warning: models not loaded from {}: {e}",
                a.models.models.display()
            );
            None
        }
    };
    let state = Arc::new(AppState::new(
        engine,
        ServiceConfig {
            session_log: a.session_log,
            ..ServiceConfig::default()
        },
    )?);
    let addr = SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Runtime::new().map_err(|source| Error::Io {
        path: PathBuf::from("<runtime>"),
        source,
    })?;
    eprintln!("listening on http://{addr}");
    rt.block_on(service::serve(state, addr))
        .map_err(|source| Error::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })
}
