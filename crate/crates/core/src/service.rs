//! JSON-over-HTTP front end: haiku batches, free-run rengas and interactive
//! sessions. Request and response shapes are described in `docs/api.md`.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::{Any, CorsLayer};

use crate::engine::Engine;
use crate::error::Error;
use crate::evaluation::{score_report, FilterKind, ScoreReport};
use crate::generator::{generate_for_topic, prompt_topic, GenConfig, GenerateError, Haiku};
use crate::renga::{
    run_renga, split_prompt, Author, Link, RengaError, RengaRuleset, RengaSession, Violation,
};
use crate::semantics::SemanticsError;

pub const DEFAULT_N: usize = 10;
pub const MAX_N: usize = 100;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub default_n: usize,
    /// Append-only JSON-lines log of created sessions and accepted links,
    /// replayed on startup.
    pub session_log: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            default_n: DEFAULT_N,
            session_log: None,
        }
    }
}

type SessionCell = Arc<Mutex<RengaSession>>;

pub struct AppState {
    engine: Option<Arc<Engine>>,
    sessions: RwLock<HashMap<u64, SessionCell>>,
    next_id: AtomicU64,
    log: Option<Mutex<File>>,
    default_n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum LogEntry {
    Create {
        id: u64,
        ruleset: RengaRuleset,
        seed: u64,
    },
    Link {
        id: u64,
        link: Link,
    },
}

impl AppState {
    /// `engine` is `None` when models failed to load; generation endpoints
    /// then answer 503.
    pub fn new(engine: Option<Arc<Engine>>, cfg: ServiceConfig) -> Result<Self, Error> {
        let mut sessions = HashMap::new();
        let mut log = None;
        if let Some(path) = &cfg.session_log {
            if path.exists() {
                replay(path, &mut sessions)?;
            }
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
            log = Some(Mutex::new(f));
        }
        let next_id = sessions.keys().max().map_or(1, |m| m + 1);
        Ok(AppState {
            engine,
            sessions: RwLock::new(
                sessions
                    .into_iter()
                    .map(|(k, v)| (k, Arc::new(Mutex::new(v))))
                    .collect(),
            ),
            next_id: AtomicU64::new(next_id),
            log,
            default_n: cfg.default_n,
        })
    }

    fn engine(&self) -> Result<Arc<Engine>, ApiError> {
        self.engine.clone().ok_or_else(|| {
            ApiError::new(
                StatusCode::SERVICE_UNAVAILABLE,
                "ModelsNotLoaded",
                "models are not loaded",
            )
        })
    }

    fn session(&self, id: &str) -> Result<(u64, SessionCell), ApiError> {
        let not_found = || {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "UnknownSession",
                format!("no session {id:?}"),
            )
        };
        let n: u64 = id.parse().map_err(|_| not_found())?;
        let cell = self
            .sessions
            .read()
            .expect("session table lock")
            .get(&n)
            .cloned()
            .ok_or_else(not_found)?;
        Ok((n, cell))
    }

    fn append_log(&self, entry: &LogEntry) -> Result<(), ApiError> {
        let Some(log) = &self.log else { return Ok(()) };
        let mut line = serde_json::to_string(entry).map_err(ApiError::internal)?;
        line.push('\n');
        let mut f = log.lock().expect("session log lock");
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(ApiError::internal)
    }
}

fn replay(path: &Path, sessions: &mut HashMap<u64, RengaSession>) -> Result<(), Error> {
    let f = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lines: Vec<String> = BufReader::new(f)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: LogEntry = match serde_json::from_str(line) {
            Ok(e) => e,
            // a write cut short by a crash
            Err(_) if i == last => break,
            Err(e) => return Err(e.into()),
        };
        match entry {
            LogEntry::Create { id, ruleset, seed } => {
                sessions.insert(id, RengaSession::new(ruleset, seed)?);
            }
            LogEntry::Link { id, link } => match sessions.get_mut(&id) {
                Some(s) if !s.is_complete() => s.push(link),
                _ => {
                    return Err(Error::Cache(format!(
                        "{}: line {}: no open session {id}",
                        path.display(),
                        i + 1
                    )))
                }
            },
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<Violation>>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            violations: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string())
    }
}

impl From<RengaError> for ApiError {
    fn from(e: RengaError) -> Self {
        let status = match e {
            RengaError::Generate(g) => return g.into(),
            RengaError::Semantics(s) => return s.into(),
            RengaError::Rejected(v) => {
                let mut out = ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "ConstraintViolation",
                    format!("verse rejected with {} violation(s)", v.len()),
                );
                out.violations = Some(v);
                return out;
            }
            RengaError::InvalidRuleset(_) => StatusCode::BAD_REQUEST,
            RengaError::SessionComplete => StatusCode::CONFLICT,
            RengaError::AllCandidatesViolate { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            RengaError::Evaluation(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<GenerateError> for ApiError {
    fn from(e: GenerateError) -> Self {
        match e {
            GenerateError::Semantics(s) => s.into(),
            GenerateError::InvalidConfig(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string())
            }
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()),
        }
    }
}

impl From<SemanticsError> for ApiError {
    fn from(e: SemanticsError) -> Self {
        let status = match e {
            SemanticsError::NoVectorCoverage(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods(Any)
        .allow_headers(Any);
    Router::new()
        .route("/haiku", post(post_haiku))
        .route("/renga", post(post_renga))
        .route("/session", post(post_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/link", post(post_link))
        .layer(cors)
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(ApiError::internal)?
}

#[derive(Debug, Deserialize)]
struct HaikuRequest {
    t1: Option<String>,
    t2: Option<String>,
    n: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct HaikuOut {
    pub lines: Vec<String>,
    pub syllables: Vec<u32>,
    pub scores: ScoreReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HaikuResponse {
    pub seed: u64,
    pub haikus: Vec<HaikuOut>,
}

async fn post_haiku(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<HaikuResponse> {
    let req: HaikuRequest = parse_body(&body)?;
    let t1 = req.t1.as_deref().map(split_prompt).unwrap_or_default();
    if t1.is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "MissingTopic",
            "t1 is required",
        ));
    }
    let n = req.n.unwrap_or(state.default_n);
    if n == 0 || n > MAX_N {
        return Err(ApiError::bad_request(format!(
            "n must be between 1 and {MAX_N}"
        )));
    }
    let engine = state.engine()?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let mut prompts = vec![t1];
    prompts.extend(
        req.t2
            .as_deref()
            .map(split_prompt)
            .filter(|p| !p.is_empty()),
    );
    blocking(move || {
        let topic = prompt_topic(&engine.space, &prompts)?;
        let cfg = GenConfig {
            seed,
            ..GenConfig::default()
        };
        let haikus = generate_for_topic(&topic, n, &engine, &cfg)?
            .iter()
            .map(|h| HaikuOut {
                lines: h.line_texts(),
                syllables: h.syllables(&engine.lexicon),
                scores: score_report(&engine.ngram, &engine.space, &engine.affect, h, &topic),
            })
            .collect();
        Ok(Json(HaikuResponse { seed, haikus }))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct SessionRequest {
    ruleset: RengaRuleset,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LinkView {
    pub author: Author,
    pub lines: Vec<String>,
    pub candidates: usize,
    pub eligible: usize,
}

impl From<&Link> for LinkView {
    fn from(l: &Link) -> Self {
        LinkView {
            author: l.author,
            lines: l.haiku.line_texts(),
            candidates: l.candidates,
            eligible: l.eligible,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RengaResponse {
    pub seed: u64,
    pub links: Vec<LinkView>,
}

async fn post_renga(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<RengaResponse> {
    let req: SessionRequest = parse_body(&body)?;
    req.ruleset.validate()?;
    let engine = state.engine()?;
    let seed = req.seed.unwrap_or_else(rand::random);
    blocking(move || {
        let session = run_renga(req.ruleset, seed, &engine, &GenConfig::default())?;
        Ok(Json(RengaResponse {
            seed,
            links: session.links.iter().map(LinkView::from).collect(),
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
}

async fn post_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: SessionRequest = parse_body(&body)?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let session = RengaSession::new(req.ruleset, seed)?;
    let id = state.next_id.fetch_add(1, Ordering::SeqCst);
    state.append_log(&LogEntry::Create {
        id,
        ruleset: session.ruleset.clone(),
        seed,
    })?;
    state
        .sessions
        .write()
        .expect("session table lock")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((
        StatusCode::CREATED,
        Json(SessionCreated {
            session_id: id.to_string(),
        }),
    )
        .into_response())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub status: crate::renga::SessionStatus,
    pub cursor: usize,
    pub total_links: usize,
    pub seed: u64,
    /// Prompt and filter of the next link; absent once complete.
    pub next_prompt: Option<Vec<String>>,
    pub next_filter: Option<FilterKind>,
    pub links: Vec<LinkView>,
    pub ruleset: RengaRuleset,
}

impl SessionView {
    fn new(id: u64, s: &RengaSession) -> Self {
        let open = !s.is_complete();
        SessionView {
            session_id: id.to_string(),
            status: s.status,
            cursor: s.cursor(),
            total_links: s.ruleset.total_links(),
            seed: s.seed,
            next_prompt: open.then(|| s.ruleset.prompt(s.cursor()).to_vec()),
            next_filter: open.then(|| s.ruleset.filter(s.cursor())),
            links: s.links.iter().map(LinkView::from).collect(),
            ruleset: s.ruleset.clone(),
        }
    }
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<SessionView> {
    let (n, cell) = state.session(&id)?;
    blocking(move || {
        Ok(Json(SessionView::new(
            n,
            &cell.lock().expect("session lock"),
        )))
    })
    .await
}

enum Turn {
    Machine,
    Verse(Vec<String>),
}

fn parse_turn(body: &Bytes) -> Result<Turn, ApiError> {
    let v: Value = parse_body(body)?;
    match &v {
        Value::String(s) if s == "machine" => Ok(Turn::Machine),
        Value::Object(m) => match m.get("lines") {
            Some(Value::Array(lines)) => lines
                .iter()
                .map(|l| l.as_str().map(str::to_string))
                .collect::<Option<Vec<_>>>()
                .map(Turn::Verse)
                .ok_or_else(|| ApiError::bad_request("lines must be strings")),
            _ => Err(ApiError::bad_request(
                "expected \"machine\" or {\"lines\": [...]}",
            )),
        },
        _ => Err(ApiError::bad_request(
            "expected \"machine\" or {\"lines\": [...]}",
        )),
    }
}

async fn post_link(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<SessionView> {
    let (n, cell) = state.session(&id)?;
    let turn = parse_turn(&body)?;
    let engine = state.engine()?;
    let st = state.clone();
    blocking(move || {
        let mut session = cell.lock().expect("session lock");
        let link = match turn {
            Turn::Machine => session.next_link(&engine, &GenConfig::default())?.clone(),
            Turn::Verse(lines) => session
                .submit_link(Haiku::from_line_texts(&lines), &engine)?
                .clone(),
        };
        st.append_log(&LogEntry::Link { id: n, link })?;
        Ok(Json(SessionView::new(n, &session)))
    })
    .await
}
