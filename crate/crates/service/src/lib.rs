//! HTTP API over the outrank engine: project storage, runs and result lookup.
//!
//! Projects live in memory and, when a data directory is configured, are
//! mirrored to `<dir>/projects/<id>.json`; finished runs go to
//! `<dir>/runs/<id>.json`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use outrank_core::error::Issue;
use outrank_core::model::{InteractionDeclaration, ThresholdSpec};
use outrank_core::smaa::NodeReport;
use outrank_core::srf::CardDeck;
use outrank_core::{Error, ProblemDocument, ReportDocument, SamplingConfig};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};

/// Runs asking for more samples than this are executed in the background.
pub const SYNC_SAMPLE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Project {
    pub id: String,
    pub revision: u64,
    pub created_at: u64,
    pub updated_at: u64,
    pub document: ProblemDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub project_id: String,
    pub revision: u64,
    pub config: SamplingConfig,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
}

/// Error body: `{code, message, path}`, plus every issue for validation failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<Issue>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            code: code.into(),
            message: message.into(),
            path: None,
            issues: Vec::new(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("unknown {what} `{id}`"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Parse { path, .. } => Self {
                path: Some(path),
                ..Self::new(StatusCode::BAD_REQUEST, "parse_error", message)
            },
            Error::SchemaVersion { .. } => Self::new(StatusCode::BAD_REQUEST, "schema_version", message),
            Error::InvalidArgument(_) => Self::new(StatusCode::BAD_REQUEST, "bad_request", message),
            Error::Invalid(issues) => Self {
                path: issues.0.first().map(|i| i.path.clone()),
                issues: issues.0,
                ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", message)
            },
            Error::Incompatible(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "incompatible_elicitation", message)
            }
            Error::UnknownId(_) => Self::new(StatusCode::NOT_FOUND, "not_found", message),
            Error::Internal(_) | Error::Io(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Default)]
struct Store {
    projects: RwLock<HashMap<String, Arc<Mutex<Project>>>>,
    runs: RwLock<HashMap<String, RunRecord>>,
    next_project: AtomicU64,
    next_run: AtomicU64,
    data_dir: Option<PathBuf>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
    sync_limit: usize,
}

impl Default for AppState {
    fn default() -> Self {
        Self {
            store: Arc::default(),
            sync_limit: SYNC_SAMPLE_LIMIT,
        }
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn numeric_suffix(id: &str) -> u64 {
    id.get(1..).and_then(|s| s.parse().ok()).unwrap_or(0)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(tmp, path)
}

fn read_dir_json<T: for<'de> Deserialize<'de>>(dir: &Path) -> std::io::Result<Vec<T>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path)?;
            match serde_json::from_str(&text) {
                Ok(v) => out.push(v),
                Err(e) => tracing::warn!("skipping {}: {e}", path.display()),
            }
        }
    }
    Ok(out)
}

impl AppState {
    /// In-memory only.
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads whatever `dir` holds and persists every later change there.
    pub fn with_data_dir(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(dir.join("projects"))?;
        std::fs::create_dir_all(dir.join("runs"))?;
        let projects: Vec<Project> = read_dir_json(&dir.join("projects"))?;
        let runs: Vec<RunRecord> = read_dir_json(&dir.join("runs"))?;
        let next_project = projects.iter().map(|p| numeric_suffix(&p.id)).max().unwrap_or(0);
        let next_run = runs.iter().map(|r| numeric_suffix(&r.id)).max().unwrap_or(0);
        let store = Store {
            projects: RwLock::new(
                projects
                    .into_iter()
                    .map(|p| (p.id.clone(), Arc::new(Mutex::new(p))))
                    .collect(),
            ),
            runs: RwLock::new(runs.into_iter().map(|r| (r.id.clone(), r)).collect()),
            next_project: AtomicU64::new(next_project),
            next_run: AtomicU64::new(next_run),
            data_dir: Some(dir),
        };
        Ok(Self {
            store: Arc::new(store),
            sync_limit: SYNC_SAMPLE_LIMIT,
        })
    }

    /// Runs above `limit` samples are computed in the background.
    pub fn with_sync_limit(mut self, limit: usize) -> Self {
        self.sync_limit = limit;
        self
    }

    fn persist_project(&self, project: &Project) -> ApiResult<()> {
        if let Some(dir) = &self.store.data_dir {
            write_json(&dir.join("projects").join(format!("{}.json", project.id)), project)
                .map_err(|e| ApiError::from(Error::Io(e)))?;
        }
        Ok(())
    }

    fn persist_run(&self, run: &RunRecord) {
        if let Some(dir) = &self.store.data_dir {
            if let Err(e) = write_json(&dir.join("runs").join(format!("{}.json", run.id)), run) {
                tracing::error!("cannot persist run {}: {e}", run.id);
            }
        }
    }

    async fn project(&self, id: &str) -> ApiResult<Arc<Mutex<Project>>> {
        self.store
            .projects
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("project", id))
    }

    async fn store_run(&self, run: RunRecord) {
        self.persist_run(&run);
        self.store.runs.write().await.insert(run.id.clone(), run);
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/projects", post(create_project))
        .route("/api/projects/{id}", get(get_project))
        .route("/api/projects/{id}/elicitation", put(update_elicitation))
        .route("/api/projects/{id}/runs", post(create_run))
        .route("/api/runs/{run_id}", get(get_run))
        .route("/api/runs/{run_id}/nodes/{node_id}", get(get_node))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route") })
        .with_state(state)
}

/// Serves the API on `addr` until the process stops.
pub async fn serve(addr: std::net::SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectCreated {
    pub id: String,
    pub revision: u64,
}

fn body_text(body: &Bytes) -> ApiResult<&str> {
    std::str::from_utf8(body)
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", "body is not UTF-8"))
}

async fn create_project(State(state): State<AppState>, body: Bytes) -> ApiResult<(StatusCode, Json<ProjectCreated>)> {
    let loaded = outrank_core::parse_problem(body_text(&body)?)?;
    let n = state.store.next_project.fetch_add(1, Ordering::SeqCst) + 1;
    let ts = now();
    let project = Project {
        id: format!("p{n}"),
        revision: 1,
        created_at: ts,
        updated_at: ts,
        document: loaded.document,
    };
    state.persist_project(&project)?;
    let created = ProjectCreated {
        id: project.id.clone(),
        revision: project.revision,
    };
    state
        .store
        .projects
        .write()
        .await
        .insert(project.id.clone(), Arc::new(Mutex::new(project)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_project(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Project>> {
    let project = state.project(&id).await?;
    let project = project.lock().await.clone();
    Ok(Json(project))
}

/// Elicitation edit; omitted fields keep their current value.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElicitationUpdate {
    pub decks: Option<Vec<CardDeck>>,
    pub thresholds: Option<ThresholdSpec>,
    pub interactions: Option<Vec<InteractionDeclaration>>,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError {
            path: Some(path),
            ..ApiError::new(StatusCode::BAD_REQUEST, "parse_error", e.into_inner().to_string())
        }
    })
}

async fn update_elicitation(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<Project>> {
    let update: ElicitationUpdate = parse_body(&body)?;
    let project = state.project(&id).await?;
    let mut project = project.lock().await;
    let mut document = project.document.clone();
    if let Some(decks) = update.decks {
        document.decks = decks;
    }
    if let Some(thresholds) = update.thresholds {
        document.thresholds = thresholds;
    }
    if let Some(interactions) = update.interactions {
        document.interactions = interactions;
    }
    let loaded = document.load()?;
    let mut next = project.clone();
    next.document = loaded.document;
    next.revision += 1;
    next.updated_at = now();
    state.persist_project(&next)?;
    *project = next;
    Ok(Json(project.clone()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunCreated {
    pub run_id: String,
    pub status: RunStatus,
}

fn execute(document: &ProblemDocument, config: &SamplingConfig) -> Result<ReportDocument, Error> {
    let loaded = document.clone().load()?;
    let report = outrank_core::run_smaa(&loaded.problem, &loaded.elicitation, config)?;
    Ok(ReportDocument::new(document, report))
}

async fn create_run(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<RunCreated>)> {
    let request: RunRequest = parse_body(&body)?;
    if request.samples == 0 {
        return Err(ApiError {
            path: Some("samples".into()),
            ..ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "samples must be positive")
        });
    }
    let (document, revision) = {
        let project = state.project(&id).await?;
        let project = project.lock().await;
        (project.document.clone(), project.revision)
    };
    let config = SamplingConfig::new(request.samples, request.seed);
    let n = state.store.next_run.fetch_add(1, Ordering::SeqCst) + 1;
    let mut run = RunRecord {
        id: format!("r{n}"),
        project_id: id,
        revision,
        config,
        status: RunStatus::Pending,
        report: None,
        error: None,
    };
    let run_id = run.id.clone();

    if request.samples > state.sync_limit {
        state.store_run(run.clone()).await;
        let bg = state.clone();
        tokio::spawn(async move {
            let outcome = tokio::task::spawn_blocking(move || execute(&document, &config)).await;
            match outcome {
                Ok(Ok(report)) => {
                    run.status = RunStatus::Done;
                    run.report = Some(report);
                }
                Ok(Err(e)) => {
                    run.status = RunStatus::Failed;
                    run.error = Some(e.into());
                }
                Err(e) => {
                    run.status = RunStatus::Failed;
                    run.error = Some(Error::Internal(e.to_string()).into());
                }
            }
            tracing::info!("run {} finished: {:?}", run.id, run.status);
            bg.store_run(run).await;
        });
        return Ok((
            StatusCode::ACCEPTED,
            Json(RunCreated {
                run_id,
                status: RunStatus::Pending,
            }),
        ));
    }

    let report = tokio::task::spawn_blocking(move || execute(&document, &config))
        .await
        .map_err(|e| ApiError::from(Error::Internal(e.to_string())))??;
    run.status = RunStatus::Done;
    run.report = Some(report);
    state.store_run(run).await;
    Ok((
        StatusCode::CREATED,
        Json(RunCreated {
            run_id,
            status: RunStatus::Done,
        }),
    ))
}

async fn get_run(State(state): State<AppState>, UrlPath(run_id): UrlPath<String>) -> ApiResult<Response> {
    let run = state
        .store
        .runs
        .read()
        .await
        .get(&run_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("run", &run_id))?;
    let status = match run.status {
        RunStatus::Pending => StatusCode::ACCEPTED,
        RunStatus::Done | RunStatus::Failed => StatusCode::OK,
    };
    Ok((status, Json(run)).into_response())
}

/// Census and matrices of one node, with the alternative order they use.
#[derive(Debug, Serialize, Deserialize)]
pub struct NodeView {
    pub run_id: String,
    pub alternatives: Vec<String>,
    pub labels: BTreeMap<String, String>,
    #[serde(flatten)]
    pub node: NodeReport,
}

async fn get_node(
    State(state): State<AppState>,
    UrlPath((run_id, node_id)): UrlPath<(String, String)>,
) -> ApiResult<Json<NodeView>> {
    let runs = state.store.runs.read().await;
    let run = runs.get(&run_id).ok_or_else(|| ApiError::not_found("run", &run_id))?;
    let Some(doc) = &run.report else {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "not_ready",
            format!("run `{run_id}` has no report"),
        ));
    };
    let node = doc
        .report
        .node(&node_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("node", &node_id))?;
    let labels = match state.project(&run.project_id).await {
        Ok(p) => p
            .lock()
            .await
            .document
            .alternatives
            .iter()
            .map(|a| (a.id.clone(), a.label.clone()))
            .collect(),
        Err(_) => BTreeMap::new(),
    };
    Ok(Json(NodeView {
        run_id,
        alternatives: doc.report.alternatives.clone(),
        labels,
        node,
    }))
}
