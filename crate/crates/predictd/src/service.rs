//! HTTP/JSON prediction sessions.
//!
//! * `POST /sessions` `{"config": "cwgi"}` creates a session.
//! * `POST /sessions/{id}/events` `{"type": "char", "value": "a"}`,
//!   `{"type": "select", "value": 1}` or `{"type": "backspace"}` applies a key.
//! * `GET /sessions/{id}` returns the full session state.
//! * `DELETE /sessions/{id}` drops it.
//! * `GET /configs` lists the available configurations.
//!
//! Every body carries `"v": 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use predict_core::combine::{CombinerConfig, Models, Pipeline, PipelineSession};
use predict_core::eval::{KeyEvent, TypingSession};
use predict_core::Error;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

pub const API_VERSION: u32 = 1;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPrediction {
    pub word: String,
    pub p: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub kp: u64,
    pub ka: u64,
    pub ksr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub v: u32,
    pub id: String,
    pub config: String,
    pub text: String,
    pub words: Vec<String>,
    pub prefix: String,
    pub offered: Vec<String>,
    pub predictions: Vec<RankedPrediction>,
    pub counters: Counters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventResponse {
    pub v: u32,
    pub predictions: Vec<RankedPrediction>,
    pub counters: Counters,
    pub text: String,
    pub prefix: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub v: Option<u32>,
    pub config: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EventRequest {
    pub v: Option<u32>,
    #[serde(flatten)]
    pub event: KeyEvent,
}

struct Session {
    config: String,
    typing: TypingSession<PipelineSession>,
    last_used: Instant,
}

impl Session {
    fn predictions(&self) -> Vec<RankedPrediction> {
        self.typing
            .predictions()
            .iter()
            .enumerate()
            .map(|(i, p)| RankedPrediction {
                word: p.word.clone(),
                p: p.p,
                rank: i + 1,
            })
            .collect()
    }

    fn counters(&self) -> Counters {
        Counters {
            kp: self.typing.kp(),
            ka: self.typing.ka(),
            ksr: self.typing.ksr(),
        }
    }

    fn snapshot(&self, id: Uuid) -> SessionSnapshot {
        let mut offered: Vec<String> = self.typing.offered().iter().cloned().collect();
        offered.sort();
        SessionSnapshot {
            v: API_VERSION,
            id: id.to_string(),
            config: self.config.clone(),
            text: self.typing.text(),
            words: self
                .typing
                .committed()
                .iter()
                .filter(|t| t.is_word())
                .map(|t| t.surface.clone())
                .collect(),
            prefix: self.typing.prefix().to_string(),
            offered,
            predictions: self.predictions(),
            counters: self.counters(),
        }
    }
}

/// Shared models, the configurations and the live sessions.
pub struct AppState {
    pipelines: BTreeMap<String, Pipeline>,
    sessions: Mutex<HashMap<Uuid, Arc<Mutex<Session>>>>,
    idle_timeout: Duration,
}

impl AppState {
    /// Configurations whose method needs a semantic space are skipped when
    /// no space is loaded.
    pub fn new(models: Arc<Models>, configs: BTreeMap<String, CombinerConfig>, idle_timeout: Duration) -> Self {
        let mut pipelines = BTreeMap::new();
        for (name, config) in configs {
            match Pipeline::new(Arc::clone(&models), config) {
                Ok(p) => {
                    pipelines.insert(name, p);
                }
                Err(e) => log::warn!("configuration `{name}` unavailable: {e}"),
            }
        }
        AppState {
            pipelines,
            sessions: Mutex::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    /// Drops sessions idle for longer than the timeout at `now`.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let before = sessions.len();
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_used) <= self.idle_timeout,
            Err(_) => true,
        });
        before - sessions.len()
    }

    fn get(&self, id: &str) -> Result<(Uuid, Arc<Mutex<Session>>), ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("unknown session `{id}`")))?;
        let sessions = self.sessions.lock().expect("session map poisoned");
        sessions
            .get(&uuid)
            .cloned()
            .map(|s| (uuid, s))
            .ok_or_else(|| ApiError::not_found(format!("unknown session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn not_found(message: String) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message,
        }
    }

    fn bad_request(message: String) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownPreset(_) => StatusCode::NOT_FOUND,
            Error::InvalidRank { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Error::InvalidArgument(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "v": API_VERSION, "error": self.message });
        (self.status, Json(body)).into_response()
    }
}

fn check_version(v: Option<u32>) -> Result<(), ApiError> {
    match v {
        Some(v) if v != API_VERSION => Err(ApiError::bad_request(format!("unsupported API version {v}"))),
        _ => Ok(()),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionSnapshot>), ApiError> {
    check_version(req.v)?;
    let pipeline = state
        .pipelines
        .get(&req.config)
        .cloned()
        .ok_or_else(|| ApiError::from(Error::UnknownPreset(req.config.clone())))?;
    let name = req.config;
    let session = blocking(move || {
        let list_size = pipeline.config().list_size;
        Session {
            config: name,
            typing: TypingSession::new(pipeline.session(), list_size),
            last_used: Instant::now(),
        }
    })
    .await?;
    let id = Uuid::new_v4();
    let snapshot = session.snapshot(id);
    state
        .sessions
        .lock()
        .expect("session map poisoned")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(snapshot)))
}

async fn key_event(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<EventRequest>,
) -> Result<Json<EventResponse>, ApiError> {
    check_version(req.v)?;
    let (_, session) = state.get(&id)?;
    let response = blocking(move || -> Result<EventResponse, ApiError> {
        let mut s = session.lock().expect("session poisoned");
        s.last_used = Instant::now();
        s.typing.apply(req.event)?;
        Ok(EventResponse {
            v: API_VERSION,
            predictions: s.predictions(),
            counters: s.counters(),
            text: s.typing.text(),
            prefix: s.typing.prefix().to_string(),
        })
    })
    .await??;
    Ok(Json(response))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let (uuid, session) = state.get(&id)?;
    let mut s = session.lock().expect("session poisoned");
    s.last_used = Instant::now();
    Ok(Json(s.snapshot(uuid)))
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let (uuid, _) = state.get(&id)?;
    state.sessions.lock().expect("session map poisoned").remove(&uuid);
    Ok(StatusCode::NO_CONTENT)
}

async fn list_configs(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let configs: Vec<&CombinerConfig> = state.pipelines.values().map(Pipeline::config).collect();
    Json(serde_json::json!({ "v": API_VERSION, "configs": configs }))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/events", post(key_event))
        .route("/configs", get(list_configs))
        .with_state(state)
}

/// Periodically evicts idle sessions.
pub fn spawn_evictor(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let period = (state.idle_timeout / 4).clamp(Duration::from_secs(1), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let n = state.evict_idle(Instant::now());
            if n > 0 {
                log::info!("evicted {n} idle sessions");
            }
        }
    })
}
