//! HTTP sessions for the two-sided Towers of Hanoi game. Each session records the word
//! of letters played and can show it as seen by an observer who ignores small disks.
//!
//! Sessions live in memory, optionally mirrored to one JSON snapshot per session. Requests
//! to one session are serialized by its lock; distinct sessions proceed independently.

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};
use uuid::Uuid;

pub use error::ApiError;
pub use session::{MoveOption, ProjectionView, Session, SessionView, WordView, MAX_DISKS};

type Shared = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<Uuid, Shared>>,
    snapshot_dir: Option<PathBuf>,
}

impl Store {
    pub fn in_memory() -> Store {
        Store::default()
    }

    /// A store that writes `<id>.json` into `dir` after every change and starts from the
    /// snapshots already there.
    pub fn with_snapshots(dir: impl Into<PathBuf>) -> io::Result<Store> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let s: Session = serde_json::from_str(&text)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            if !s.is_consistent() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}: history does not reproduce the state", path.display()),
                ));
            }
            sessions.insert(s.id, Arc::new(Mutex::new(s)));
        }
        Ok(Store {
            sessions: RwLock::new(sessions),
            snapshot_dir: Some(dir),
        })
    }

    pub async fn len(&self) -> usize {
        self.sessions.read().await.len()
    }

    pub async fn is_empty(&self) -> bool {
        self.len().await == 0
    }

    async fn get(&self, id: &str) -> Result<Shared, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::not_found(id))?;
        self.sessions
            .read()
            .await
            .get(&uuid)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, s: &Session) -> Result<(), ApiError> {
        let Some(dir) = &self.snapshot_dir else {
            return Ok(());
        };
        let text = serde_json::to_string_pretty(s).map_err(ApiError::internal)?;
        write_atomic(&dir.join(format!("{}.json", s.id)), &text).map_err(ApiError::internal)
    }
}

fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(tmp, path)
}

pub type AppState = Arc<Store>;

pub fn router(store: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", get(get_moves).post(post_move))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/word", get(get_word))
        .route("/sessions/{id}/projection", get(get_projection))
        .with_state(store)
}

pub async fn serve(addr: SocketAddr, store: AppState) -> io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(listener, store).await
}

pub async fn serve_on(listener: tokio::net::TcpListener, store: AppState) -> io::Result<()> {
    axum::serve(listener, router(store)).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateRequest {
    pub disks: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoveRequest {
    pub letter: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectionQuery {
    pub to: usize,
}

#[derive(Debug, Serialize)]
pub struct MovesView {
    pub state: menger_core::hanoi::HanoiState,
    pub options: Vec<MoveOption>,
}

fn body<T>(r: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    r.map(|Json(t)| t)
        .map_err(|e| ApiError::bad_request("BAD_BODY", e.body_text()))
}

async fn create_session(
    State(store): State<AppState>,
    req: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(req)?;
    let s = Session::new(req.disks)?;
    store.persist(&s)?;
    let view = s.view();
    store.sessions.write().await.insert(s.id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    let s = store.get(&id).await?;
    let s = s.lock().await;
    Ok(Json(s.view()))
}

async fn get_moves(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<MovesView>, ApiError> {
    let s = store.get(&id).await?;
    let s = s.lock().await;
    Ok(Json(MovesView {
        state: s.state.clone(),
        options: s.options()?,
    }))
}

async fn post_move(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
    req: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<SessionView>, ApiError> {
    let s = store.get(&id).await?;
    let req = body(req)?;
    let letter = session::parse_letter(&req.letter)?;
    let mut s = s.lock().await;
    s.apply(letter)?;
    store.persist(&s)?;
    Ok(Json(s.view()))
}

async fn undo(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    let s = store.get(&id).await?;
    let mut s = s.lock().await;
    s.undo()?;
    store.persist(&s)?;
    Ok(Json(s.view()))
}

async fn get_word(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<WordView>, ApiError> {
    let s = store.get(&id).await?;
    let s = s.lock().await;
    Ok(Json(s.word()))
}

async fn get_projection(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
    q: Result<Query<ProjectionQuery>, QueryRejection>,
) -> Result<Json<ProjectionView>, ApiError> {
    let s = store.get(&id).await?;
    let Query(q) = q.map_err(|e| ApiError::bad_request("BAD_QUERY", e.body_text()))?;
    let s = s.lock().await;
    Ok(Json(s.projection(q.to)?))
}
