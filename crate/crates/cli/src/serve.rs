//! HTTP front end of the study protocol. Responses never reveal which pool
//! an item came from.

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use langrec_core::ids::{ItemId, RaterId};
use langrec_core::protocol::{Polarity, PoolError, ProtocolError, SamplePool, Session, Stage, Step, StudyStore};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const MAX_AUTOCOMPLETE: usize = 50;

pub struct ApiError(ProtocolError);

impl From<ProtocolError> for ApiError {
    fn from(e: ProtocolError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        use ProtocolError as P;
        let status = match &self.0 {
            P::UnknownSession(_) => StatusCode::NOT_FOUND,
            P::DuplicateSession(_) | P::OutOfOrder { .. } => StatusCode::CONFLICT,
            P::DescriptionTooShort { .. }
            | P::WrongItemCount(_)
            | P::DuplicateItem(_)
            | P::UnknownItem(_)
            | P::Overlap(_)
            | P::NotInPool(_)
            | P::ScoreOutOfRange(_) => StatusCode::UNPROCESSABLE_ENTITY,
            P::Pool(PoolError::IncompleteProfile(_)) => StatusCode::CONFLICT,
            P::Pool(_) | P::Io { .. } | P::Format { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(serde_json::json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Serialize, Deserialize)]
pub struct SessionView {
    pub rater_id: RaterId,
    pub step: Step,
    pub rated: usize,
    pub complete: bool,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        SessionView {
            rater_id: s.rater_id().clone(),
            step: s.step(),
            rated: s.n_rated(),
            complete: s.is_complete(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct CreateSession {
    pub rater_id: RaterId,
}

#[derive(Serialize, Deserialize)]
pub struct DescriptionBody {
    pub polarity: Polarity,
    pub stage: Stage,
    pub text: String,
}

#[derive(Serialize, Deserialize)]
pub struct ItemsBody {
    pub polarity: Polarity,
    pub items: Vec<ItemId>,
}

#[derive(Serialize, Deserialize)]
pub struct RatingBody {
    pub item_id: ItemId,
    pub seen: bool,
    pub score: u8,
}

#[derive(Serialize, Deserialize)]
pub struct RatingView {
    pub rated: usize,
    pub total: usize,
    pub complete: bool,
}

/// A pool item as shown to the rater.
#[derive(Serialize, Deserialize)]
pub struct PoolItemView {
    pub display_position: u32,
    pub item_id: ItemId,
    pub title: String,
}

#[derive(Deserialize)]
pub struct AutocompleteQuery {
    pub prefix: String,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    10
}

#[derive(Serialize, Deserialize)]
pub struct Suggestion {
    pub item_id: ItemId,
    pub title: String,
    pub popularity_rank: u32,
}

pub fn router(store: Arc<StudyStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_state))
        .route("/sessions/{id}/descriptions", post(submit_description))
        .route("/sessions/{id}/items", post(submit_items))
        .route("/sessions/{id}/pool", post(assemble_pool).get(fetch_pool))
        .route("/sessions/{id}/ratings", post(submit_rating))
        .route("/autocomplete", get(autocomplete))
        .route("/export", get(export))
        .route("/export/records.jsonl", get(export_jsonl))
        .with_state(store)
}

fn blind(store: &StudyStore, pool: &SamplePool) -> Vec<PoolItemView> {
    pool.displayed()
        .into_iter()
        .map(|e| PoolItemView {
            display_position: e.display_position,
            item_id: e.item_id.clone(),
            title: store.catalog().title(&e.item_id).unwrap_or_default().to_string(),
        })
        .collect()
}

async fn create_session(
    State(store): State<Arc<StudyStore>>,
    Json(body): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    store.create_session(body.rater_id.clone())?;
    let s = store.snapshot(&body.rater_id)?;
    Ok((StatusCode::CREATED, Json(SessionView::from(&s))))
}

async fn session_state(State(store): State<Arc<StudyStore>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let s = store.snapshot(&RaterId::new(id))?;
    Ok(Json(SessionView::from(&s)))
}

async fn submit_description(
    State(store): State<Arc<StudyStore>>,
    Path(id): Path<String>,
    Json(body): Json<DescriptionBody>,
) -> ApiResult<SessionView> {
    let id = RaterId::new(id);
    store.submit_description(&id, body.polarity, body.stage, &body.text)?;
    Ok(Json(SessionView::from(&store.snapshot(&id)?)))
}

async fn submit_items(
    State(store): State<Arc<StudyStore>>,
    Path(id): Path<String>,
    Json(body): Json<ItemsBody>,
) -> ApiResult<SessionView> {
    let id = RaterId::new(id);
    store.submit_items(&id, body.polarity, &body.items)?;
    Ok(Json(SessionView::from(&store.snapshot(&id)?)))
}

async fn assemble_pool(State(store): State<Arc<StudyStore>>, Path(id): Path<String>) -> ApiResult<Vec<PoolItemView>> {
    let id = RaterId::new(id);
    let s = store.clone();
    let pool = tokio::task::spawn_blocking(move || s.assemble_pool(&id))
        .await
        .expect("pool assembly does not panic")?;
    Ok(Json(blind(&store, &pool)))
}

async fn fetch_pool(State(store): State<Arc<StudyStore>>, Path(id): Path<String>) -> ApiResult<Vec<PoolItemView>> {
    let pool = store.pool(&RaterId::new(id))?.unwrap_or_default();
    Ok(Json(blind(&store, &pool)))
}

async fn submit_rating(
    State(store): State<Arc<StudyStore>>,
    Path(id): Path<String>,
    Json(body): Json<RatingBody>,
) -> ApiResult<RatingView> {
    let id = RaterId::new(id);
    let rated = store.submit_rating(&id, &body.item_id, body.seen, body.score)?;
    let s = store.snapshot(&id)?;
    Ok(Json(RatingView {
        rated,
        total: s.pool().map(|p| p.entries.len()).unwrap_or(0),
        complete: s.is_complete(),
    }))
}

async fn autocomplete(
    State(store): State<Arc<StudyStore>>,
    Query(q): Query<AutocompleteQuery>,
) -> Json<Vec<Suggestion>> {
    let out = store
        .autocomplete(&q.prefix, q.limit.min(MAX_AUTOCOMPLETE))
        .into_iter()
        .map(|e| Suggestion {
            item_id: e.item_id.clone(),
            title: e.title.clone(),
            popularity_rank: e.popularity_rank,
        })
        .collect();
    Json(out)
}

async fn export(State(store): State<Arc<StudyStore>>) -> Json<langrec_core::protocol::Export> {
    Json(store.export())
}

async fn export_jsonl(State(store): State<Arc<StudyStore>>) -> impl IntoResponse {
    let mut body = String::new();
    for line in store.export().lines {
        body.push_str(&serde_json::to_string(&line).expect("records serialize"));
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body)
}

/// Serves until the future `shutdown` resolves.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    store: Arc<StudyStore>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store)).with_graceful_shutdown(shutdown).await
}
