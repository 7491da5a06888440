//! HTTP API for the assembly workbench.
//!
//! | method | path                          | body                          |
//! |--------|-------------------------------|-------------------------------|
//! | GET    | `/persons`                    |                               |
//! | GET    | `/persons/{id}`               |                               |
//! | POST   | `/sessions`                   | `{suspectId, k?, lambda?, seed?, visual?}` |
//! | GET    | `/sessions/{id}/candidates`   |                               |
//! | POST   | `/sessions/{id}/select`       | `{personId}`                  |
//! | POST   | `/sessions/{id}/deselect`     | `{personId}`                  |
//! | POST   | `/sessions/{id}/refine`       |                               |
//! | POST   | `/sessions/{id}/finalize`     |                               |
//! | POST   | `/sessions/{id}/export`       |                               |
//! | POST   | `/sessions/{id}/fairness`     | `{description?, descriptionSize?, witnesses?, seed?}` |
//!
//! In study mode every provenance field is removed from response bodies.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lineup_core::fairness::{sample_description, simulate_members, MockDescription};
use lineup_core::interleave::MergedEntry;
use lineup_core::session::{SelectedFiller, SelectionAction, SessionStatus, COMPLETE_FILLERS};
use lineup_core::{AssemblySession, Engine, PersonRecord, SessionParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ServiceConfig;
use crate::export::{export_lineup_file, LineupManifest};
use crate::store::{SessionStore, StoreError};

/// Response keys that reveal which strategy proposed a candidate.
const PROVENANCE_KEYS: [&str; 6] = [
    "provenance",
    "drawnFrom",
    "rankA",
    "rankB",
    "strategyA",
    "strategyB",
];

pub const DEFAULT_WITNESSES: u64 = 1000;
pub const MAX_WITNESSES: u64 = 1_000_000;
pub const DEFAULT_DESCRIPTION_SIZE: usize = 3;

pub struct AppState {
    pub config: ServiceConfig,
    pub engine: Engine,
    pub store: SessionStore,
}

impl AppState {
    pub fn new(config: ServiceConfig, engine: Engine) -> anyhow::Result<Self> {
        let store = SessionStore::open(&engine, config.sessions_dir())?;
        Ok(AppState {
            config,
            engine,
            store,
        })
    }

    fn reply<T: Serialize>(&self, status: StatusCode, body: &T) -> Response {
        let mut value = serde_json::to_value(body).expect("response serializes");
        if self.config.study_mode {
            redact(&mut value);
        }
        (status, Json(value)).into_response()
    }
}

pub fn redact(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !PROVENANCE_KEYS.contains(&k.as_str()));
            map.values_mut().for_each(redact);
        }
        Value::Array(items) => items.iter_mut().for_each(redact),
        _ => {}
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/persons", get(list_persons))
        .route("/persons/{id}", get(get_person))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/candidates", get(candidates))
        .route("/sessions/{id}/select", post(select))
        .route("/sessions/{id}/deselect", post(deselect))
        .route("/sessions/{id}/refine", post(refine))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/sessions/{id}/export", post(export))
        .route("/sessions/{id}/fairness", post(fairness))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(serde_json::json!({ "error": self.message })),
        )
            .into_response()
    }
}

impl From<lineup_core::Error> for ApiError {
    fn from(e: lineup_core::Error) -> Self {
        use lineup_core::Error as E;
        let status = match &e {
            E::UnknownPerson(_) => StatusCode::NOT_FOUND,
            E::Session(_) => StatusCode::CONFLICT,
            E::InvalidParameter(_) | E::MissingDescriptor(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, e.to_string()),
            StoreError::Engine(inner) => inner.into(),
            StoreError::Persist(_) => {
                log::error!("{e}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
            }
        }
    }
}

type ApiResult = Result<Response, ApiError>;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PersonView<'a> {
    person_id: &'a str,
    nationality: Option<&'a str>,
    age: Option<u32>,
    age_group: Option<&'static str>,
    features: Vec<&'a str>,
    photo_ref: &'a str,
}

impl<'a> From<&'a PersonRecord> for PersonView<'a> {
    fn from(p: &'a PersonRecord) -> Self {
        PersonView {
            person_id: &p.person_id,
            nationality: p.nationality.as_deref(),
            age: p.age,
            age_group: p.age_group().map(|g| g.label()),
            features: p.features.iter().map(String::as_str).collect(),
            photo_ref: &p.photo_ref,
        }
    }
}

async fn list_persons(State(st): State<Arc<AppState>>) -> Response {
    let persons: Vec<PersonView> = st.engine.catalog.persons().map(PersonView::from).collect();
    st.reply(
        StatusCode::OK,
        &serde_json::json!({ "seed": st.config.seed, "count": persons.len(), "persons": persons }),
    )
}

async fn get_person(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let p = st.engine.catalog.require(&id)?;
    Ok(st.reply(StatusCode::OK, &PersonView::from(p)))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CandidateView<'a> {
    #[serde(flatten)]
    entry: &'a MergedEntry,
    photo_ref: &'a str,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionView<'a> {
    session_id: &'a str,
    suspect_id: &'a str,
    /// Master seed of the session.
    seed: u64,
    round: u32,
    round_seed: u64,
    status: SessionStatus,
    strategy_a: lineup_core::Strategy,
    strategy_b: lineup_core::Strategy,
    candidates: Vec<CandidateView<'a>>,
    selected: &'a [SelectedFiller],
    fillers_needed: usize,
}

impl<'a> SessionView<'a> {
    fn of(s: &'a AssemblySession, engine: &'a Engine) -> Self {
        let current = s.current();
        let photo = |id: &str| engine.catalog.get(id).map_or("", |p| p.photo_ref.as_str());
        SessionView {
            session_id: &s.session_id,
            suspect_id: &s.suspect_id,
            seed: s.params.seed,
            round: s.current_round(),
            round_seed: current.seed,
            status: s.status,
            strategy_a: current.strategy_a,
            strategy_b: current.strategy_b,
            candidates: current
                .entries
                .iter()
                .map(|entry| CandidateView {
                    photo_ref: photo(&entry.person_id),
                    entry,
                })
                .collect(),
            selected: &s.selected,
            fillers_needed: COMPLETE_FILLERS.saturating_sub(s.selected.len()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    suspect_id: String,
    k: Option<usize>,
    lambda: Option<f64>,
    seed: Option<u64>,
    visual: Option<bool>,
}

async fn create_session(
    State(st): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> ApiResult {
    let c = &st.config;
    let params = SessionParams {
        k: req.k.unwrap_or(c.k),
        lambda: req.lambda.unwrap_or(c.lambda),
        beta: c.beta,
        seed: req.seed.unwrap_or(c.seed),
        visual: req.visual.unwrap_or(st.engine.visual.is_some()),
    };
    let s = st.store.create(&st.engine, &req.suspect_id, params)?;
    log::info!(
        "session {} created for suspect {}",
        s.session_id,
        s.suspect_id
    );
    Ok(st.reply(StatusCode::CREATED, &SessionView::of(&s, &st.engine)))
}

async fn candidates(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let body = st
        .store
        .read(&id, |slot| {
            serde_json::to_value(SessionView::of(&slot.session, &st.engine))
        })?
        .expect("view serializes");
    Ok(st.reply(StatusCode::OK, &body))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PersonRef {
    person_id: String,
}

fn mutate(
    st: &AppState,
    id: &str,
    f: impl FnOnce(&mut AssemblySession, &Engine) -> lineup_core::Result<()>,
) -> ApiResult {
    let s = st.store.update(id, |s| {
        f(s, &st.engine)?;
        Ok(s.clone())
    })?;
    Ok(st.reply(StatusCode::OK, &SessionView::of(&s, &st.engine)))
}

async fn select(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<PersonRef>,
) -> ApiResult {
    mutate(&st, &id, |s, e| {
        s.record_selection(e, &req.person_id, SelectionAction::Select)
            .map(drop)
    })
}

async fn deselect(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<PersonRef>,
) -> ApiResult {
    mutate(&st, &id, |s, e| {
        s.record_selection(e, &req.person_id, SelectionAction::Deselect)
            .map(drop)
    })
}

async fn refine(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    mutate(&st, &id, |s, e| s.refine_candidates(e).map(drop))
}

async fn finalize(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let lineup = st.store.update(&id, |s| s.finalize_lineup(&st.engine))?;
    Ok(st.reply(
        StatusCode::OK,
        &serde_json::json!({ "sessionId": id, "lineup": lineup }),
    ))
}

async fn export(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let (lineup, fairness) = st.store.read(&id, |slot| {
        (slot.session.lineup.clone(), slot.fairness.clone())
    })?;
    let lineup = lineup.ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "only finalized sessions can be exported",
        )
    })?;
    let manifest = LineupManifest::new(&lineup, &st.engine.catalog, fairness)?;
    let path = st.config.exports_dir().join(format!("{id}.json"));
    export_lineup_file(&manifest, &path)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("{e:#}")))?;
    Ok(st.reply(
        StatusCode::OK,
        &serde_json::json!({ "path": path, "manifest": manifest }),
    ))
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FairnessRequest {
    description: Option<Vec<String>>,
    description_size: Option<usize>,
    witnesses: Option<u64>,
    seed: Option<u64>,
}

/// Simulates mock witnesses on the suspect plus the currently selected fillers.
async fn fairness(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult {
    // The body is optional; an empty one means all defaults.
    let req: FairnessRequest = if body.iter().all(u8::is_ascii_whitespace) {
        FairnessRequest::default()
    } else {
        serde_json::from_slice(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid body: {e}")))?
    };
    let (suspect_id, fillers, session_seed) = st.store.read(&id, |slot| {
        let s = &slot.session;
        let fillers: Vec<String> = s.selected_ids().into_iter().map(String::from).collect();
        (s.suspect_id.clone(), fillers, s.params.seed)
    })?;
    let seed = req.seed.unwrap_or(session_seed);
    let witnesses = req.witnesses.unwrap_or(DEFAULT_WITNESSES);
    if witnesses > MAX_WITNESSES {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("at most {MAX_WITNESSES} witnesses per request"),
        ));
    }
    let catalog = &st.engine.catalog;
    let suspect = catalog.require(&suspect_id)?;
    let description = match req.description {
        Some(tokens) => MockDescription::new(tokens)?,
        None => {
            let m = req
                .description_size
                .unwrap_or_else(|| DEFAULT_DESCRIPTION_SIZE.min(suspect.tokens().len()));
            sample_description(suspect, m, seed)?
        }
    };
    let mut members = vec![suspect];
    for f in &fillers {
        members.push(catalog.require(f)?);
    }
    let report = simulate_members(
        &suspect_id,
        &members,
        &description,
        witnesses,
        seed,
        st.engine.exec,
    )?;
    st.store.set_fairness(&id, report.clone())?;
    Ok(st.reply(
        StatusCode::OK,
        &serde_json::json!({ "sessionId": id, "seed": seed, "report": report }),
    ))
}

/// Loads the data directory and serves until interrupted.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    use anyhow::Context;
    let engine = crate::data::load_engine(&config)?;
    let listen = config.listen.clone();
    let state = Arc::new(AppState::new(config, engine)?);
    let listener = tokio::net::TcpListener::bind(&listen)
        .await
        .with_context(|| format!("cannot listen on {listen}"))?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
