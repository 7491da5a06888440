//! Interactive lineup assembly with an append-only, replayable event log.
//!
//! A session starts with round 0: the top-k list of each enabled strategy,
//! interleaved. Selecting and deselecting fillers only records feedback;
//! [`AssemblySession::refine_candidates`] re-ranks each arm against the
//! suspect and the current fillers,
//!
//! ```text
//! score(c) = lambda * sim(c, suspect) + (1 - lambda) * mean_f sim(c, f)
//! ```
//!
//! and interleaves the new lists. With no fillers the score is exactly
//! `sim(c, suspect)`.
//!
//! Round seeds are `seed + h(fillers)` where `h` is a stable hash of the sorted
//! filler ids and `h(empty) = 0`, so a refinement with nothing selected shows
//! exactly the round-0 list again.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::interleave::{interleave_lists, MergedList, Provenance};
use crate::par::Execution;
use crate::recommenders::{
    build_cb_index, rank_pool, CbIndex, DescriptorMatrix, RankedList, SimilarityIndex, Strategy,
    DEFAULT_K,
};
use crate::{rng, Error, Result};

/// Fillers needed for a complete six-person lineup.
pub const COMPLETE_FILLERS: usize = 5;

pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Shared, read-only state every session needs.
#[derive(Clone)]
pub struct Engine {
    pub catalog: Arc<Catalog>,
    pub cb: Arc<CbIndex>,
    pub visual: Option<Arc<DescriptorMatrix>>,
    pub exec: Execution,
    clock: Arc<dyn Clock>,
}

impl Engine {
    pub fn new(catalog: Catalog, visual: Option<DescriptorMatrix>) -> Self {
        let cb = build_cb_index(&catalog);
        Engine {
            catalog: Arc::new(catalog),
            cb: Arc::new(cb),
            visual: visual.map(Arc::new),
            exec: Execution::default(),
            clock: Arc::new(SystemClock),
        }
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn now_ms(&self) -> u64 {
        self.clock.now_ms()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionParams {
    pub k: usize,
    pub lambda: f64,
    pub beta: f64,
    pub seed: u64,
    /// Whether the visual arm takes part; it requires descriptors.
    pub visual: bool,
}

impl Default for SessionParams {
    fn default() -> Self {
        SessionParams {
            k: DEFAULT_K,
            lambda: 0.5,
            beta: 0.5,
            seed: 0,
            visual: true,
        }
    }
}

impl SessionParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        for (name, v) in [("lambda", self.lambda), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SessionStatus {
    Draft,
    Finalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SelectionAction {
    Select,
    Deselect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Completeness {
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "camelCase",
    rename_all_fields = "camelCase"
)]
pub enum EventKind {
    SessionCreated {
        session_id: String,
        suspect_id: String,
        params: SessionParams,
    },
    CandidatesShown {
        round: u32,
        seed: u64,
        person_ids: Vec<String>,
    },
    FillerSelected {
        person_id: String,
        round: u32,
        provenance: Provenance,
    },
    FillerDeselected {
        person_id: String,
        round: u32,
        provenance: Provenance,
    },
    Finalized {
        fillers: Vec<String>,
        completeness: Completeness,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeedbackEvent {
    pub seq: u64,
    pub timestamp_ms: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectedFiller {
    pub person_id: String,
    /// Round in which it was selected.
    pub round: u32,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineupRecord {
    pub suspect_id: String,
    pub fillers: Vec<SelectedFiller>,
    pub completeness: Completeness,
}

impl LineupRecord {
    /// Suspect first, then fillers in selection order.
    pub fn member_ids(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.suspect_id.as_str())
            .chain(self.fillers.iter().map(|f| f.person_id.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySession {
    pub session_id: String,
    pub suspect_id: String,
    pub params: SessionParams,
    /// One merged list per round; the last is what is currently shown.
    pub rounds: Vec<MergedList>,
    pub selected: Vec<SelectedFiller>,
    pub events: Vec<FeedbackEvent>,
    pub status: SessionStatus,
    pub lineup: Option<LineupRecord>,
}

/// Seed for a round shown while `fillers` are selected.
pub fn round_seed(master: u64, fillers: &[SelectedFiller]) -> u64 {
    if fillers.is_empty() {
        return master;
    }
    let sorted: BTreeSet<&str> = fillers.iter().map(|f| f.person_id.as_str()).collect();
    master.wrapping_add(rng::stable_hash(sorted))
}

/// Re-ranks one arm against the suspect and the selected fillers.
///
/// The suspect and every filler in the pool are excluded. Fillers outside the
/// pool (e.g. without a descriptor) do not contribute to the mean.
pub fn rank_refined<I: SimilarityIndex + ?Sized>(
    index: &I,
    suspect_id: &str,
    fillers: &[&str],
    lambda: f64,
    k: usize,
    exec: Execution,
) -> Result<RankedList> {
    let q = index.query_position(suspect_id)?;
    let filler_pos: Vec<usize> = fillers.iter().filter_map(|f| index.position(f)).collect();
    let mut exclude: HashSet<usize> = filler_pos.iter().copied().collect();
    exclude.insert(q);
    if filler_pos.is_empty() {
        return Ok(rank_pool(index, suspect_id, k, &exclude, exec, |c| {
            index.similarity_at(q, c)
        }));
    }
    let m = filler_pos.len() as f64;
    Ok(rank_pool(index, suspect_id, k, &exclude, exec, |c| {
        let to_fillers: f64 = filler_pos.iter().map(|&f| index.similarity_at(c, f)).sum();
        lambda * index.similarity_at(q, c) + (1.0 - lambda) * (to_fillers / m)
    }))
}

fn session_err(msg: impl Into<String>) -> Error {
    Error::Session(msg.into())
}

impl AssemblySession {
    /// Opens a draft session and shows round 0.
    pub fn create(
        engine: &Engine,
        session_id: impl Into<String>,
        suspect_id: &str,
        params: SessionParams,
    ) -> Result<Self> {
        let t = engine.now_ms();
        let mut s = Self::init(engine, session_id.into(), suspect_id, params, t)?;
        let t = s.next_timestamp(engine.now_ms());
        s.show_round(engine, t)?;
        Ok(s)
    }

    fn init(
        engine: &Engine,
        session_id: String,
        suspect_id: &str,
        params: SessionParams,
        timestamp_ms: u64,
    ) -> Result<Self> {
        params.validate()?;
        engine.catalog.require(suspect_id)?;
        if params.visual {
            let visual = engine.visual.as_ref().ok_or_else(|| {
                Error::InvalidParameter("visual arm requested but no descriptors are loaded".into())
            })?;
            visual.query_position(suspect_id)?;
        }
        let mut s = AssemblySession {
            session_id: session_id.clone(),
            suspect_id: suspect_id.to_string(),
            params: params.clone(),
            rounds: Vec::new(),
            selected: Vec::new(),
            events: Vec::new(),
            status: SessionStatus::Draft,
            lineup: None,
        };
        s.push_event(
            timestamp_ms,
            EventKind::SessionCreated {
                session_id,
                suspect_id: suspect_id.to_string(),
                params,
            },
        );
        Ok(s)
    }

    pub fn current(&self) -> &MergedList {
        self.rounds.last().expect("session always has round 0")
    }

    pub fn current_round(&self) -> u32 {
        self.rounds.len().saturating_sub(1) as u32
    }

    pub fn is_finalized(&self) -> bool {
        self.status == SessionStatus::Finalized
    }

    pub fn selected_ids(&self) -> Vec<&str> {
        self.selected.iter().map(|f| f.person_id.as_str()).collect()
    }

    fn next_timestamp(&self, now: u64) -> u64 {
        match self.events.last() {
            Some(e) if now <= e.timestamp_ms => e.timestamp_ms + 1,
            _ => now,
        }
    }

    fn push_event(&mut self, timestamp_ms: u64, kind: EventKind) -> &FeedbackEvent {
        let seq = self.events.len() as u64;
        self.events.push(FeedbackEvent {
            seq,
            timestamp_ms,
            kind,
        });
        self.events.last().unwrap()
    }

    fn ensure_draft(&self) -> Result<()> {
        if self.is_finalized() {
            Err(session_err(format!(
                "session {} is finalized",
                self.session_id
            )))
        } else {
            Ok(())
        }
    }

    /// The per-arm lists for the current selection state.
    pub fn arm_lists(&self, engine: &Engine) -> Result<(RankedList, RankedList)> {
        let fillers = self.selected_ids();
        let p = &self.params;
        let cb = rank_refined(
            engine.cb.as_ref(),
            &self.suspect_id,
            &fillers,
            p.lambda,
            p.k,
            engine.exec,
        )?;
        let visual = match (&engine.visual, p.visual) {
            (Some(v), true) => rank_refined(
                v.as_ref(),
                &self.suspect_id,
                &fillers,
                p.lambda,
                p.k,
                engine.exec,
            )?,
            (None, true) => {
                return Err(Error::InvalidParameter(
                    "visual arm requested but no descriptors are loaded".into(),
                ))
            }
            (_, false) => RankedList {
                strategy: Strategy::Visual,
                suspect_id: self.suspect_id.clone(),
                entries: Vec::new(),
            },
        };
        Ok((cb, visual))
    }

    fn show_round(&mut self, engine: &Engine, timestamp_ms: u64) -> Result<&MergedList> {
        let (cb, visual) = self.arm_lists(engine)?;
        let seed = round_seed(self.params.seed, &self.selected);
        let merged = interleave_lists(&cb, &visual, seed)?;
        let round = self.rounds.len() as u32;
        self.push_event(
            timestamp_ms,
            EventKind::CandidatesShown {
                round,
                seed,
                person_ids: merged.ids().map(str::to_string).collect(),
            },
        );
        self.rounds.push(merged);
        Ok(self.rounds.last().unwrap())
    }

    /// Re-ranks against the suspect and current fillers and shows a new round.
    pub fn refine_candidates(&mut self, engine: &Engine) -> Result<&MergedList> {
        self.ensure_draft()?;
        let t = self.next_timestamp(engine.now_ms());
        self.show_round(engine, t)
    }

    pub fn record_selection(
        &mut self,
        engine: &Engine,
        person_id: &str,
        action: SelectionAction,
    ) -> Result<&FeedbackEvent> {
        let t = self.next_timestamp(engine.now_ms());
        self.apply_selection(person_id, action, t)
    }

    fn apply_selection(
        &mut self,
        person_id: &str,
        action: SelectionAction,
        timestamp_ms: u64,
    ) -> Result<&FeedbackEvent> {
        self.ensure_draft()?;
        if person_id == self.suspect_id {
            return Err(session_err("the suspect cannot be a filler"));
        }
        let round = self.current_round();
        let already = self.selected.iter().position(|f| f.person_id == person_id);
        match action {
            SelectionAction::Select => {
                if already.is_some() {
                    return Err(session_err(format!("{person_id:?} is already selected")));
                }
                let entry = self.current().get(person_id).ok_or_else(|| {
                    session_err(format!("{person_id:?} is not among the shown candidates"))
                })?;
                let provenance = entry.provenance;
                self.selected.push(SelectedFiller {
                    person_id: person_id.to_string(),
                    round,
                    provenance,
                });
                Ok(self.push_event(
                    timestamp_ms,
                    EventKind::FillerSelected {
                        person_id: person_id.to_string(),
                        round,
                        provenance,
                    },
                ))
            }
            SelectionAction::Deselect => {
                let i =
                    already.ok_or_else(|| session_err(format!("{person_id:?} is not selected")))?;
                let removed = self.selected.remove(i);
                Ok(self.push_event(
                    timestamp_ms,
                    EventKind::FillerDeselected {
                        person_id: removed.person_id,
                        round,
                        provenance: removed.provenance,
                    },
                ))
            }
        }
    }

    /// Freezes the session and returns the lineup.
    pub fn finalize_lineup(&mut self, engine: &Engine) -> Result<LineupRecord> {
        let t = self.next_timestamp(engine.now_ms());
        self.apply_finalize(t)
    }

    fn apply_finalize(&mut self, timestamp_ms: u64) -> Result<LineupRecord> {
        self.ensure_draft()?;
        if self.selected.is_empty() {
            return Err(session_err("a lineup needs at least one filler"));
        }
        let completeness = if self.selected.len() >= COMPLETE_FILLERS {
            Completeness::Complete
        } else {
            Completeness::Incomplete
        };
        let record = LineupRecord {
            suspect_id: self.suspect_id.clone(),
            fillers: self.selected.clone(),
            completeness,
        };
        self.status = SessionStatus::Finalized;
        self.push_event(
            timestamp_ms,
            EventKind::Finalized {
                fillers: self.selected_ids().iter().map(|s| s.to_string()).collect(),
                completeness,
            },
        );
        self.lineup = Some(record.clone());
        Ok(record)
    }
}

/// Rebuilds a session from its event log.
///
/// Every event is re-executed against `engine` and the regenerated event must
/// equal the logged one; candidate lists are recomputed, not read back.
pub fn replay_log(engine: &Engine, events: &[FeedbackEvent]) -> Result<AssemblySession> {
    let fail = |index: usize, reason: String| Error::EventLog { index, reason };
    let mut session: Option<AssemblySession> = None;
    for (i, ev) in events.iter().enumerate() {
        if ev.seq != i as u64 {
            return Err(fail(i, format!("expected seq {i}, found {}", ev.seq)));
        }
        if i > 0 && ev.timestamp_ms <= events[i - 1].timestamp_ms {
            return Err(fail(i, "timestamp not strictly increasing".into()));
        }
        let t = ev.timestamp_ms;
        match (&mut session, &ev.kind) {
            (
                None,
                EventKind::SessionCreated {
                    session_id,
                    suspect_id,
                    params,
                },
            ) => {
                session = Some(
                    AssemblySession::init(
                        engine,
                        session_id.clone(),
                        suspect_id,
                        params.clone(),
                        t,
                    )
                    .map_err(|e| fail(i, e.to_string()))?,
                );
            }
            (None, _) => return Err(fail(i, "log must start with sessionCreated".into())),
            (Some(_), EventKind::SessionCreated { .. }) => {
                return Err(fail(i, "duplicate sessionCreated".into()))
            }
            (Some(s), EventKind::CandidatesShown { .. }) => {
                s.ensure_draft().map_err(|e| fail(i, e.to_string()))?;
                s.show_round(engine, t)
                    .map_err(|e| fail(i, e.to_string()))?;
            }
            (Some(s), EventKind::FillerSelected { person_id, .. })
            | (Some(s), EventKind::FillerDeselected { person_id, .. }) => {
                if s.rounds.is_empty() {
                    return Err(fail(i, "selection before any candidatesShown".into()));
                }
                let action = if matches!(ev.kind, EventKind::FillerSelected { .. }) {
                    SelectionAction::Select
                } else {
                    SelectionAction::Deselect
                };
                s.apply_selection(person_id, action, t)
                    .map_err(|e| fail(i, e.to_string()))?;
            }
            (Some(s), EventKind::Finalized { .. }) => {
                s.apply_finalize(t).map_err(|e| fail(i, e.to_string()))?;
            }
        }
        let regenerated = session.as_ref().and_then(|s| s.events.last());
        if regenerated != Some(ev) {
            return Err(fail(
                i,
                "event does not match the recomputed session state".into(),
            ));
        }
    }
    let s = session.ok_or_else(|| fail(0, "empty event log".into()))?;
    if s.rounds.is_empty() {
        return Err(fail(
            events.len(),
            "log ends before round 0 was shown".into(),
        ));
    }
    Ok(s)
}

pub fn write_event_log<W: Write>(mut out: W, events: &[FeedbackEvent]) -> Result<()> {
    for e in events {
        append_event(&mut out, e)?;
    }
    Ok(())
}

/// Writes one event as a single line.
pub fn append_event<W: Write>(mut out: W, event: &FeedbackEvent) -> Result<()> {
    serde_json::to_writer(&mut out, event).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_event_log<R: BufRead>(source: R) -> Result<Vec<FeedbackEvent>> {
    let mut events = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(|e| Error::malformed(i + 1, e))?);
    }
    Ok(events)
}
