//! Live sessions, each persisted as an append-only event log.
//!
//! Every mutation runs on a copy of the session; the new events are appended
//! and flushed to `<sessions>/<id>.jsonl` before the copy replaces the live
//! session, so an acknowledged change is always on disk.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::Context;
use lineup_core::fairness::FairnessReport;
use lineup_core::session::{append_event, read_event_log, replay_log};
use lineup_core::{AssemblySession, Engine, SessionParams};

pub struct Slot {
    pub session: AssemblySession,
    /// Latest fairness estimate for this session; not part of the event log.
    pub fairness: Option<FairnessReport>,
    persisted: usize,
}

pub struct SessionStore {
    dir: PathBuf,
    slots: Mutex<BTreeMap<String, Arc<Mutex<Slot>>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session {0:?}")]
    NotFound(String),
    #[error(transparent)]
    Engine(#[from] lineup_core::Error),
    #[error("cannot persist session log: {0}")]
    Persist(#[from] std::io::Error),
}

impl SessionStore {
    /// Opens `dir`, replaying every `*.jsonl` log found there.
    pub fn open(engine: &Engine, dir: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create session directory {}", dir.display()))?;
        let mut slots = BTreeMap::new();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let file = File::open(&path)?;
            let events = read_event_log(BufReader::new(file))
                .with_context(|| format!("cannot read session log {}", path.display()))?;
            let session = replay_log(engine, &events)
                .with_context(|| format!("cannot replay session log {}", path.display()))?;
            let slot = Slot {
                persisted: session.events.len(),
                session,
                fairness: None,
            };
            slots.insert(slot.session.session_id.clone(), Arc::new(Mutex::new(slot)));
        }
        if !slots.is_empty() {
            log::info!("restored {} session(s) from {}", slots.len(), dir.display());
        }
        Ok(SessionStore {
            dir,
            slots: Mutex::new(slots),
        })
    }

    fn log_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Creates a session with the next sequential id (`s000001`, ...).
    pub fn create(
        &self,
        engine: &Engine,
        suspect_id: &str,
        params: SessionParams,
    ) -> Result<AssemblySession, StoreError> {
        let mut slots = self.slots.lock().unwrap();
        let mut n = slots.len() + 1;
        let id = loop {
            let id = format!("s{n:06}");
            if !slots.contains_key(&id) && !self.log_path(&id).exists() {
                break id;
            }
            n += 1;
        };
        let session = AssemblySession::create(engine, id.clone(), suspect_id, params)?;
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.log_path(&id))?;
        persist(&mut file, &session.events)?;
        let slot = Slot {
            persisted: session.events.len(),
            session: session.clone(),
            fairness: None,
        };
        slots.insert(id, Arc::new(Mutex::new(slot)));
        Ok(session)
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, StoreError> {
        self.slots
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    /// Runs a read-only view of the session.
    pub fn read<R>(&self, id: &str, f: impl FnOnce(&Slot) -> R) -> Result<R, StoreError> {
        let slot = self.slot(id)?;
        let guard = slot.lock().unwrap();
        Ok(f(&guard))
    }

    /// Applies `f` to a copy of the session and commits it once the new
    /// events are durable. Mutations of one session are serialized.
    pub fn update<R>(
        &self,
        id: &str,
        f: impl FnOnce(&mut AssemblySession) -> lineup_core::Result<R>,
    ) -> Result<R, StoreError> {
        let slot = self.slot(id)?;
        let mut guard = slot.lock().unwrap();
        let mut draft = guard.session.clone();
        let out = f(&mut draft)?;
        let fresh = &draft.events[guard.persisted..];
        if !fresh.is_empty() {
            let mut file = OpenOptions::new().append(true).open(self.log_path(id))?;
            persist(&mut file, fresh)?;
        }
        guard.persisted = draft.events.len();
        guard.session = draft;
        Ok(out)
    }

    pub fn set_fairness(&self, id: &str, report: FairnessReport) -> Result<(), StoreError> {
        let slot = self.slot(id)?;
        slot.lock().unwrap().fairness = Some(report);
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn persist(file: &mut File, events: &[lineup_core::FeedbackEvent]) -> std::io::Result<()> {
    let mut buf = Vec::new();
    for e in events {
        append_event(&mut buf, e).map_err(std::io::Error::other)?;
    }
    file.write_all(&buf)?;
    file.sync_data()
}
