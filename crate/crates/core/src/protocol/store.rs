use super::pool::PoolAssembler;
use super::session::{ProtocolError, Session};
use super::{Polarity, RaterProfile, RecordLine, SamplePool, Stage};
use crate::data::{AutocompleteIndex, CatalogEntry, ItemCatalog};
use crate::ids::{derive_seed, ItemId, RaterId};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

/// Source of step timestamps, in milliseconds since the Unix epoch.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Deterministic clock that advances by a fixed step on every reading.
#[derive(Debug)]
pub struct FixedClock {
    next: AtomicU64,
    step: u64,
}

impl FixedClock {
    pub fn new(start: u64, step: u64) -> Self {
        FixedClock {
            next: AtomicU64::new(start),
            step,
        }
    }
}

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.next.fetch_add(self.step, Ordering::Relaxed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    Incomplete,
    UniformRatings,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excluded {
    pub rater_id: RaterId,
    pub reason: ExclusionReason,
}

/// Result of an export: kept records plus the raters that were filtered out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Export {
    pub lines: Vec<RecordLine>,
    pub excluded: Vec<Excluded>,
}

/// Concurrent session store. The map lock is only held to look sessions up;
/// each session has its own mutex, so different raters never contend.
pub struct StudyStore {
    sessions: RwLock<BTreeMap<RaterId, Arc<Mutex<Session>>>>,
    catalog: Arc<ItemCatalog>,
    autocomplete: AutocompleteIndex,
    assembler: Arc<PoolAssembler>,
    clock: Arc<dyn Clock>,
    base_seed: u64,
}

impl StudyStore {
    pub fn new(assembler: Arc<PoolAssembler>, clock: Arc<dyn Clock>, base_seed: u64) -> Self {
        let catalog = assembler.catalog().clone();
        StudyStore {
            sessions: RwLock::new(BTreeMap::new()),
            autocomplete: AutocompleteIndex::new(&catalog),
            catalog,
            assembler,
            clock,
            base_seed,
        }
    }

    pub fn catalog(&self) -> &ItemCatalog {
        &self.catalog
    }

    /// Pool seed for a rater: a function of the base seed and the id only,
    /// so pools do not depend on session creation order.
    pub fn pool_seed(&self, rater: &RaterId) -> u64 {
        derive_seed(self.base_seed, rater.as_str())
    }

    pub fn autocomplete(&self, prefix: &str, limit: usize) -> Vec<&CatalogEntry> {
        self.autocomplete.complete(&self.catalog, prefix, limit)
    }

    pub fn create_session(&self, rater: RaterId) -> Result<RaterProfile, ProtocolError> {
        let mut map = self.sessions.write();
        if map.contains_key(&rater) {
            return Err(ProtocolError::DuplicateSession(rater));
        }
        let session = Session::new(rater.clone());
        let profile = session.profile().clone();
        map.insert(rater, Arc::new(Mutex::new(session)));
        Ok(profile)
    }

    fn session(&self, rater: &RaterId) -> Result<Arc<Mutex<Session>>, ProtocolError> {
        self.sessions
            .read()
            .get(rater)
            .cloned()
            .ok_or_else(|| ProtocolError::UnknownSession(rater.clone()))
    }

    /// Runs `f` with exclusive access to one session.
    pub fn with_session<T>(
        &self,
        rater: &RaterId,
        f: impl FnOnce(&mut Session) -> Result<T, ProtocolError>,
    ) -> Result<T, ProtocolError> {
        let s = self.session(rater)?;
        let mut guard = s.lock();
        f(&mut guard)
    }

    pub fn snapshot(&self, rater: &RaterId) -> Result<Session, ProtocolError> {
        self.with_session(rater, |s| Ok(s.clone()))
    }

    pub fn submit_description(
        &self,
        rater: &RaterId,
        polarity: Polarity,
        stage: Stage,
        text: &str,
    ) -> Result<RaterProfile, ProtocolError> {
        let now = self.clock.now_ms();
        self.with_session(rater, |s| s.submit_description(polarity, stage, text, now).cloned())
    }

    pub fn submit_items(&self, rater: &RaterId, polarity: Polarity, items: &[ItemId]) -> Result<RaterProfile, ProtocolError> {
        let now = self.clock.now_ms();
        self.with_session(rater, |s| s.submit_items(polarity, items, &self.catalog, now).cloned())
    }

    pub fn assemble_pool(&self, rater: &RaterId) -> Result<SamplePool, ProtocolError> {
        let now = self.clock.now_ms();
        let seed = self.pool_seed(rater);
        self.with_session(rater, |s| s.assemble_pool(&self.assembler, seed, now).cloned())
    }

    pub fn pool(&self, rater: &RaterId) -> Result<Option<SamplePool>, ProtocolError> {
        self.with_session(rater, |s| Ok(s.pool().cloned()))
    }

    /// Returns the number of distinct pool items rated so far.
    pub fn submit_rating(&self, rater: &RaterId, item: &ItemId, seen: bool, score: u8) -> Result<usize, ProtocolError> {
        let now = self.clock.now_ms();
        self.with_session(rater, |s| s.submit_rating(item, seen, score, now))
    }

    pub fn rater_ids(&self) -> Vec<RaterId> {
        self.sessions.read().keys().cloned().collect()
    }

    /// Completed, non-uniform records in rater-id order.
    pub fn export(&self) -> Export {
        let sessions: Vec<(RaterId, Arc<Mutex<Session>>)> = self
            .sessions
            .read()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut out = Export::default();
        for (rater_id, s) in sessions {
            let s = s.lock();
            let record = s.record().filter(|r| s.is_complete() && r.is_complete());
            match record {
                None => out.excluded.push(Excluded {
                    rater_id,
                    reason: ExclusionReason::Incomplete,
                }),
                Some(r) if r.is_uniform() => out.excluded.push(Excluded {
                    rater_id,
                    reason: ExclusionReason::UniformRatings,
                }),
                Some(record) => out.lines.push(RecordLine {
                    profile: s.profile().clone(),
                    record,
                }),
            }
        }
        out
    }
}

/// Writes one JSON record per line.
pub fn write_records(path: impl AsRef<Path>, lines: &[RecordLine]) -> Result<(), ProtocolError> {
    let path = path.as_ref();
    let io = |source| ProtocolError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for line in lines {
        serde_json::to_writer(&mut w, line).map_err(|e| io(e.into()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RecordLine>, ProtocolError> {
    let path = path.as_ref();
    let io = |source| ProtocolError::Io {
        path: path.display().to_string(),
        source,
    };
    let r = BufReader::new(std::fs::File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RecordLine = serde_json::from_str(&line).map_err(|e| ProtocolError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}
