//! Scoring candidate items by the log-likelihood a language model assigns to
//! their titles after a preference prompt.

mod backend;
pub mod golden;
mod live;
mod prompt;
mod score;

pub use backend::{content_tokens, BackendError, CachedBackend, MockBackend, ScoreBackend};
pub use live::{LiveBackend, LiveConfig};
pub use prompt::{build_prefix, build_prompt, PromptSource, PromptSpec, PromptStyle, PromptVariant};
pub use score::{rank, score_candidates, with_retries, RetryPolicy};

use crate::ids::{ItemId, RaterId};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("invalid prompt variant: {0}")]
    InvalidVariant(String),
    #[error("expected {expected} exemplars, got {got}")]
    ExemplarCount { expected: usize, got: usize },
    #[error("exemplar {rater} is incomplete: {reason}")]
    IncompleteExemplar { rater: RaterId, reason: String },
    #[error("rater {rater} has no usable {field}")]
    MissingField { rater: RaterId, field: &'static str },
    #[error("item {0} is not in the catalog")]
    UnknownItem(ItemId),
    #[error("scoring {suffix:?} failed after {attempts} attempt(s): {message}")]
    Backend {
        suffix: String,
        attempts: u32,
        message: String,
    },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Reads `item_id<TAB>genre|genre|...` lines.
pub fn load_genre_map(path: impl AsRef<Path>) -> Result<BTreeMap<ItemId, Vec<String>>, LlmError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LlmError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (n == 0 && line.starts_with("item_id\t")) {
            continue;
        }
        let (id, genres) = line.split_once('\t').ok_or_else(|| LlmError::Io {
            path: path.display().to_string(),
            message: format!("line {} has no tab", n + 1),
        })?;
        let genres = genres.split('|').filter(|g| !g.is_empty()).map(str::to_string).collect();
        out.insert(ItemId::new(id), genres);
    }
    Ok(out)
}
