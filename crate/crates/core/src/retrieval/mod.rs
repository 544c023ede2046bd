//! Okapi BM25 over a review corpus and review-level late fusion: an item
//! scores as its best-matching review.

mod index;
mod tokenize;

pub use index::{late_fusion_rank, Bm25Index, Bm25Params};
pub use tokenize::tokenize;

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("review corpus is empty")]
    EmptyCorpus,
    #[error("review `{0}` contains no indexable terms")]
    EmptyDocument(String),
    #[error("unknown review id `{0}`")]
    UnknownReview(String),
    #[error("invalid BM25 parameters: {0}")]
    InvalidParams(String),
    #[error("index file: {0}")]
    Io(#[from] std::io::Error),
    #[error("index file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("index file version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
}
