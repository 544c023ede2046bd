//! NDCG@10 with exponential gain over rater-specific evaluation subsets,
//! mean ± 95% interval across raters, pool statistics and report output.

mod metrics;
mod report;
mod stats;
mod subsets;

pub use metrics::{dcg_at_k, gain, ndcg_at_k, Rating};
pub use report::{format_cell, Report, ReportRow};
pub use stats::{pool_stats, PoolStats, PoolStatsRow};
pub use subsets::{evaluate, make_subsets, mean_subset_sizes, EvalSubset, Evaluation, ResultCell, SubsetKind};

use crate::ids::RaterId;

/// Cut-off used throughout the benchmark.
pub const NDCG_CUTOFF: usize = 10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("rating {0} is outside 1..=5")]
    RatingOutOfRange(u8),
    #[error("record for rater `{0}` is incomplete")]
    IncompleteRecord(RaterId),
    #[error("no ranking supplied for rater `{0}`")]
    MissingRanking(RaterId),
    #[error("ranking for rater `{rater}` does not cover item `{item}`")]
    RankingIncomplete { rater: RaterId, item: String },
}
