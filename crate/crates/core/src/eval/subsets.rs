use super::{ndcg_at_k, EvalError, Rating};
use crate::ids::{ItemId, RaterId};
use crate::protocol::StudyRecord;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubsetKind {
    Full,
    Unbiased,
    Seen,
    Unseen,
}

impl SubsetKind {
    /// Report column order.
    pub const ALL: [SubsetKind; 4] = [
        SubsetKind::Full,
        SubsetKind::Unbiased,
        SubsetKind::Seen,
        SubsetKind::Unseen,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubsetKind::Full => "full",
            SubsetKind::Unbiased => "unbiased",
            SubsetKind::Seen => "seen",
            SubsetKind::Unseen => "unseen",
        }
    }
}

impl fmt::Display for SubsetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetItem {
    pub item_id: ItemId,
    pub seen: bool,
    pub rating: Rating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSubset {
    pub kind: SubsetKind,
    /// In pool entry order.
    pub items: Vec<SubsetItem>,
}

/// Splits a complete record into Full, Unbiased, Seen and Unseen subsets
/// (in `SubsetKind::ALL` order).
pub fn make_subsets(record: &StudyRecord) -> Result<[EvalSubset; 4], EvalError> {
    if !record.is_complete() {
        return Err(EvalError::IncompleteRecord(record.rater_id.clone()));
    }
    let mut full = Vec::with_capacity(record.ratings.len());
    let mut sources = Vec::with_capacity(record.ratings.len());
    for (entry, r) in record.pool.entries.iter().zip(&record.ratings) {
        full.push(SubsetItem {
            item_id: r.item_id.clone(),
            seen: r.seen,
            rating: Rating::new(r.score)?,
        });
        sources.push(entry.source);
    }
    let pick = |kind: SubsetKind, keep: &dyn Fn(usize, &SubsetItem) -> bool| EvalSubset {
        kind,
        items: full
            .iter()
            .enumerate()
            .filter(|(i, it)| keep(*i, it))
            .map(|(_, it)| it.clone())
            .collect(),
    };
    Ok([
        pick(SubsetKind::Full, &|_, _| true),
        pick(SubsetKind::Unbiased, &|i, _| sources[i].is_random()),
        pick(SubsetKind::Seen, &|_, it| it.seen),
        pick(SubsetKind::Unseen, &|_, it| !it.seen),
    ])
}

/// Mean subset sizes over complete records, in `SubsetKind::ALL` order.
pub fn mean_subset_sizes(records: &[StudyRecord]) -> Result<[f64; 4], EvalError> {
    let mut sums = [0usize; 4];
    for r in records {
        let subsets = make_subsets(r)?;
        for (s, sub) in sums.iter_mut().zip(&subsets) {
            *s += sub.items.len();
        }
    }
    let n = records.len().max(1) as f64;
    Ok(sums.map(|s| s as f64 / n))
}

/// Mean over raters with a 95% interval half-width of `1.96 · sd / √n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultCell {
    pub mean: f64,
    pub half_width: f64,
    /// With a single rater the half-width is undefined and reported as 0.
    pub n_raters: usize,
}

impl ResultCell {
    /// Order-independent: values are sorted before accumulation.
    pub fn from_values(values: &[f64]) -> Option<ResultCell> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let half_width = if v.len() > 1 {
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            1.96 * (var / n).sqrt()
        } else {
            0.0
        };
        Some(ResultCell {
            mean,
            half_width,
            n_raters: v.len(),
        })
    }

    pub fn is_single_rater(&self) -> bool {
        self.n_raters == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub kind: SubsetKind,
    /// Sorted by rater id.
    pub per_rater: Vec<(RaterId, f64)>,
    /// Raters whose subset was empty.
    pub skipped: Vec<RaterId>,
    pub cell: Option<ResultCell>,
}

/// NDCG@k of each rater's subset ordered by that rater's ranking of the full
/// pool (relative order preserved), aggregated across raters.
pub fn evaluate(
    rankings: &BTreeMap<RaterId, Vec<ItemId>>,
    records: &[StudyRecord],
    kind: SubsetKind,
    k: usize,
) -> Result<Evaluation, EvalError> {
    let outcomes: Vec<Result<(RaterId, Option<f64>), EvalError>> = records
        .par_iter()
        .map(|record| {
            let subsets = make_subsets(record)?;
            let subset = subsets
                .into_iter()
                .find(|s| s.kind == kind)
                .expect("all kinds present");
            if subset.items.is_empty() {
                return Ok((record.rater_id.clone(), None));
            }
            let ranking = rankings
                .get(&record.rater_id)
                .ok_or_else(|| EvalError::MissingRanking(record.rater_id.clone()))?;
            Ok((record.rater_id.clone(), Some(subset_ndcg(&record.rater_id, &subset, ranking, k)?)))
        })
        .collect();

    let mut per_rater = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o? {
            (id, Some(v)) => per_rater.push((id, v)),
            (id, None) => skipped.push(id),
        }
    }
    per_rater.sort_by(|a, b| a.0.cmp(&b.0));
    skipped.sort();
    let values: Vec<f64> = per_rater.iter().map(|(_, v)| *v).collect();
    Ok(Evaluation {
        kind,
        cell: ResultCell::from_values(&values),
        per_rater,
        skipped,
    })
}

fn subset_ndcg(rater: &RaterId, subset: &EvalSubset, ranking: &[ItemId], k: usize) -> Result<f64, EvalError> {
    let members: BTreeMap<&ItemId, Rating> = subset.items.iter().map(|i| (&i.item_id, i.rating)).collect();
    let mut seen = HashSet::with_capacity(members.len());
    let ordered: Vec<Rating> = ranking
        .iter()
        .filter_map(|id| members.get(id).filter(|_| seen.insert(id)).copied())
        .collect();
    if ordered.len() != members.len() {
        let missing = members.keys().find(|id| !seen.contains(**id)).expect("some item missing");
        return Err(EvalError::RankingIncomplete {
            rater: rater.clone(),
            item: missing.to_string(),
        });
    }
    Ok(ndcg_at_k(&ordered, k))
}
