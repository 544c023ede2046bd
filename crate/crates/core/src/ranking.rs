use crate::ids::ItemId;
use std::cmp::Ordering;

/// Descending score, ties broken by ascending item id.
pub fn compare_scored(a: &(ItemId, f64), b: &(ItemId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Sorts scored items into a ranking (best first).
pub fn rank_by_score(scored: &[(ItemId, f64)]) -> Vec<ItemId> {
    let mut v: Vec<(ItemId, f64)> = scored.to_vec();
    v.sort_by(compare_scored);
    v.into_iter().map(|(id, _)| id).collect()
}
