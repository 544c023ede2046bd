use super::{csv_error, csv_reader, DataError, ItemCatalog};
use crate::ids::ItemId;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub item_id: ItemId,
    pub text: String,
}

#[derive(Clone, Debug, Default)]
pub struct ReviewCorpus {
    reviews: Vec<Review>,
    by_item: HashMap<ItemId, Vec<usize>>,
}

impl ReviewCorpus {
    pub fn new(reviews: Vec<Review>) -> Result<Self, DataError> {
        let mut seen = HashSet::with_capacity(reviews.len());
        let mut by_item: HashMap<ItemId, Vec<usize>> = HashMap::new();
        for (i, r) in reviews.iter().enumerate() {
            if r.text.trim().is_empty() {
                return Err(DataError::EmptyReview {
                    line: i as u64 + 1,
                    review_id: r.review_id.clone(),
                });
            }
            if !seen.insert(r.review_id.as_str()) {
                return Err(DataError::DuplicateReview(r.review_id.clone()));
            }
            by_item.entry(r.item_id.clone()).or_default().push(i);
        }
        Ok(ReviewCorpus { reviews, by_item })
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    /// Positions (into `reviews()`) of the reviews attached to `item`.
    pub fn reviews_of(&self, item: &ItemId) -> &[usize] {
        self.by_item.get(item).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Loads line-delimited JSON records `{"review_id", "item_id", "text"}`.
///
/// When `id_map` is given, review item ids are translated through it first;
/// reviews whose item is not in the map are dropped. Every resulting item must
/// exist in `catalog`.
pub fn load_reviews(
    path: impl AsRef<Path>,
    catalog: &ItemCatalog,
    id_map: Option<&HashMap<String, ItemId>>,
) -> Result<ReviewCorpus, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DataError::io(path, e))?;
    let mut reviews = Vec::new();
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let lineno = n as u64 + 1;
        let line = line.map_err(|e| DataError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut review: Review = serde_json::from_str(&line)
            .map_err(|e| DataError::parse(path, lineno, e.to_string()))?;
        if let Some(map) = id_map {
            match map.get(review.item_id.as_str()) {
                Some(mapped) => review.item_id = mapped.clone(),
                None => continue,
            }
        }
        if !catalog.contains(&review.item_id) {
            return Err(DataError::UnknownItem {
                line: lineno,
                item_id: review.item_id.0,
            });
        }
        if review.text.trim().is_empty() {
            return Err(DataError::EmptyReview {
                line: lineno,
                review_id: review.review_id,
            });
        }
        reviews.push(review);
    }
    ReviewCorpus::new(reviews)
}

/// Loads a two-column `source_id,item_id` mapping from review-corpus ids to
/// catalog ids.
pub fn load_id_map(path: impl AsRef<Path>) -> Result<HashMap<String, ItemId>, DataError> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() < 2 {
            return Err(DataError::parse(path, line, "expected source_id,item_id"));
        }
        map.insert(
            record[0].trim().to_string(),
            ItemId::new(record[1].trim()),
        );
    }
    Ok(map)
}
