use super::{csv_error, csv_reader, DataError};
use crate::ids::ItemId;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub item_id: ItemId,
    /// Display title, kept verbatim from the source file.
    pub title: String,
    pub rating_count: u64,
    /// 1 = most rated.
    pub popularity_rank: u32,
}

/// Items ordered by popularity rank; `entries()[r - 1]` has rank `r`.
#[derive(Clone, Debug)]
pub struct ItemCatalog {
    entries: Vec<CatalogEntry>,
    index: HashMap<ItemId, usize>,
}

impl ItemCatalog {
    /// Builds a catalog from `(item_id, title, rating_count)` rows, assigning
    /// popularity ranks by descending count with ties on ascending id.
    pub fn from_rows<I>(rows: I) -> Result<Self, DataError>
    where
        I: IntoIterator<Item = (ItemId, String, u64)>,
    {
        let mut entries: Vec<CatalogEntry> = rows
            .into_iter()
            .map(|(item_id, title, rating_count)| CatalogEntry {
                item_id,
                title,
                rating_count,
                popularity_rank: 0,
            })
            .collect();
        entries.sort_by(|a, b| {
            b.rating_count
                .cmp(&a.rating_count)
                .then_with(|| a.item_id.cmp(&b.item_id))
        });
        let mut index = HashMap::with_capacity(entries.len());
        for (pos, entry) in entries.iter_mut().enumerate() {
            entry.popularity_rank = pos as u32 + 1;
            if index.insert(entry.item_id.clone(), pos).is_some() {
                return Err(DataError::DuplicateItem(entry.item_id.0.clone()));
            }
        }
        Ok(ItemCatalog { entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in popularity order.
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: &ItemId) -> Option<&CatalogEntry> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, id: &ItemId) -> bool {
        self.index.contains_key(id)
    }

    pub fn title(&self, id: &ItemId) -> Option<&str> {
        self.get(id).map(|e| e.title.as_str())
    }

    pub fn by_rank(&self, rank: u32) -> Option<&CatalogEntry> {
        if rank == 0 {
            return None;
        }
        self.entries.get(rank as usize - 1)
    }

    /// Entries whose rank lies in `lo..=hi`.
    pub fn rank_band(&self, lo: u32, hi: u32) -> &[CatalogEntry] {
        let n = self.entries.len();
        let start = (lo.max(1) as usize - 1).min(n);
        let end = (hi as usize).min(n).max(start);
        &self.entries[start..end]
    }
}

/// Loads a delimiter-separated catalog with header `item_id,title,rating_count`.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<ItemCatalog, DataError> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() < 3 {
            return Err(DataError::parse(
                path,
                line,
                format!("expected 3 columns, found {}", record.len()),
            ));
        }
        let id = record[0].trim();
        if id.is_empty() {
            return Err(DataError::parse(path, line, "empty item_id"));
        }
        let count: u64 = record[2].trim().parse().map_err(|_| {
            DataError::parse(path, line, format!("invalid rating_count `{}`", &record[2]))
        })?;
        rows.push((ItemId::new(id), record[1].to_string(), count));
    }
    ItemCatalog::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn ranks_break_ties_by_id() {
        let f = write("item_id,title,rating_count\na,Alpha,5\nb,Beta,9\nc,Gamma,9\n");
        let cat = load_catalog(f.path()).unwrap();
        let rank = |id: &str| cat.get(&ItemId::new(id)).unwrap().popularity_rank;
        assert_eq!([rank("a"), rank("b"), rank("c")], [3, 1, 2]);
    }

    #[test]
    fn empty_file_is_empty_catalog() {
        let f = write("item_id,title,rating_count\n");
        assert!(load_catalog(f.path()).unwrap().is_empty());
        let f = write("");
        assert!(load_catalog(f.path()).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_rejected() {
        let f = write("item_id,title,rating_count\na,Alpha,5\na,Again,3\n");
        assert!(matches!(
            load_catalog(f.path()),
            Err(DataError::DuplicateItem(id)) if id == "a"
        ));
    }

    #[test]
    fn malformed_row_names_line() {
        let f = write("item_id,title,rating_count\na,Alpha,5\nb,Beta,lots\n");
        match load_catalog(f.path()) {
            Err(DataError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quoted_titles_kept_verbatim() {
        let f = write("item_id,title,rating_count\n1,\"Shawshank Redemption, The (1994)\",10\n");
        let cat = load_catalog(f.path()).unwrap();
        assert_eq!(
            cat.title(&ItemId::new("1")),
            Some("Shawshank Redemption, The (1994)")
        );
    }

    proptest! {
        #[test]
        fn rank_order_matches_descending_counts(counts in prop::collection::vec(0u64..20, 0..60)) {
            let rows = counts.iter().enumerate()
                .map(|(i, &c)| (ItemId::new(format!("i{i:03}")), format!("T{i}"), c));
            let cat = ItemCatalog::from_rows(rows).unwrap();
            let ranks: Vec<u32> = cat.entries().iter().map(|e| e.popularity_rank).collect();
            prop_assert_eq!(ranks, (1..=counts.len() as u32).collect::<Vec<_>>());
            for w in cat.entries().windows(2) {
                prop_assert!(w[0].rating_count > w[1].rating_count
                    || (w[0].rating_count == w[1].rating_count && w[0].item_id < w[1].item_id));
            }
        }
    }
}
