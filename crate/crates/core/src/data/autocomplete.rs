use super::{CatalogEntry, ItemCatalog};

/// Only the most-rated titles are offered as completions.
pub const AUTOCOMPLETE_MAX_RANK: u32 = 10_000;

/// Prefix index over lowercased titles of the top-ranked catalog slice.
#[derive(Clone, Debug)]
pub struct AutocompleteIndex {
    /// (folded title, rank), sorted by folded title then rank.
    keys: Vec<(String, u32)>,
}

impl AutocompleteIndex {
    pub fn new(catalog: &ItemCatalog) -> Self {
        Self::with_max_rank(catalog, AUTOCOMPLETE_MAX_RANK)
    }

    pub fn with_max_rank(catalog: &ItemCatalog, max_rank: u32) -> Self {
        let mut keys: Vec<(String, u32)> = catalog
            .rank_band(1, max_rank)
            .iter()
            .map(|e| (fold(&e.title), e.popularity_rank))
            .collect();
        keys.sort();
        AutocompleteIndex { keys }
    }

    /// Titles starting with `prefix` (case-insensitive), most popular first.
    pub fn complete<'c>(
        &self,
        catalog: &'c ItemCatalog,
        prefix: &str,
        limit: usize,
    ) -> Vec<&'c CatalogEntry> {
        let prefix = fold(prefix);
        let start = self.keys.partition_point(|(k, _)| k.as_str() < prefix.as_str());
        let mut ranks: Vec<u32> = self.keys[start..]
            .iter()
            .take_while(|(k, _)| k.starts_with(&prefix))
            .map(|&(_, r)| r)
            .collect();
        ranks.sort_unstable();
        ranks.truncate(limit);
        ranks
            .into_iter()
            .filter_map(|r| catalog.by_rank(r))
            .collect()
    }
}

fn fold(s: &str) -> String {
    s.to_lowercase()
}

impl ItemCatalog {
    /// One-shot completion; build an [`AutocompleteIndex`] for repeated queries.
    pub fn autocomplete(&self, prefix: &str, limit: usize) -> Vec<&CatalogEntry> {
        AutocompleteIndex::new(self).complete(self, prefix, limit)
    }
}
