use super::{csv_error, csv_reader, DataError, ItemCatalog};
use crate::ids::ItemId;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub user_id: String,
    pub item_id: ItemId,
    pub rating: Option<f32>,
    pub timestamp: Option<i64>,
}

/// Implicit-feedback user × item matrix in row-compressed form.
///
/// Every stored cell has value 1; the original rating is kept only for
/// reference. Columns are the items that occur in at least one interaction,
/// sorted by id.
#[derive(Clone, Debug)]
pub struct InteractionMatrix {
    users: Vec<String>,
    items: Vec<ItemId>,
    item_index: HashMap<ItemId, usize>,
    /// Sorted, deduplicated column indices per user.
    rows: Vec<Vec<u32>>,
    ratings: Vec<Vec<Option<f32>>>,
}

impl InteractionMatrix {
    /// Builds the matrix from raw interactions. Duplicate `(user, item)`
    /// pairs collapse into one cell; the last occurrence's rating wins.
    pub fn from_interactions<I>(interactions: I) -> Self
    where
        I: IntoIterator<Item = Interaction>,
    {
        let mut by_user: BTreeMap<String, BTreeMap<ItemId, Option<f32>>> = BTreeMap::new();
        for it in interactions {
            by_user
                .entry(it.user_id)
                .or_default()
                .insert(it.item_id, it.rating);
        }
        let mut items: Vec<ItemId> = by_user
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect();
        items.sort();
        items.dedup();
        let item_index: HashMap<ItemId, usize> = items
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut users = Vec::with_capacity(by_user.len());
        let mut rows = Vec::with_capacity(by_user.len());
        let mut ratings = Vec::with_capacity(by_user.len());
        for (user, cells) in by_user {
            users.push(user);
            // BTreeMap order over ItemId matches the sorted column order
            let (r, v): (Vec<u32>, Vec<Option<f32>>) = cells
                .into_iter()
                .map(|(id, rating)| (item_index[&id] as u32, rating))
                .unzip();
            rows.push(r);
            ratings.push(v);
        }
        InteractionMatrix {
            users,
            items,
            item_index,
            rows,
            ratings,
        }
    }

    /// Convenience constructor from per-user lists of liked items.
    pub fn from_user_items<U, S, T>(rows: U) -> Self
    where
        U: IntoIterator<Item = (S, Vec<T>)>,
        S: Into<String>,
        T: Into<ItemId>,
    {
        let mut all = Vec::new();
        for (user, items) in rows {
            let user: String = user.into();
            for item in items {
                all.push(Interaction {
                    user_id: user.clone(),
                    item_id: item.into(),
                    rating: None,
                    timestamp: None,
                });
            }
        }
        Self::from_interactions(all)
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn item_index(&self, id: &ItemId) -> Option<usize> {
        self.item_index.get(id).copied()
    }

    /// Column indices rated by user `u`, ascending.
    pub fn row(&self, u: usize) -> &[u32] {
        &self.rows[u]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn rating(&self, u: usize, pos: usize) -> Option<f32> {
        self.ratings[u][pos]
    }

    /// Column-oriented view: users who rated each item, ascending.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.items.len()];
        for (u, row) in self.rows.iter().enumerate() {
            for &i in row {
                cols[i as usize].push(u as u32);
            }
        }
        cols
    }

    /// Number of users per item, aligned with `items()`.
    pub fn item_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.items.len()];
        for row in &self.rows {
            for &i in row {
                counts[i as usize] += 1;
            }
        }
        counts
    }

    /// Maps external ids to column indices, dropping ids the matrix has never seen.
    pub fn indices_of<'a, I>(&self, ids: I) -> Vec<usize>
    where
        I: IntoIterator<Item = &'a ItemId>,
    {
        let mut out: Vec<usize> = ids
            .into_iter()
            .filter_map(|id| self.item_index(id))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Loads `user_id,item_id[,rating[,timestamp]]` rows; a header row is required.
/// Every item must exist in `catalog`.
pub fn load_interactions(
    path: impl AsRef<Path>,
    catalog: &ItemCatalog,
) -> Result<InteractionMatrix, DataError> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() < 2 {
            return Err(DataError::parse(path, line, "expected at least user_id,item_id"));
        }
        let item_id = ItemId::new(record[1].trim());
        if !catalog.contains(&item_id) {
            return Err(DataError::UnknownItem {
                line,
                item_id: item_id.0,
            });
        }
        let rating = match record.get(2).map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(
                s.parse::<f32>()
                    .map_err(|_| DataError::parse(path, line, format!("invalid rating `{s}`")))?,
            ),
        };
        let timestamp = match record.get(3).map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(
                s.parse::<i64>()
                    .map_err(|_| DataError::parse(path, line, format!("invalid timestamp `{s}`")))?,
            ),
        };
        out.push(Interaction {
            user_id: record[0].trim().to_string(),
            item_id,
            rating,
            timestamp,
        });
    }
    Ok(InteractionMatrix::from_interactions(out))
}
