//! Item-based collaborative filtering baselines.
//!
//! Every fitted model scores a cold-start user given only the set of items
//! they said they liked. Items the training matrix has never seen score 0.

mod baseline;
mod ease;
mod knn;
mod matrix;
mod slim;
mod wrmf;

pub use baseline::{most_popular, random_ranking, PopularityModel, RandomModel};
pub use ease::{fit_ease, EASE_POOL_LAMBDA};
pub use knn::{fit_itemknn, SimilarityModel};
pub use matrix::DenseMatrix;
pub use slim::{fit_bpr_slim, SlimConfig};
pub use wrmf::{fit_wrmf, fit_wrmf_with_history, FactorModel, WrmfConfig};

use crate::ids::ItemId;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub(crate) const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CfError {
    #[error("interaction matrix is empty")]
    EmptyMatrix,
    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model kind `{0}`")]
    UnknownModel(String),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("model file version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
}

/// Square item × item weights. Row `j`, column `i` is the contribution of a
/// liked item `j` to the score of item `i`. The diagonal is always zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemWeightMatrix {
    items: Vec<ItemId>,
    weights: DenseMatrix,
    #[serde(skip)]
    index: HashMap<ItemId, usize>,
}

impl ItemWeightMatrix {
    pub(crate) fn new(items: Vec<ItemId>, weights: DenseMatrix) -> Self {
        assert_eq!(weights.rows(), items.len());
        assert_eq!(weights.cols(), items.len());
        let index = index_of(&items);
        ItemWeightMatrix {
            items,
            weights,
            index,
        }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights.get(from, to)
    }

    pub fn score(&self, liked: &[ItemId], candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        let rows: Vec<usize> = dedup_indices(liked, &self.index);
        candidates
            .iter()
            .map(|c| {
                let s = match self.index.get(c) {
                    Some(&col) => rows.iter().map(|&r| self.weights.get(r, col)).sum(),
                    None => 0.0,
                };
                (c.clone(), s)
            })
            .collect()
    }

    fn reindex(&mut self) {
        self.index = index_of(&self.items);
    }
}

pub(crate) fn index_of(items: &[ItemId]) -> HashMap<ItemId, usize> {
    items
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect()
}

pub(crate) fn dedup_indices(ids: &[ItemId], index: &HashMap<ItemId, usize>) -> Vec<usize> {
    let mut v: Vec<usize> = ids.iter().filter_map(|id| index.get(id).copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Random,
    MostPopular,
    ItemKnn,
    Wrmf,
    BprSlim,
    Ease,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Random,
        ModelKind::MostPopular,
        ModelKind::ItemKnn,
        ModelKind::Wrmf,
        ModelKind::BprSlim,
        ModelKind::Ease,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Random => "random",
            ModelKind::MostPopular => "most-popular",
            ModelKind::ItemKnn => "item-knn",
            ModelKind::Wrmf => "wrmf",
            ModelKind::BprSlim => "bpr-slim",
            ModelKind::Ease => "ease",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CfError::UnknownModel(s.to_string()))
    }
}

/// Any fitted baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Random(RandomModel),
    MostPopular(PopularityModel),
    ItemKnn(SimilarityModel),
    Wrmf(FactorModel),
    BprSlim(ItemWeightMatrix),
    Ease(ItemWeightMatrix),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Random(_) => ModelKind::Random,
            Model::MostPopular(_) => ModelKind::MostPopular,
            Model::ItemKnn(_) => ModelKind::ItemKnn,
            Model::Wrmf(_) => ModelKind::Wrmf,
            Model::BprSlim(_) => ModelKind::BprSlim,
            Model::Ease(_) => ModelKind::Ease,
        }
    }

    /// One finite score per candidate, in candidate order. Liked items are
    /// not filtered out.
    pub fn score_candidates(&self, liked: &[ItemId], candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        match self {
            Model::Random(m) => m.score(candidates),
            Model::MostPopular(m) => m.score(candidates),
            Model::ItemKnn(m) => m.score(liked, candidates),
            Model::Wrmf(m) => m.score(liked, candidates),
            Model::BprSlim(m) | Model::Ease(m) => m.score(liked, candidates),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CfError> {
        let file = ModelFileRef {
            version: MODEL_FORMAT_VERSION,
            model: self,
        };
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, &file)?;
        use std::io::Write;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model, CfError> {
        let r = std::io::BufReader::new(std::fs::File::open(path)?);
        let file: ModelFile = serde_json::from_reader(r)?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(CfError::Version {
                found: file.version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let mut model = file.model;
        match &mut model {
            Model::ItemKnn(m) => m.reindex(),
            Model::Wrmf(m) => m.reindex(),
            Model::BprSlim(m) | Model::Ease(m) => m.reindex(),
            Model::Random(_) | Model::MostPopular(_) => {}
        }
        Ok(model)
    }
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    version: u32,
    model: &'a Model,
}

#[derive(Deserialize)]
struct ModelFile {
    version: u32,
    model: Model,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::InteractionMatrix;

    #[test]
    fn kind_names_roundtrip() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert!(matches!("svd".parse::<ModelKind>(), Err(CfError::UnknownModel(_))));
    }

    #[test]
    fn empty_candidates_give_empty_scores() {
        let x = InteractionMatrix::from_user_items([("u", vec!["a", "b"]), ("v", vec!["a"])]);
        let m = Model::Ease(fit_ease(&x, 1.0).unwrap());
        assert!(m.score_candidates(&[ItemId::new("a")], &[]).is_empty());
    }

    #[test]
    fn save_load_is_lossless() {
        let x = InteractionMatrix::from_user_items([
            ("u1", vec!["a", "b", "c"]),
            ("u2", vec!["a", "c"]),
            ("u3", vec!["b", "d"]),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let models = vec![
            Model::Ease(fit_ease(&x, 0.7).unwrap()),
            Model::ItemKnn(fit_itemknn(&x, 2).unwrap()),
            Model::Wrmf(fit_wrmf(&x, &WrmfConfig { factors: 3, ..WrmfConfig::default() }).unwrap()),
            Model::BprSlim(fit_bpr_slim(&x, &SlimConfig { epochs: 3, ..SlimConfig::default() }).unwrap()),
            Model::MostPopular(PopularityModel::from_matrix(&x)),
            Model::Random(RandomModel { seed: 9 }),
        ];
        let liked = [ItemId::new("a")];
        let cands: Vec<ItemId> = ["a", "b", "c", "d", "zz"].iter().map(|s| ItemId::new(*s)).collect();
        for m in models {
            let path = dir.path().join(format!("{}.json", m.kind()));
            m.save(&path).unwrap();
            let back = Model::load(&path).unwrap();
            assert_eq!(back, m);
            let a = m.score_candidates(&liked, &cands);
            let b = back.score_candidates(&liked, &cands);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.1.to_bits(), y.1.to_bits());
            }
        }
    }
}
