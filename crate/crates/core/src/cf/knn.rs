//! Item-based k-nearest neighbours with cosine similarity over binary
//! item columns.

use super::{dedup_indices, index_of, CfError};
use crate::data::InteractionMatrix;
use crate::ids::ItemId;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityModel {
    items: Vec<ItemId>,
    k: usize,
    /// Per item: up to `k` `(neighbour, similarity)` pairs, similarity
    /// descending then neighbour ascending. Zero similarities are not stored.
    neighbors: Vec<Vec<(u32, f64)>>,
    #[serde(skip)]
    index: HashMap<ItemId, usize>,
}

impl SimilarityModel {
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, item: usize) -> &[(u32, f64)] {
        &self.neighbors[item]
    }

    /// Stored similarity, 0 when `b` is not among `a`'s neighbours.
    pub fn similarity(&self, a: usize, b: usize) -> f64 {
        self.neighbors[a]
            .iter()
            .find(|(n, _)| *n as usize == b)
            .map(|&(_, s)| s)
            .unwrap_or(0.0)
    }

    /// `score(i) = Σ sim(i, j)` over liked items `j` in `i`'s neighbour list.
    pub fn score(&self, liked: &[ItemId], candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        let liked = dedup_indices(liked, &self.index);
        candidates
            .iter()
            .map(|c| {
                let s = match self.index.get(c) {
                    Some(&i) => self.neighbors[i]
                        .iter()
                        .filter(|(n, _)| liked.binary_search(&(*n as usize)).is_ok())
                        .map(|&(_, s)| s)
                        .sum(),
                    None => 0.0,
                };
                (c.clone(), s)
            })
            .collect()
    }

    pub(super) fn reindex(&mut self) {
        self.index = index_of(&self.items);
    }
}

pub fn fit_itemknn(x: &InteractionMatrix, k: usize) -> Result<SimilarityModel, CfError> {
    if k == 0 {
        return Err(CfError::InvalidParameter("k must be at least 1".into()));
    }
    let n = x.n_items();
    let cols = x.columns();
    let norms: Vec<f64> = cols.iter().map(|c| (c.len() as f64).sqrt()).collect();
    let rows = x.rows();

    let neighbors: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<u32>::new()),
            |(counts, touched), i| {
                for &u in &cols[i] {
                    for &j in &rows[u as usize] {
                        if counts[j as usize] == 0 {
                            touched.push(j);
                        }
                        counts[j as usize] += 1;
                    }
                }
                let mut sims: Vec<(u32, f64)> = Vec::with_capacity(touched.len());
                for &j in touched.iter() {
                    let co = counts[j as usize];
                    counts[j as usize] = 0;
                    if j as usize == i {
                        continue;
                    }
                    let sim = f64::from(co) / (norms[i] * norms[j as usize]);
                    sims.push((j, sim.min(1.0)));
                }
                touched.clear();
                sims.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                sims.truncate(k);
                sims
            },
        )
        .collect();

    Ok(SimilarityModel {
        items: x.items().to_vec(),
        k,
        neighbors,
        index: index_of(x.items()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn three_items() -> InteractionMatrix {
        // i1 = [1,1], i2 = [1,0], i3 = [0,1] over users u1,u2; i4 has no ratings
        // in this matrix so it is only reachable as an unknown candidate.
        InteractionMatrix::from_user_items([("u1", vec!["i1", "i2"]), ("u2", vec!["i1", "i3"])])
    }

    #[test]
    fn hand_cosine() {
        let m = fit_itemknn(&three_items(), 80).unwrap();
        assert!((m.similarity(0, 1) - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((m.similarity(0, 2) - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(m.similarity(1, 2), 0.0);
    }

    #[test]
    fn user_score_sums_neighbour_sims() {
        let m = fit_itemknn(&three_items(), 80).unwrap();
        let s = m.score(
            &[ItemId::new("i1"), ItemId::new("i3")],
            &[ItemId::new("i2"), ItemId::new("i4")],
        );
        assert!((s[0].1 - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(s[1].1, 0.0);
    }

    #[test]
    fn zero_columns_have_zero_similarity() {
        // u3 has rated nothing the others rated; item "lonely" co-occurs with nobody
        let x = InteractionMatrix::from_user_items([
            ("u1", vec!["a", "b"]),
            ("u2", vec!["lonely"]),
        ]);
        let m = fit_itemknn(&x, 5).unwrap();
        let lonely = x.item_index(&ItemId::new("lonely")).unwrap();
        assert!(m.neighbors(lonely).is_empty());
        assert!(m.similarity(0, lonely).abs() < f64::MIN_POSITIVE);
    }

    #[test]
    fn k_zero_rejected() {
        assert!(fit_itemknn(&three_items(), 0).is_err());
    }

    proptest! {
        #[test]
        fn full_lists_symmetric_and_bounded(
            cells in prop::collection::vec((0u8..8, 0u8..10), 1..60),
        ) {
            let mut rows: std::collections::BTreeMap<String, Vec<String>> = Default::default();
            for (u, i) in cells {
                rows.entry(format!("u{u}")).or_default().push(format!("i{i}"));
            }
            let x = InteractionMatrix::from_user_items(rows);
            let n = x.n_items();
            let m = fit_itemknn(&x, n).unwrap();
            for a in 0..n {
                let nb = m.neighbors(a);
                prop_assert!(nb.windows(2).all(|w| w[0].1 >= w[1].1));
                for b in 0..n {
                    let s = m.similarity(a, b);
                    prop_assert!((0.0..=1.0).contains(&s));
                    prop_assert_eq!(s.to_bits(), m.similarity(b, a).to_bits());
                }
            }
            let small = fit_itemknn(&x, 2).unwrap();
            prop_assert!((0..n).all(|a| small.neighbors(a).len() <= 2));
        }
    }
}
