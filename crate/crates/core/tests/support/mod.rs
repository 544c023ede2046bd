//! Independent reference implementations shared by the integration tests
//! and the acceptance suite. Nothing here calls the library code it checks.
#![allow(dead_code)]

use langrec_core::data::ItemCatalog;
use langrec_core::ids::{ItemId, RaterId};
use langrec_core::synth::{SynthConfig, SynthWorld};
use langrec_core::protocol::{PoolSource, RaterProfile, SamplePool};
use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Closed-form EASE on a dense 0/1 matrix: B = I − P·diag(1/diag(P)),
/// P = (XᵀX + λI)⁻¹, i.e. B_ij = −P_ij / P_jj off the diagonal.
pub fn ease_oracle(x: &[Vec<u8>], n_items: usize, lambda: f64) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; n_items]; n_items];
    for row in x {
        for i in 0..n_items {
            if row[i] == 0 {
                continue;
            }
            for j in 0..n_items {
                g[i][j] += (row[j]) as f64;
            }
        }
    }
    for (i, r) in g.iter_mut().enumerate() {
        r[i] += lambda;
    }
    let p = gauss_jordan_inverse(&g);
    (0..n_items)
        .map(|i| {
            (0..n_items)
                .map(|j| if i == j { 0.0 } else { -p[i][j] / p[j][j] })
                .collect()
        })
        .collect()
}

pub fn random_binary(rng: &mut impl Rng, users: usize, items: usize, density: f64) -> Vec<Vec<u8>> {
    (0..users)
        .map(|_| (0..items).map(|_| rng.random_bool(density) as u8).collect())
        .collect()
}

pub fn oracle_gain(s: u8) -> f64 {
    match s {
        1 | 2 => 0.0,
        3 => 1.0,
        4 => 2.0,
        5 => 4.0,
        _ => panic!("rating {s}"),
    }
}

/// Explicit DCG sum over the first `k` positions, IDCG from an explicit
/// descending sort.
pub fn brute_ndcg(ratings: &[u8], k: usize) -> f64 {
    let dcg = |r: &[u8]| -> f64 {
        let mut s = 0.0;
        for (p, &x) in r.iter().enumerate().take(k) {
            s += oracle_gain(x) / ((p + 2) as f64).log2();
        }
        s
    };
    let mut ideal = ratings.to_vec();
    ideal.sort_by(|a, b| b.cmp(a));
    let idcg = dcg(&ideal);
    if idcg == 0.0 {
        0.0
    } else {
        dcg(ratings) / idcg
    }
}

/// From-scratch Okapi BM25 over whitespace-separated, already-lowercase
/// documents. Query terms count once per occurrence.
pub fn naive_bm25(docs: &[String], query: &str, doc: usize, k1: f64, b: f64) -> f64 {
    let toks: Vec<Vec<&str>> = docs.iter().map(|d| d.split_whitespace().collect()).collect();
    let n = docs.len() as f64;
    let avg = toks.iter().map(|t| t.len()).sum::<usize>() as f64 / n;
    let len = toks[doc].len() as f64;
    let mut score = 0.0;
    for q in query.split_whitespace() {
        let df = toks.iter().filter(|t| t.contains(&q)).count() as f64;
        let tf = toks[doc].iter().filter(|&&t| t == q).count() as f64;
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
    }
    score
}

/// Every stated pool invariant; returns the first violation.
pub fn check_pool(pool: &SamplePool, profile: &RaterProfile, catalog: &ItemCatalog) -> Result<(), String> {
    if pool.entries.len() != 40 {
        return Err(format!("{} entries", pool.entries.len()));
    }
    let ids: HashSet<&ItemId> = pool.entries.iter().map(|e| &e.item_id).collect();
    if ids.len() != 40 {
        return Err("duplicate items".into());
    }
    let mut per_source: BTreeMap<PoolSource, usize> = BTreeMap::new();
    for e in &pool.entries {
        *per_source.entry(e.source).or_default() += 1;
        let rank = catalog
            .get(&e.item_id)
            .ok_or_else(|| format!("{} not in catalog", e.item_id))?
            .popularity_rank;
        match e.source {
            PoolSource::RandPop if !(1..=1000).contains(&rank) => {
                return Err(format!("RandPop item at rank {rank}"))
            }
            PoolSource::RandMidPop if !(1001..=5000).contains(&rank) => {
                return Err(format!("RandMidPop item at rank {rank}"))
            }
            _ => {}
        }
        if profile.liked_items.contains(&e.item_id) || profile.disliked_items.contains(&e.item_id) {
            return Err(format!("elicited item {} in pool", e.item_id));
        }
    }
    for s in PoolSource::ALL {
        if per_source.get(&s) != Some(&10) {
            return Err(format!("{s:?} has {:?} entries", per_source.get(&s)));
        }
    }
    let mut pos: Vec<u32> = pool.entries.iter().map(|e| e.display_position).collect();
    pos.sort_unstable();
    if pos != (0..40).collect::<Vec<u32>>() {
        return Err("display positions are not a permutation of 0..39".into());
    }
    Ok(())
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Liked items sometimes come from the EASE-trained head so collisions with
/// the random pools and the model pools actually happen.
pub fn random_profile(rng: &mut ChaCha8Rng, world: &SynthWorld, i: usize) -> RaterProfile {
    let entries = world.catalog.entries();
    let hi = if i.is_multiple_of(2) { 300 } else { 5200 };
    let picks = index::sample(rng, hi, 10);
    let ids: Vec<ItemId> = picks.iter().map(|p| entries[p].item_id.clone()).collect();
    let words: Vec<&str> = (0..40)
        .map(|_| {
            let e = entries[rng.random_range(0..600)].title.as_str();
            *e.split(' ').collect::<Vec<_>>().choose(rng).unwrap()
        })
        .collect();
    let text = format!("{} and more of the same kind of thing, please.", words.join(" "));
    let text = if text.chars().count() < 150 { format!("{text} {}", "x".repeat(150)) } else { text };
    RaterProfile {
        rater_id: RaterId::new(format!("p{i}")),
        desc_pos: text.clone(),
        desc_neg: text.clone(),
        final_desc_pos: text.clone(),
        final_desc_neg: text,
        liked_items: ids[..5].to_vec(),
        disliked_items: ids[5..].to_vec(),
        ..Default::default()
    }
}

/// Small world for pool checks: EASE trains on the 300 most popular items,
/// BM25 indexes reviews of the top 600.
pub fn pool_world_config() -> SynthConfig {
    SynthConfig {
        seed: 11,
        n_items: 5200,
        n_train_users: 400,
        n_train_items: 300,
        n_reviewed_items: 600,
        ..SynthConfig::default()
    }
}
