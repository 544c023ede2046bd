//! Weighted regularized matrix factorization for implicit feedback,
//! trained by alternating least squares.
//!
//! Objective over the full user × item grid:
//! `Σ c_ui (p_ui - u·v)² + reg (‖U‖² + ‖V‖²)` with `p_ui = 1` and
//! `c_ui = 1 + alpha` for observed cells, `p_ui = 0` and `c_ui = 1` elsewhere.
//! Each half-sweep solves its block exactly, so the objective never increases.

use super::{dedup_indices, index_of, CfError, DenseMatrix};
use crate::data::InteractionMatrix;
use crate::ids::ItemId;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrmfConfig {
    pub factors: usize,
    pub reg: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for WrmfConfig {
    fn default() -> Self {
        WrmfConfig {
            factors: 10,
            reg: 0.015,
            alpha: 1.0,
            iterations: 15,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    items: Vec<ItemId>,
    users: Vec<String>,
    user_factors: DenseMatrix,
    item_factors: DenseMatrix,
    reg: f64,
    alpha: f64,
    #[serde(skip)]
    index: HashMap<ItemId, usize>,
    #[serde(skip)]
    item_gram: Option<DMatrix<f64>>,
}

impl FactorModel {
    pub fn factors(&self) -> usize {
        self.item_factors.cols()
    }

    pub fn user_factors(&self) -> &DenseMatrix {
        &self.user_factors
    }

    pub fn item_factors(&self) -> &DenseMatrix {
        &self.item_factors
    }

    /// Value of the training objective on `x`.
    pub fn objective(&self, x: &InteractionMatrix) -> f64 {
        objective(x, &self.user_factors, &self.item_factors, self.reg, self.alpha)
    }

    /// Solves the user block for a new user with the given liked items.
    pub fn fold_in(&self, liked: &[ItemId]) -> Vec<f64> {
        let rows: Vec<u32> = dedup_indices(liked, &self.index)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        let gram = match &self.item_gram {
            Some(g) => g.clone(),
            None => gram_of(&self.item_factors),
        };
        solve_block(&gram, &self.item_factors, &rows, self.reg, self.alpha)
    }

    pub fn score(&self, liked: &[ItemId], candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        let u = self.fold_in(liked);
        candidates
            .iter()
            .map(|c| {
                let s = match self.index.get(c) {
                    Some(&i) => dot(&u, self.item_factors.row(i)),
                    None => 0.0,
                };
                (c.clone(), s)
            })
            .collect()
    }

    pub(super) fn reindex(&mut self) {
        self.index = index_of(&self.items);
        self.item_gram = Some(gram_of(&self.item_factors));
    }
}

pub fn fit_wrmf(x: &InteractionMatrix, config: &WrmfConfig) -> Result<FactorModel, CfError> {
    fit_wrmf_with_history(x, config).map(|(m, _)| m)
}

/// Also returns the objective before training and after every full sweep.
pub fn fit_wrmf_with_history(
    x: &InteractionMatrix,
    config: &WrmfConfig,
) -> Result<(FactorModel, Vec<f64>), CfError> {
    if config.factors == 0 {
        return Err(CfError::InvalidParameter("factors must be at least 1".into()));
    }
    if config.iterations == 0 {
        return Err(CfError::InvalidParameter("iterations must be at least 1".into()));
    }
    if !(config.reg > 0.0 && config.alpha >= 0.0) {
        return Err(CfError::InvalidParameter(
            "reg must be positive and alpha non-negative".into(),
        ));
    }
    if x.is_empty() {
        return Err(CfError::EmptyMatrix);
    }
    let d = config.factors;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut init = |n: usize| {
        let mut m = DenseMatrix::zeros(n, d);
        for v in m.as_mut_slice() {
            *v = rng.random_range(-0.1..0.1);
        }
        m
    };
    let mut users = init(x.n_users());
    let mut items = init(x.n_items());
    let cols = x.columns();

    let mut history = vec![objective(x, &users, &items, config.reg, config.alpha)];
    for _ in 0..config.iterations {
        users = solve_all(&items, x.rows(), config.reg, config.alpha);
        items = solve_all(&users, &cols, config.reg, config.alpha);
        history.push(objective(x, &users, &items, config.reg, config.alpha));
    }

    let model = FactorModel {
        items: x.items().to_vec(),
        users: x.users().to_vec(),
        user_factors: users,
        item_factors: items.clone(),
        reg: config.reg,
        alpha: config.alpha,
        index: index_of(x.items()),
        item_gram: Some(gram_of(&items)),
    };
    Ok((model, history))
}

fn gram_of(f: &DenseMatrix) -> DMatrix<f64> {
    let d = f.cols();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for r in 0..f.rows() {
        let row = f.row(r);
        for a in 0..d {
            for b in 0..d {
                g[(a, b)] += row[a] * row[b];
            }
        }
    }
    g
}

/// Re-solves every row of one factor block against the fixed other block.
fn solve_all(fixed: &DenseMatrix, lists: &[Vec<u32>], reg: f64, alpha: f64) -> DenseMatrix {
    let d = fixed.cols();
    let gram = gram_of(fixed);
    let solved: Vec<Vec<f64>> = lists
        .par_iter()
        .map(|list| solve_block(&gram, fixed, list, reg, alpha))
        .collect();
    let mut out = DenseMatrix::zeros(lists.len(), d);
    for (r, v) in solved.into_iter().enumerate() {
        out.row_mut(r).copy_from_slice(&v);
    }
    out
}

/// Minimizes the objective for one row given the observed column list.
fn solve_block(gram: &DMatrix<f64>, fixed: &DenseMatrix, observed: &[u32], reg: f64, alpha: f64) -> Vec<f64> {
    let d = fixed.cols();
    let mut a = gram.clone();
    let mut b = DVector::<f64>::zeros(d);
    for &j in observed {
        let v = fixed.row(j as usize);
        for p in 0..d {
            b[p] += (1.0 + alpha) * v[p];
            for q in 0..d {
                a[(p, q)] += alpha * v[p] * v[q];
            }
        }
    }
    for p in 0..d {
        a[(p, p)] += reg;
    }
    let sol = match a.clone().cholesky() {
        Some(c) => c.solve(&b),
        None => a.lu().solve(&b).unwrap_or_else(|| DVector::zeros(d)),
    };
    sol.iter().copied().collect()
}

fn objective(x: &InteractionMatrix, users: &DenseMatrix, items: &DenseMatrix, reg: f64, alpha: f64) -> f64 {
    let gram = gram_of(items);
    let d = items.cols();
    let mut total = 0.0;
    for (u, row) in x.rows().iter().enumerate() {
        let uf = users.row(u);
        // every cell as if unobserved: Σ_i (u·v_i)² = uᵀ (VᵀV) u
        let mut unobserved = 0.0;
        for a in 0..d {
            for b in 0..d {
                unobserved += uf[a] * gram[(a, b)] * uf[b];
            }
        }
        total += unobserved;
        for &i in row {
            let pred = dot(uf, items.row(i as usize));
            total += (1.0 + alpha) * (1.0 - pred).powi(2) - pred * pred;
        }
    }
    let sq = |m: &DenseMatrix| m.as_slice().iter().map(|v| v * v).sum::<f64>();
    total + reg * (sq(users) + sq(items))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
