//! SLIM item-item weights learned with the BPR pairwise criterion.
//!
//! For a sampled triple `(u, i, j)` with `i` observed and `j` unobserved,
//! `x_uij = s(u, i) - s(u, j)` where `s(u, t) = Σ_{l ∈ I_u, l ≠ t} B[l][t]`,
//! and stochastic gradient ascent is applied to `ln σ(x_uij) - reg ‖B‖²`.

use super::{CfError, DenseMatrix, ItemWeightMatrix};
use crate::data::InteractionMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlimConfig {
    pub reg: f64,
    pub learn_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SlimConfig {
    fn default() -> Self {
        SlimConfig {
            reg: 0.0025,
            learn_rate: 0.05,
            epochs: 30,
            seed: 0,
        }
    }
}

/// Fits for `config.epochs` epochs of `nnz` sampled triples each.
pub fn fit_bpr_slim(x: &InteractionMatrix, config: &SlimConfig) -> Result<ItemWeightMatrix, CfError> {
    if config.epochs == 0 {
        return Err(CfError::InvalidParameter("epochs must be at least 1".into()));
    }
    Ok(train(x, config, config.epochs))
}

/// Weights after exactly `epochs` epochs; zero epochs is the all-zero start.
pub(crate) fn train(x: &InteractionMatrix, config: &SlimConfig, epochs: usize) -> ItemWeightMatrix {
    let n = x.n_items();
    let mut b = DenseMatrix::zeros(n, n);
    // users with at least one positive and one negative
    let trainable: Vec<usize> = (0..x.n_users())
        .filter(|&u| !x.row(u).is_empty() && x.row(u).len() < n)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples_per_epoch = x.nnz();
    if !trainable.is_empty() {
        for _ in 0..epochs {
            for _ in 0..samples_per_epoch {
                let u = trainable[rng.random_range(0..trainable.len())];
                let row = x.row(u);
                let pos = row[rng.random_range(0..row.len())] as usize;
                let neg = loop {
                    let j = rng.random_range(0..n as u32);
                    if row.binary_search(&j).is_err() {
                        break j as usize;
                    }
                };
                step(&mut b, row, pos, neg, config);
            }
        }
    }
    ItemWeightMatrix::new(x.items().to_vec(), b)
}

fn step(b: &mut DenseMatrix, row: &[u32], pos: usize, neg: usize, config: &SlimConfig) {
    let mut x_pos = 0.0;
    let mut x_neg = 0.0;
    for &l in row {
        let l = l as usize;
        if l != pos {
            x_pos += b.get(l, pos);
        }
        x_neg += b.get(l, neg);
    }
    // d/dx ln σ(x) = σ(-x)
    let g = 1.0 / (1.0 + (x_pos - x_neg).exp());
    let lr = config.learn_rate;
    for &l in row {
        let l = l as usize;
        if l != pos {
            let w = b.get(l, pos);
            b.set(l, pos, w + lr * (g - config.reg * w));
        }
        // neg is never in the row, so l != neg
        let w = b.get(l, neg);
        b.set(l, neg, w + lr * (-g - config.reg * w));
    }
}
