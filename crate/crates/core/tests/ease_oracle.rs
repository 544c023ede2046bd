mod support;

use langrec_core::cf::fit_ease;
use langrec_core::data::InteractionMatrix;
use langrec_core::ids::ItemId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_from_dense(x: &[Vec<u8>]) -> InteractionMatrix {
    InteractionMatrix::from_user_items(x.iter().enumerate().map(|(u, row)| {
        let items: Vec<ItemId> = row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(i, _)| ItemId::new(format!("i{i:03}")))
            .collect();
        (format!("u{u:03}"), items)
    }))
}

#[test]
fn two_by_two_worked_example() {
    let x = InteractionMatrix::from_user_items(vec![("u1", vec!["a", "b"]), ("u2", vec!["a"])]);
    let b = fit_ease(&x, 1.0).unwrap();
    assert_eq!(b.weight(0, 0), 0.0);
    assert_eq!(b.weight(1, 1), 0.0);
    assert!((b.weight(0, 1) - 1.0 / 3.0).abs() < 1e-12);
    assert!((b.weight(1, 0) - 1.0 / 2.0).abs() < 1e-12);
}

#[test]
fn matches_dense_oracle_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xEA5E);
    for case in 0..100u32 {
        let users = rng.random_range(2..=60);
        let items = rng.random_range(2..=40);
        let lambda = if case.is_multiple_of(2) { 1.0 } else { 5000.0 };
        let density = rng.random_range(0.1..0.6);
        let mut x = support::random_binary(&mut rng, users, items, density);
        // every column observed at least once so the fitted item set is complete
        for i in 0..items {
            let u = rng.random_range(0..users);
            x[u][i] = 1;
        }
        let fitted = fit_ease(&matrix_from_dense(&x), lambda).unwrap();
        assert_eq!(fitted.items().len(), items);
        let oracle = support::ease_oracle(&x, items, lambda);
        for i in 0..items {
            assert_eq!(fitted.weight(i, i), 0.0, "case {case}: diagonal");
            for j in 0..items {
                let d = (fitted.weight(i, j) - oracle[i][j]).abs();
                assert!(d < 1e-8, "case {case} ({i},{j}): |Δ| = {d:e}");
            }
        }
    }
}
