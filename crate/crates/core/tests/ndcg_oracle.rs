mod support;

use langrec_core::eval::{gain, ndcg_at_k, Rating};
use proptest::prelude::*;

fn ratings(v: &[u8]) -> Vec<Rating> {
    v.iter().map(|&s| Rating::new(s).unwrap()).collect()
}

#[test]
fn gain_table() {
    let table: Vec<f64> = (1..=5).map(|s| gain(s).unwrap()).collect();
    assert_eq!(table, vec![0.0, 0.0, 1.0, 2.0, 4.0]);
    for s in 3..=5u8 {
        assert_eq!(gain(s).unwrap(), 2f64.powi(i32::from(s) - 3));
    }
    assert!(gain(0).is_err());
    assert!(gain(6).is_err());
}

/// Every sequence over {1..5} of length ≤ 8 covers every permutation of
/// every rating multiset of that size.
#[test]
fn exhaustive_agreement_up_to_eight() {
    let mut checked = 0usize;
    for len in 1..=8u32 {
        for code in 0..5usize.pow(len) {
            let mut c = code;
            let seq: Vec<u8> = (0..len)
                .map(|_| {
                    let s = (c % 5) as u8 + 1;
                    c /= 5;
                    s
                })
                .collect();
            let got = ndcg_at_k(&ratings(&seq), 10);
            let want = support::brute_ndcg(&seq, 10);
            assert!((got - want).abs() <= 1e-12, "{seq:?}: {got} vs {want}");
            checked += 1;
        }
    }
    assert_eq!(checked, (1..=8).map(|n| 5usize.pow(n)).sum::<usize>());
}

#[test]
fn cutoff_below_length() {
    let seq = [1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 5, 5];
    for k in 1..=12 {
        let got = ndcg_at_k(&ratings(&seq), k);
        assert!((got - support::brute_ndcg(&seq, k)).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn bounded_and_ideal_is_one(seq in prop::collection::vec(1u8..=5, 1..40)) {
        let v = ndcg_at_k(&ratings(&seq), 10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        let mut ideal = seq.clone();
        ideal.sort_by(|a, b| b.cmp(a));
        let best = ndcg_at_k(&ratings(&ideal), 10);
        if ideal[0] >= 3 {
            prop_assert!((best - 1.0).abs() < 1e-12);
        } else {
            prop_assert_eq!(best, 0.0);
        }
    }
}
