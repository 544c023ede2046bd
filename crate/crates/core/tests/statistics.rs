mod support;

use langrec_core::cf::random_ranking;
use langrec_core::eval::{evaluate, mean_subset_sizes, ndcg_at_k, pool_stats, Rating, ResultCell, SubsetKind};
use langrec_core::ids::{ItemId, RaterId};
use langrec_core::protocol::{PoolEntry, PoolSource, RatingEntry, SamplePool, StudyRecord};
use langrec_core::synth::{synthesize, SynthConfig};
use std::collections::BTreeMap;

fn record(rater: &str, spec: &[(PoolSource, bool, u8)]) -> StudyRecord {
    let id = |i: usize| ItemId::new(format!("{rater}-{i:02}"));
    StudyRecord {
        rater_id: RaterId::new(rater),
        pool: SamplePool {
            entries: spec
                .iter()
                .enumerate()
                .map(|(i, (s, _, _))| PoolEntry { item_id: id(i), source: *s, display_position: i as u32 })
                .collect(),
        },
        ratings: spec
            .iter()
            .enumerate()
            .map(|(i, (_, seen, score))| RatingEntry { item_id: id(i), seen: *seen, score: *score })
            .collect(),
    }
}

#[test]
fn two_rater_interval() {
    // rater a ranked ideally (1.0); rater b has nothing relevant (0.0)
    let a = record("a", &[(PoolSource::RandPop, true, 5), (PoolSource::Ease, false, 1)]);
    let b = record("b", &[(PoolSource::RandPop, true, 2), (PoolSource::Ease, false, 1)]);
    let rankings: BTreeMap<RaterId, Vec<ItemId>> = [&a, &b]
        .iter()
        .map(|r| (r.rater_id.clone(), r.pool.item_ids()))
        .collect();
    let ev = evaluate(&rankings, &[a, b], SubsetKind::Full, 10).unwrap();
    assert_eq!(ev.per_rater.iter().map(|(_, v)| *v).collect::<Vec<_>>(), vec![1.0, 0.0]);
    let c = ev.cell.unwrap();
    assert!((c.mean - 0.5).abs() < 1e-12);
    assert!((c.half_width - 0.980).abs() < 1e-3);
}

#[test]
fn single_rater_half_width_is_zero() {
    let c = ResultCell::from_values(&[0.42]).unwrap();
    assert_eq!(c.half_width, 0.0);
    assert!(c.is_single_rater());
}

#[test]
fn pool_stats_matches_brute_force() {
    let mk = |i: usize, seen: bool, s: u8| (PoolSource::ALL[i % 4], seen, s);
    let recs = vec![
        record("r1", &(0..8).map(|i| mk(i, i % 3 == 0, (i % 5) as u8 + 1)).collect::<Vec<_>>()),
        record("r2", &(0..6).map(|i| mk(i + 1, i % 2 == 0, 5 - (i % 4) as u8)).collect::<Vec<_>>()),
    ];
    let stats = pool_stats(&recs);
    assert_eq!(stats.n_raters, 2);
    let rows = &stats.rows;
    assert_eq!(rows.len(), 5);
    let labels: Vec<Option<PoolSource>> = PoolSource::ALL.iter().map(|s| Some(*s)).chain([None]).collect();
    for (row, want) in rows.iter().zip(labels) {
        let mut items: Vec<(bool, u8)> = Vec::new();
        for r in &recs {
            for (e, rt) in r.pool.entries.iter().zip(&r.ratings) {
                if want.is_none_or(|s| s == e.source) {
                    items.push((rt.seen, rt.score));
                }
            }
        }
        let seen: Vec<f64> = items.iter().filter(|x| x.0).map(|x| f64::from(x.1)).collect();
        let unseen: Vec<f64> = items.iter().filter(|x| !x.0).map(|x| f64::from(x.1)).collect();
        let avg = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        assert_eq!(row.n_items, items.len(), "{}", row.label);
        assert_eq!(row.items_per_rater, items.len() as f64 / 2.0);
        assert_eq!(row.fraction_seen, seen.len() as f64 / items.len() as f64);
        assert_eq!(row.avg_rating_seen, avg(&seen));
        assert_eq!(row.avg_rating_unseen, avg(&unseen));
    }
    assert_eq!(rows[4].label, "SP-Full");
}

#[test]
fn random_baseline_matches_permutation_expectation() {
    let scores = [5u8, 4, 3, 1, 2];
    let rec = record("r", &scores.iter().map(|&s| (PoolSource::RandPop, true, s)).collect::<Vec<_>>());
    let perms = support::permutations(5);
    assert_eq!(perms.len(), 120);
    let exact = perms
        .iter()
        .map(|p| support::brute_ndcg(&p.iter().map(|&i| scores[i]).collect::<Vec<_>>(), 10))
        .sum::<f64>()
        / 120.0;
    let items = rec.pool.item_ids();
    let values: Vec<f64> = (0..4000u64)
        .map(|seed| {
            let ranked = random_ranking(seed, &items);
            let ordered: Vec<Rating> = ranked
                .iter()
                .map(|id| Rating::new(rec.rating(id).unwrap().score).unwrap())
                .collect();
            ndcg_at_k(&ordered, 10)
        })
        .collect();
    let c = ResultCell::from_values(&values).unwrap();
    assert!((c.mean - exact).abs() <= 3.0 * c.half_width, "{} vs {exact} ± {}", c.mean, c.half_width);
}

#[test]
fn synthetic_cohort_seen_shape() {
    let syn = synthesize(&SynthConfig { seed: 3, n_raters: 1000, n_exemplars: 0, ..Default::default() }).unwrap();
    let records: Vec<StudyRecord> = syn.records.iter().map(|l| l.record.clone()).collect();
    assert_eq!(records.len(), 1000);
    let stats = pool_stats(&records);
    let full = stats.rows.last().unwrap();
    assert!((full.fraction_seen - 0.27).abs() <= 0.02, "SP-Full seen {}", full.fraction_seen);
    let sizes = mean_subset_sizes(&records).unwrap();
    assert_eq!(sizes[0], 40.0);
    assert_eq!(sizes[1], 20.0);
    assert!((sizes[2] - 10.8).abs() <= 1.0, "Seen {}", sizes[2]);
    assert!((sizes[2] + sizes[3] - 40.0).abs() < 1e-9);
    // seen items are rated higher, and the random pools are seen least
    assert!(full.avg_rating_seen.unwrap() > full.avg_rating_unseen.unwrap());
    assert!(stats.rows[1].fraction_seen < stats.rows[2].fraction_seen);
}
