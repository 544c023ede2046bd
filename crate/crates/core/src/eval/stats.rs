use crate::protocol::{PoolSource, StudyRecord};
use serde::Serialize;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoolStatsRow {
    pub label: String,
    pub items_per_rater: f64,
    pub fraction_seen: f64,
    /// `None` when no item in the pool was seen.
    pub avg_rating_seen: Option<f64>,
    pub avg_rating_unseen: Option<f64>,
    pub n_items: usize,
}

/// Per-source rating statistics plus the SP-Full aggregate (last row).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoolStats {
    pub n_raters: usize,
    pub rows: Vec<PoolStatsRow>,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    n: usize,
    seen: usize,
    seen_sum: u64,
    unseen_sum: u64,
}

impl Acc {
    fn row(self, label: &str, n_raters: usize) -> PoolStatsRow {
        let unseen = self.n - self.seen;
        PoolStatsRow {
            label: label.to_string(),
            items_per_rater: self.n as f64 / n_raters.max(1) as f64,
            fraction_seen: if self.n == 0 { 0.0 } else { self.seen as f64 / self.n as f64 },
            avg_rating_seen: (self.seen > 0).then(|| self.seen_sum as f64 / self.seen as f64),
            avg_rating_unseen: (unseen > 0).then(|| self.unseen_sum as f64 / unseen as f64),
            n_items: self.n,
        }
    }
}

pub fn pool_stats(records: &[StudyRecord]) -> PoolStats {
    let mut per = [Acc::default(); 4];
    let mut full = Acc::default();
    for rec in records {
        for (entry, r) in rec.pool.entries.iter().zip(&rec.ratings) {
            let slot = PoolSource::ALL
                .iter()
                .position(|s| *s == entry.source)
                .expect("known source");
            for acc in [&mut per[slot], &mut full] {
                acc.n += 1;
                if r.seen {
                    acc.seen += 1;
                    acc.seen_sum += u64::from(r.score);
                } else {
                    acc.unseen_sum += u64::from(r.score);
                }
            }
        }
    }
    let n = records.len();
    let mut rows: Vec<PoolStatsRow> = PoolSource::ALL
        .iter()
        .zip(per)
        .map(|(s, a)| a.row(s.label(), n))
        .collect();
    rows.push(full.row("SP-Full", n));
    PoolStats { n_raters: n, rows }
}

impl PoolStats {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>9} {:>9} {:>12} {:>14}",
            "Sample Pool", "Per Rater", "Seen", "Avg (seen)", "Avg (unseen)"
        );
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<16} {:>9.1} {:>8.0}% {:>12} {:>14}",
                r.label,
                r.items_per_rater,
                r.fraction_seen * 100.0,
                fmt(r.avg_rating_seen),
                fmt(r.avg_rating_unseen)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::{ItemId, RaterId};
    use crate::protocol::{PoolEntry, RatingEntry, SamplePool};

    fn rec(rater: &str, cells: &[(PoolSource, bool, u8)]) -> StudyRecord {
        StudyRecord {
            rater_id: RaterId::new(rater),
            pool: SamplePool {
                entries: cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| PoolEntry {
                        item_id: ItemId::new(format!("{rater}{i}")),
                        source: c.0,
                        display_position: i as u32,
                    })
                    .collect(),
            },
            ratings: cells
                .iter()
                .enumerate()
                .map(|(i, c)| RatingEntry {
                    item_id: ItemId::new(format!("{rater}{i}")),
                    seen: c.1,
                    score: c.2,
                })
                .collect(),
        }
    }

    #[test]
    fn all_unseen_threes() {
        let cells: Vec<_> = (0..40).map(|i| (PoolSource::ALL[i / 10], false, 3)).collect();
        let s = pool_stats(&[rec("a", &cells)]);
        let full = s.rows.last().unwrap();
        assert_eq!(full.fraction_seen, 0.0);
        assert_eq!(full.avg_rating_unseen, Some(3.0));
        assert_eq!(full.avg_rating_seen, None);
        assert_eq!(full.items_per_rater, 40.0);
    }

    #[test]
    fn two_rater_fixture_matches_brute_force() {
        use PoolSource::*;
        let a = rec("a", &[(RandPop, true, 5), (RandPop, false, 2), (Ease, true, 4), (Bm25Fusion, false, 3)]);
        let b = rec("b", &[(RandPop, false, 1), (RandMidPop, true, 3), (Ease, true, 5), (Ease, false, 2)]);
        let s = pool_stats(&[a.clone(), b.clone()]);

        // brute force straight from the cells
        let all: Vec<(PoolSource, bool, u8)> = [a, b]
            .iter()
            .flat_map(|r| r.pool.entries.iter().zip(&r.ratings).map(|(e, x)| (e.source, x.seen, x.score)).collect::<Vec<_>>())
            .collect();
        for (row, src) in s.rows.iter().zip(PoolSource::ALL.iter().map(Some).chain([None])) {
            let cells: Vec<_> = all.iter().filter(|c| src.is_none_or(|s| c.0 == *s)).collect();
            let seen: Vec<f64> = cells.iter().filter(|c| c.1).map(|c| f64::from(c.2)).collect();
            let unseen: Vec<f64> = cells.iter().filter(|c| !c.1).map(|c| f64::from(c.2)).collect();
            let avg = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            assert_eq!(row.n_items, cells.len());
            assert_eq!(row.fraction_seen, seen.len() as f64 / cells.len() as f64);
            assert_eq!(row.avg_rating_seen, avg(&seen));
            assert_eq!(row.avg_rating_unseen, avg(&unseen));
        }
        // hand-checked values
        assert_eq!(s.rows[0].fraction_seen, 1.0 / 3.0);
        assert_eq!(s.rows[2].avg_rating_seen, Some(4.5));
        assert_eq!(s.rows[4].avg_rating_unseen, Some(2.0));
    }

    #[test]
    fn full_fraction_is_weighted_mean_of_pools() {
        let cells: Vec<_> = (0..40).map(|i| (PoolSource::ALL[i / 10], i % 3 == 0 || i > 33, (i % 5 + 1) as u8)).collect();
        let s = pool_stats(&[rec("a", &cells), rec("b", &cells[..30])]);
        let total: usize = s.rows[..4].iter().map(|r| r.n_items).sum();
        let weighted: f64 = s.rows[..4].iter().map(|r| r.fraction_seen * r.n_items as f64).sum::<f64>() / total as f64;
        assert!((weighted - s.rows[4].fraction_seen).abs() < 1e-12);
    }
}
