use super::{ResultCell, SubsetKind};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    /// In `SubsetKind::ALL` order; `None` when every rater was skipped.
    pub cells: [Option<ResultCell>; 4],
}

/// Table of mean NDCG@10 ± 95% half-width, one row per algorithm and one
/// column per subset (Full, Unbiased, Seen, Unseen).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub subset_sizes: Option<[f64; 4]>,
    pub rows: Vec<ReportRow>,
}

/// `0.650 ± 0.026`
pub fn format_cell(c: &ResultCell) -> String {
    let mut s = format!("{:.3} ± {:.3}", c.mean, c.half_width);
    if c.is_single_rater() {
        s.push_str(" (n=1)");
    }
    s
}

impl Report {
    /// Comma-separated, full precision; header only when there are no rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("algorithm");
        for k in SubsetKind::ALL {
            let _ = write!(out, ",{k}_mean,{k}_half_width,{k}_n");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_field(&row.algorithm));
            for cell in &row.cells {
                match cell {
                    Some(c) => {
                        let _ = write!(out, ",{:.6},{:.6},{}", c.mean, c.half_width, c.n_raters);
                    }
                    None => out.push_str(",,,0"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let headers = ["Full Set", "Unbiased Set", "Seen", "Unseen"];
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.cells
                    .iter()
                    .map(|c| c.as_ref().map(format_cell).unwrap_or_else(|| "-".into()))
                    .collect()
            })
            .collect();
        let size_label = "Mean evaluation set size";
        let mut name_w = "Algorithm".len().max(size_label.len());
        for r in &self.rows {
            name_w = name_w.max(r.algorithm.chars().count());
        }
        let mut col_w = [0usize; 4];
        for (i, h) in headers.iter().enumerate() {
            col_w[i] = h.len().max(13);
            for row in &cells {
                col_w[i] = col_w[i].max(row[i].chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, name: &str, vals: &[String]| {
            let _ = write!(out, "{name:<name_w$}");
            for (v, w) in vals.iter().zip(col_w) {
                let _ = write!(out, " | {v:>w$}");
            }
            out.push('\n');
        };
        let header: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
        line(&mut out, "Algorithm", &header);
        let rule_len = name_w + col_w.iter().map(|w| w + 3).sum::<usize>();
        out.push_str(&"-".repeat(rule_len));
        out.push('\n');
        if let Some(sizes) = self.subset_sizes {
            let vals: Vec<String> = sizes.iter().map(|s| format!("{s:.1}")).collect();
            line(&mut out, size_label, &vals);
        }
        for (row, vals) in self.rows.iter().zip(&cells) {
            line(&mut out, &row.algorithm, vals);
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(mean: f64, hw: f64, n: usize) -> Option<ResultCell> {
        Some(ResultCell { mean, half_width: hw, n_raters: n })
    }

    #[test]
    fn cell_format_three_decimals() {
        assert_eq!(format_cell(&cell(0.6504, 0.0258, 153).unwrap()), "0.650 ± 0.026");
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::default();
        assert_eq!(
            r.to_csv(),
            "algorithm,full_mean,full_half_width,full_n,unbiased_mean,unbiased_half_width,unbiased_n,seen_mean,seen_half_width,seen_n,unseen_mean,unseen_half_width,unseen_n\n"
        );
        assert_eq!(r.to_text().lines().count(), 2);
    }

    #[test]
    fn deterministic_output() {
        let r = Report {
            subset_sizes: Some([40.0, 20.0, 10.8, 29.2]),
            rows: vec![
                ReportRow { algorithm: "random".into(), cells: [cell(0.504, 0.032, 153), cell(0.532, 0.034, 153), None, cell(0.5, 0.0, 1)] },
                ReportRow { algorithm: "ease, λ=5000".into(), cells: [cell(0.673, 0.038, 153); 4] },
            ],
        };
        assert_eq!(r.to_csv(), r.clone().to_csv());
        let text = r.to_text();
        assert!(text.contains("0.504 ± 0.032"));
        assert!(text.contains("0.500 ± 0.000 (n=1)"));
        assert!(r.to_csv().contains("\"ease, λ=5000\""));
        let widths: Vec<usize> = text.lines().filter(|l| !l.starts_with('-')).map(|l| l.chars().count()).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]), "{text}");
    }
}
