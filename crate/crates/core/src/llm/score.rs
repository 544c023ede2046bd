use super::backend::{BackendError, ScoreBackend};
use super::prompt::{build_prefix, PromptVariant};
use super::LlmError;
use crate::data::ItemCatalog;
use crate::ids::ItemId;
use crate::protocol::RaterProfile;
use crate::ranking::rank_by_score;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetryPolicy {
    /// Extra attempts after the first failure.
    pub max_retries: u32,
    /// Delay before retry `n` is `backoff * 2^(n-1)`.
    pub backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            backoff: Duration::from_millis(200),
        }
    }
}

pub fn with_retries(
    backend: &dyn ScoreBackend,
    prefix: &str,
    suffix: &str,
    policy: RetryPolicy,
) -> Result<f64, (BackendError, u32)> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match backend.log_likelihood(prefix, suffix) {
            Ok(v) if v.is_finite() => return Ok(v),
            Ok(v) => return Err((BackendError::fatal(format!("non-finite log-likelihood {v}")), attempt)),
            Err(e) if e.retriable && attempt <= policy.max_retries => {
                std::thread::sleep(policy.backoff * 2u32.saturating_pow(attempt - 1));
            }
            Err(e) => return Err((e, attempt)),
        }
    }
}

/// One log-likelihood per candidate, in input order. Candidates sharing a
/// title share one backend call and hence one score. Any failure after
/// retries fails the whole call.
pub fn score_candidates(
    backend: &dyn ScoreBackend,
    variant: PromptVariant,
    profile: &RaterProfile,
    exemplars: &[RaterProfile],
    candidates: &[ItemId],
    catalog: &ItemCatalog,
    policy: RetryPolicy,
) -> Result<Vec<(ItemId, f64)>, LlmError> {
    let prefix = build_prefix(variant, profile, exemplars, catalog)?;
    let titles: Vec<&str> = candidates
        .iter()
        .map(|id| catalog.title(id).ok_or_else(|| LlmError::UnknownItem(id.clone())))
        .collect::<Result<_, _>>()?;
    let mut unique: Vec<&str> = titles.clone();
    unique.sort_unstable();
    unique.dedup();
    let scores: Vec<f64> = unique
        .par_iter()
        .map(|suffix| {
            with_retries(backend, &prefix, suffix, policy).map_err(|(e, attempts)| LlmError::Backend {
                suffix: suffix.to_string(),
                attempts,
                message: e.message,
            })
        })
        .collect::<Result<_, _>>()?;
    let by_title: BTreeMap<&str, f64> = unique.into_iter().zip(scores).collect();
    Ok(candidates
        .iter()
        .zip(titles)
        .map(|(id, t)| (id.clone(), by_title[t]))
        .collect())
}

/// Descending score, ties by ascending item id.
pub fn rank(scored: &[(ItemId, f64)]) -> Vec<ItemId> {
    rank_by_score(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::RaterId;
    use crate::llm::{MockBackend, PromptSource, PromptStyle};
    use parking_lot::Mutex;
    use std::collections::HashMap;

    fn ids(v: &[&str]) -> Vec<ItemId> {
        v.iter().map(|s| ItemId::new(*s)).collect()
    }

    fn setup() -> (ItemCatalog, RaterProfile) {
        let rows = [
            ("a", "Laugh Riot"),
            ("b", "Space Wars"),
            ("c", "Comedy Gold"),
            ("d", "Dark Alley"),
            ("e", "Quiet Meadow"),
            ("x", "Comedy Gold"),
            ("y", "Cosmic Laugh"),
        ];
        let cat = ItemCatalog::from_rows(
            rows.iter()
                .enumerate()
                .map(|(i, (id, t))| (ItemId::new(*id), t.to_string(), 10 - i as u64)),
        )
        .unwrap();
        let mut p = RaterProfile::new(RaterId::new("r"));
        p.desc_pos = "I enjoy comedy and a good laugh".into();
        p.liked_items = ids(&["a", "b", "c", "d", "e"]);
        (cat, p)
    }

    fn variant() -> PromptVariant {
        PromptVariant::new(PromptSource::Language, PromptStyle::ZeroShot, false).unwrap()
    }

    #[test]
    fn mock_scores_in_input_order() {
        let (cat, p) = setup();
        let cands = ids(&["y", "x", "c", "d"]);
        let s = score_candidates(&MockBackend::default(), variant(), &p, &[], &cands, &cat, RetryPolicy::default())
            .unwrap();
        let got: Vec<_> = s.iter().map(|(i, _)| i.as_str()).collect();
        assert_eq!(got, ["y", "x", "c", "d"]);
        // prefix content tokens: describe enjoy comedy good laugh follows
        assert_eq!(s[0].1, 1.0 - 0.01 * 2.0);
        assert_eq!(s[1].1, s[2].1);
        assert_eq!(s[3].1, -0.01 * 2.0);
        assert_eq!(rank(&s), ids(&["c", "x", "y", "d"]));
    }

    #[test]
    fn rank_rules() {
        let s = vec![(ItemId::new("i1"), -5.0), (ItemId::new("i2"), -2.0)];
        assert_eq!(rank(&s), ids(&["i2", "i1"]));
        let tie = vec![(ItemId::new("b"), 1.0), (ItemId::new("a"), 1.0)];
        assert_eq!(rank(&tie), ids(&["a", "b"]));
        let shifted: Vec<_> = s.iter().map(|(i, v)| (i.clone(), 3.0 * v + 7.0)).collect();
        assert_eq!(rank(&shifted), rank(&s));
    }

    struct Flaky {
        failures: Mutex<HashMap<String, u32>>,
        fail_times: u32,
        retriable: bool,
    }

    impl ScoreBackend for Flaky {
        fn model_id(&self) -> &str {
            "flaky"
        }
        fn log_likelihood(&self, _: &str, suffix: &str) -> Result<f64, BackendError> {
            let mut f = self.failures.lock();
            let n = f.entry(suffix.to_string()).or_default();
            if *n < self.fail_times {
                *n += 1;
                return Err(BackendError {
                    message: "busy".into(),
                    retriable: self.retriable,
                });
            }
            Ok(-1.0)
        }
    }

    fn fast(max_retries: u32) -> RetryPolicy {
        RetryPolicy {
            max_retries,
            backoff: Duration::ZERO,
        }
    }

    #[test]
    fn transient_errors_are_retried() {
        let (cat, p) = setup();
        let b = Flaky {
            failures: Mutex::new(HashMap::new()),
            fail_times: 2,
            retriable: true,
        };
        let s = score_candidates(&b, variant(), &p, &[], &ids(&["a", "b"]), &cat, fast(2)).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn exhausted_retries_fail_whole_call() {
        let (cat, p) = setup();
        let b = Flaky {
            failures: Mutex::new(HashMap::new()),
            fail_times: 5,
            retriable: true,
        };
        let err = score_candidates(&b, variant(), &p, &[], &ids(&["a"]), &cat, fast(2)).unwrap_err();
        assert!(matches!(err, LlmError::Backend { attempts: 3, .. }), "{err:?}");
    }

    #[test]
    fn fatal_errors_are_not_retried() {
        let (cat, p) = setup();
        let b = Flaky {
            failures: Mutex::new(HashMap::new()),
            fail_times: 1,
            retriable: false,
        };
        let err = score_candidates(&b, variant(), &p, &[], &ids(&["a"]), &cat, fast(5)).unwrap_err();
        assert!(matches!(err, LlmError::Backend { attempts: 1, .. }));
    }
}
