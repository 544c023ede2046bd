use crate::data::ItemCatalog;
use crate::ids::ItemId;
use crate::retrieval::tokenize;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct BackendError {
    pub message: String,
    /// Worth trying again (timeouts, throttling, server errors).
    pub retriable: bool,
}

impl BackendError {
    pub fn transient(message: impl Into<String>) -> Self {
        BackendError {
            message: message.into(),
            retriable: true,
        }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        BackendError {
            message: message.into(),
            retriable: false,
        }
    }
}

/// Log-likelihood of `suffix` followed by end-of-string, given `prefix`.
pub trait ScoreBackend: Send + Sync {
    fn model_id(&self) -> &str;
    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError>;
}

impl<B: ScoreBackend + ?Sized> ScoreBackend for std::sync::Arc<B> {
    fn model_id(&self) -> &str {
        (**self).model_id()
    }
    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError> {
        (**self).log_likelihood(prefix, suffix)
    }
}

impl<B: ScoreBackend + ?Sized> ScoreBackend for Box<B> {
    fn model_id(&self) -> &str {
        (**self).model_id()
    }
    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError> {
        (**self).log_likelihood(prefix, suffix)
    }
}

const STOPWORDS: &[&str] = &[
    "a", "about", "also", "an", "and", "are", "as", "at", "be", "but", "by", "do", "for", "from", "i", "in", "is", "it",
    "its", "like", "me", "movie", "movies", "my", "not", "of", "on", "or", "that", "the", "then", "they", "this", "to",
    "with", "would", "you",
];

/// Lowercased tokens that are neither stopwords nor purely numeric.
pub fn content_tokens(text: &str) -> BTreeSet<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !STOPWORDS.contains(&t.as_str()) && !t.chars().all(|c| c.is_ascii_digit()))
        .collect()
}

/// Deterministic stand-in for a language model.
///
/// `log_likelihood = |C(prefix) ∩ (C(suffix) ∪ G(suffix))| − 0.01 · n(suffix)`
///
/// where `C` is [`content_tokens`], `n` counts all tokens of the suffix, and
/// `G` is the union of the planted genre keywords (lowercased) of every
/// catalog item whose title equals the suffix.
#[derive(Clone, Debug, Default)]
pub struct MockBackend {
    title_genres: HashMap<String, BTreeSet<String>>,
}

impl MockBackend {
    pub fn new(catalog: &ItemCatalog, genres: &BTreeMap<ItemId, Vec<String>>) -> Self {
        let mut title_genres: HashMap<String, BTreeSet<String>> = HashMap::new();
        for (id, gs) in genres {
            if let Some(title) = catalog.title(id) {
                title_genres
                    .entry(title.to_string())
                    .or_default()
                    .extend(gs.iter().flat_map(|g| tokenize(g)));
            }
        }
        MockBackend { title_genres }
    }

    pub fn score(&self, prefix: &str, suffix: &str) -> f64 {
        let p = content_tokens(prefix);
        let mut s = content_tokens(suffix);
        if let Some(g) = self.title_genres.get(suffix) {
            s.extend(g.iter().cloned());
        }
        let shared = p.intersection(&s).count() as f64;
        shared - 0.01 * tokenize(suffix).len() as f64
    }
}

impl ScoreBackend for MockBackend {
    fn model_id(&self) -> &str {
        "mock"
    }

    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError> {
        Ok(self.score(prefix, suffix))
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    model: String,
    prefix: String,
    suffix: String,
    log_likelihood: f64,
}

/// Memoizes another backend by `(model id, prefix, suffix)`. Errors are not
/// cached.
pub struct CachedBackend<B> {
    inner: B,
    cache: RwLock<HashMap<(String, String, String), f64>>,
}

impl<B: ScoreBackend> CachedBackend<B> {
    pub fn new(inner: B) -> Self {
        CachedBackend {
            inner,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }

    pub fn len(&self) -> usize {
        self.cache.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds entries from a JSONL cache file. A missing file is not an error.
    pub fn load(&self, path: impl AsRef<Path>) -> std::io::Result<usize> {
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut n = 0;
        let mut cache = self.cache.write();
        for line in BufReader::new(file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let l: CacheLine = serde_json::from_str(&line)?;
            cache.insert((l.model, l.prefix, l.suffix), l.log_likelihood);
            n += 1;
        }
        Ok(n)
    }

    /// Writes all entries, sorted by key so the file is reproducible.
    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let cache = self.cache.read();
        let mut keys: Vec<_> = cache.iter().collect();
        keys.sort_by(|a, b| a.0.cmp(b.0));
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        for ((model, prefix, suffix), ll) in keys {
            let line = CacheLine {
                model: model.clone(),
                prefix: prefix.clone(),
                suffix: suffix.clone(),
                log_likelihood: *ll,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }
}

impl<B: ScoreBackend> ScoreBackend for CachedBackend<B> {
    fn model_id(&self) -> &str {
        self.inner.model_id()
    }

    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError> {
        let key = (self.inner.model_id().to_string(), prefix.to_string(), suffix.to_string());
        if let Some(v) = self.cache.read().get(&key) {
            return Ok(*v);
        }
        let v = self.inner.log_likelihood(prefix, suffix)?;
        self.cache.write().insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn mock() -> MockBackend {
        MockBackend::default()
    }

    #[test]
    fn closed_form() {
        let m = mock();
        assert_eq!(m.score("I love a good comedy", "Comedy Nights"), 1.0 - 0.01 * 2.0);
        assert_eq!(m.score("space opera", "Comedy Nights (1999)"), -0.01 * 3.0);
        assert_eq!(m.score("x", "y"), m.score("x", "y"));
    }

    #[test]
    fn stopwords_and_numbers_do_not_match() {
        assert_eq!(mock().score("the 1999 movies", "The Movie (1999)"), -0.01 * 3.0);
    }

    #[test]
    fn planted_genres_expand_suffix() {
        let cat = ItemCatalog::from_rows([(ItemId::new("a"), "Nights".to_string(), 3)]).unwrap();
        let mut g = BTreeMap::new();
        g.insert(ItemId::new("a"), vec!["Comedy".to_string()]);
        let m = MockBackend::new(&cat, &g);
        assert_eq!(m.score("comedy nights", "Nights"), 2.0 - 0.01 * 1.0);
    }

    struct Counting(AtomicUsize);
    impl ScoreBackend for Counting {
        fn model_id(&self) -> &str {
            "count"
        }
        fn log_likelihood(&self, _: &str, suffix: &str) -> Result<f64, BackendError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(-(suffix.len() as f64))
        }
    }

    #[test]
    fn cache_hits_skip_backend_and_persist() {
        let c = CachedBackend::new(Counting(AtomicUsize::new(0)));
        assert_eq!(c.log_likelihood("p", "abc").unwrap(), -3.0);
        assert_eq!(c.log_likelihood("p", "abc").unwrap(), -3.0);
        assert_eq!(c.inner().0.load(Ordering::SeqCst), 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        c.save(&path).unwrap();
        let d = CachedBackend::new(Counting(AtomicUsize::new(0)));
        assert_eq!(d.load(&path).unwrap(), 1);
        assert_eq!(d.log_likelihood("p", "abc").unwrap(), -3.0);
        assert_eq!(d.inner().0.load(Ordering::SeqCst), 0);
        assert_eq!(d.load(dir.path().join("absent")).unwrap(), 0);
    }
}
