use super::{tokenize, RetrievalError};
use crate::data::ReviewCorpus;
use crate::ids::ItemId;
use crate::ranking::compare_scored;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

const INDEX_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm25Index {
    params: Bm25Params,
    /// Sorted term dictionary; position is the term id.
    terms: Vec<String>,
    /// Per term: `(doc, tf)` sorted by doc.
    postings: Vec<Vec<(u32, u32)>>,
    review_ids: Vec<String>,
    review_items: Vec<ItemId>,
    lengths: Vec<u32>,
    avg_length: f64,
    #[serde(skip)]
    lookup: Lookup,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Lookup {
    term: HashMap<String, u32>,
    review: HashMap<String, u32>,
    item_docs: HashMap<ItemId, Vec<u32>>,
}

impl Bm25Index {
    pub fn build(corpus: &ReviewCorpus, params: Bm25Params) -> Result<Self, RetrievalError> {
        if corpus.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        if !(params.k1 >= 0.0 && (0.0..=1.0).contains(&params.b)) {
            return Err(RetrievalError::InvalidParams(format!("{params:?}")));
        }
        let mut dict: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
        let mut lengths = Vec::with_capacity(corpus.len());
        for (doc, review) in corpus.reviews().iter().enumerate() {
            let tokens = tokenize(&review.text);
            if tokens.is_empty() {
                return Err(RetrievalError::EmptyDocument(review.review_id.clone()));
            }
            lengths.push(tokens.len() as u32);
            let mut tf: BTreeMap<String, u32> = BTreeMap::new();
            for t in tokens {
                *tf.entry(t).or_default() += 1;
            }
            for (t, f) in tf {
                dict.entry(t).or_default().push((doc as u32, f));
            }
        }
        let (terms, postings): (Vec<String>, Vec<Vec<(u32, u32)>>) = dict.into_iter().unzip();
        let avg_length = lengths.iter().map(|&l| f64::from(l)).sum::<f64>() / lengths.len() as f64;
        let mut index = Bm25Index {
            params,
            terms,
            postings,
            review_ids: corpus.reviews().iter().map(|r| r.review_id.clone()).collect(),
            review_items: corpus.reviews().iter().map(|r| r.item_id.clone()).collect(),
            lengths,
            avg_length,
            lookup: Lookup::default(),
        };
        index.rebuild_lookup();
        Ok(index)
    }

    fn rebuild_lookup(&mut self) {
        let mut item_docs: HashMap<ItemId, Vec<u32>> = HashMap::new();
        for (d, item) in self.review_items.iter().enumerate() {
            item_docs.entry(item.clone()).or_default().push(d as u32);
        }
        self.lookup = Lookup {
            term: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i as u32))
                .collect(),
            review: self
                .review_ids
                .iter()
                .enumerate()
                .map(|(i, r)| (r.clone(), i as u32))
                .collect(),
            item_docs,
        };
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn num_docs(&self) -> usize {
        self.lengths.len()
    }

    pub fn avg_length(&self) -> f64 {
        self.avg_length
    }

    pub fn length(&self, doc: usize) -> u32 {
        self.lengths[doc]
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `(doc, tf)` list for a term, empty if the term is not indexed.
    pub fn postings(&self, term: &str) -> &[(u32, u32)] {
        match self.lookup.term.get(term) {
            Some(&t) => &self.postings[t as usize],
            None => &[],
        }
    }

    pub fn doc_frequency(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn review_id(&self, doc: usize) -> &str {
        &self.review_ids[doc]
    }

    pub fn item_of(&self, doc: usize) -> &ItemId {
        &self.review_items[doc]
    }

    pub fn docs_of(&self, item: &ItemId) -> &[u32] {
        self.lookup.item_docs.get(item).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
    pub fn idf(&self, df: usize) -> f64 {
        let n = self.num_docs() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn term_weight(&self, df: usize, tf: u32, doc: usize) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let len_norm = 1.0 - b + b * f64::from(self.lengths[doc]) / self.avg_length;
        self.idf(df) * tf * (k1 + 1.0) / (tf + k1 * len_norm)
    }

    /// Distinct indexed query terms with their multiplicity, in first-seen order.
    fn query_terms(&self, query: &str) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for tok in tokenize(query) {
            if let Some(&t) = self.lookup.term.get(&tok) {
                match out.iter_mut().find(|(id, _)| *id == t) {
                    Some(entry) => entry.1 += 1.0,
                    None => out.push((t, 1.0)),
                }
            }
        }
        out
    }

    /// BM25 of one review. Each query token occurrence contributes once.
    pub fn score(&self, query: &str, review_id: &str) -> Result<f64, RetrievalError> {
        let doc = *self
            .lookup
            .review
            .get(review_id)
            .ok_or_else(|| RetrievalError::UnknownReview(review_id.to_string()))?;
        let mut s = 0.0;
        for (t, mult) in self.query_terms(query) {
            let plist = &self.postings[t as usize];
            if let Ok(p) = plist.binary_search_by_key(&doc, |&(d, _)| d) {
                s += mult * self.term_weight(plist.len(), plist[p].1, doc as usize);
            }
        }
        Ok(s)
    }

    /// Scores every review at once; entry `d` is bitwise equal to
    /// `score(query, review_id(d))`.
    pub fn score_all(&self, query: &str) -> Vec<f64> {
        let mut acc = vec![0.0; self.num_docs()];
        for (t, mult) in self.query_terms(query) {
            let plist = &self.postings[t as usize];
            for &(doc, tf) in plist {
                acc[doc as usize] += mult * self.term_weight(plist.len(), tf, doc as usize);
            }
        }
        acc
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RetrievalError> {
        #[derive(Serialize)]
        struct FileRef<'a> {
            version: u32,
            index: &'a Bm25Index,
        }
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(
            &mut w,
            &FileRef {
                version: INDEX_FORMAT_VERSION,
                index: self,
            },
        )?;
        use std::io::Write;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RetrievalError> {
        #[derive(Deserialize)]
        struct File {
            version: u32,
            index: Bm25Index,
        }
        let f: File = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        if f.version != INDEX_FORMAT_VERSION {
            return Err(RetrievalError::Version {
                found: f.version,
                expected: INDEX_FORMAT_VERSION,
            });
        }
        let mut index = f.index;
        index.rebuild_lookup();
        Ok(index)
    }
}

/// Ranks candidates by their best review's BM25 against `query`, best first.
/// Items without reviews score `-inf` and sort last, ties by ascending id.
pub fn late_fusion_rank(index: &Bm25Index, query: &str, candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
    let per_doc = index.score_all(query);
    let mut out: Vec<(ItemId, f64)> = candidates
        .iter()
        .map(|item| {
            let best = index
                .docs_of(item)
                .iter()
                .map(|&d| per_doc[d as usize])
                .fold(f64::NEG_INFINITY, f64::max);
            (item.clone(), best)
        })
        .collect();
    out.sort_by(compare_scored);
    out
}
