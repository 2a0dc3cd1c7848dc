//! Inverted index and Okapi BM25 scoring, used as the lexical baseline.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(Error::invalid("k1", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::invalid("b", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Position of the review in [`InvertedIndex::docs`].
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedDoc {
    pub id: String,
    pub len: u32,
}

/// Term postings over a set of reviews.
///
/// Documents are kept sorted by review id and every posting list is sorted by
/// document, so two indexes built from the same reviews are identical.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    docs: Vec<IndexedDoc>,
    lookup: BTreeMap<String, u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    avg_doc_len: f64,
}

impl InvertedIndex {
    /// Indexes `(review_id, tokens)` pairs.
    pub fn build<'a, I, T>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a [T])>,
        T: AsRef<str> + 'a,
    {
        let mut sorted: Vec<(&str, &[T])> = docs.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateId(w[0].0.to_string()));
        }
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut indexed = Vec::with_capacity(sorted.len());
        for (doc, (id, tokens)) in sorted.iter().enumerate() {
            let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
            for t in tokens.iter() {
                *tf.entry(t.as_ref()).or_default() += 1;
            }
            for (term, count) in tf {
                postings.entry(term.to_string()).or_default().push(Posting { doc: doc as u32, tf: count });
            }
            indexed.push(IndexedDoc { id: id.to_string(), len: tokens.len() as u32 });
        }
        Self::from_parts(indexed, postings)
    }

    /// Reassembles an index, checking every invariant. Documents must be in
    /// strictly ascending id order and postings sorted by document.
    pub fn from_parts(docs: Vec<IndexedDoc>, postings: BTreeMap<String, Vec<Posting>>) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::Empty("corpus"));
        }
        if let Some(w) = docs.windows(2).find(|w| w[0].id >= w[1].id) {
            return Err(Error::DuplicateId(w[1].id.clone()));
        }
        for (term, list) in &postings {
            let bad = list.is_empty()
                || list.iter().any(|p| p.doc as usize >= docs.len() || p.tf == 0)
                || list.windows(2).any(|w| w[0].doc >= w[1].doc);
            if bad {
                return Err(Error::invalid("postings", alloc::format!("corrupt posting list for `{term}`")));
            }
        }
        let total: u64 = docs.iter().map(|d| d.len as u64).sum();
        let avg_doc_len = total as f64 / docs.len() as f64;
        let lookup = docs.iter().enumerate().map(|(i, d)| (d.id.clone(), i as u32)).collect();
        Ok(InvertedIndex { docs, lookup, postings, avg_doc_len })
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn docs(&self) -> &[IndexedDoc] {
        &self.docs
    }

    pub fn doc_index(&self, review_id: &str) -> Option<u32> {
        self.lookup.get(review_id).copied()
    }

    pub fn doc_len(&self, review_id: &str) -> Option<u32> {
        self.doc_index(review_id).map(|d| self.docs[d as usize].len)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings.iter().map(|(t, p)| (t.as_str(), p.as_slice()))
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    /// `ln((N - df + 0.5) / (df + 0.5) + 1)`; always positive.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.doc_freq(term) as f64;
        libm::log((n - df + 0.5) / (df + 0.5) + 1.0)
    }

    fn term_weight(&self, term: &str, tf: u32, doc: u32, params: &Bm25Params) -> f64 {
        let tf = tf as f64;
        let len = self.docs[doc as usize].len as f64;
        let norm = params.k1 * (1.0 - params.b + params.b * len / self.avg_doc_len);
        self.idf(term) * tf * (params.k1 + 1.0) / (tf + norm)
    }

    fn tf(&self, term: &str, doc: u32) -> u32 {
        let list = self.postings(term);
        list.binary_search_by_key(&doc, |p| p.doc).map_or(0, |i| list[i].tf)
    }

    /// BM25 score of one review. Query terms are summed in order, so a
    /// repeated query term counts twice.
    pub fn score<T: AsRef<str>>(&self, query: &[T], review_id: &str, params: &Bm25Params) -> Result<f64> {
        let doc = self.doc_index(review_id).ok_or_else(|| Error::UnknownReview(review_id.to_string()))?;
        let mut total = 0.0;
        for term in query {
            let tf = self.tf(term.as_ref(), doc);
            if tf > 0 {
                total += self.term_weight(term.as_ref(), tf, doc, params);
            }
        }
        Ok(total)
    }

    /// Scores of every review containing at least one query term, by
    /// document position.
    pub fn score_matching<T: AsRef<str>>(&self, query: &[T], params: &Bm25Params) -> BTreeMap<u32, f64> {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for term in query {
            for p in self.postings(term.as_ref()) {
                *acc.entry(p.doc).or_default() += self.term_weight(term.as_ref(), p.tf, p.doc, params);
            }
        }
        acc
    }
}

/// BM25 score of `review_id` for `query`.
pub fn bm25_score<T: AsRef<str>>(
    query: &[T],
    review_id: &str,
    index: &InvertedIndex,
    params: &Bm25Params,
) -> Result<f64> {
    params.validate()?;
    index.score(query, review_id, params)
}
