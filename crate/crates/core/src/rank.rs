//! Attribute queries over the negative-review partition.
//!
//! Two engines share one interface: the embedding ranker scores every review
//! by `c_s * e_c` (attribute similarity times emotion reward), and the BM25
//! baseline scores reviews that share at least one term with the attribute.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bm25::{Bm25Params, InvertedIndex};
use crate::embedding::{cosine, mean_vector, EmbeddingTable};
use crate::error::{Error, Result};
use crate::lexicon::{polarity, EmotionLexicon, PolarityScore};
use crate::review::Review;
use crate::reward::{reward, RewardVariant};
use crate::text::Pipeline;

/// A ranking method: the BM25 baseline or embedding similarity with one of
/// the reward variants (`Embed(None)` is plain similarity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodId {
    Bm25,
    Embed(RewardVariant),
}

impl MethodId {
    /// BM25, plain embedding, then the four reward variants.
    pub const ALL: [MethodId; 6] = [
        MethodId::Bm25,
        MethodId::Embed(RewardVariant::None),
        MethodId::Embed(RewardVariant::Sigmoid),
        MethodId::Embed(RewardVariant::ISigmoid),
        MethodId::Embed(RewardVariant::MSigmoid),
        MethodId::Embed(RewardVariant::IMSigmoid),
    ];

    /// Canonical machine name: `bm25`, `embed`, `embed_sigmoid`, ...
    pub fn name(self) -> String {
        match self {
            MethodId::Bm25 => "bm25".to_string(),
            MethodId::Embed(RewardVariant::None) => "embed".to_string(),
            MethodId::Embed(v) => format!("embed_{}", v.name()),
        }
    }

    /// Row label for report tables; `model` names the embedding, e.g.
    /// `GloVe` gives `GloVe_Sigmoid`.
    pub fn label(self, model: &str) -> String {
        match self {
            MethodId::Bm25 => "BM25".to_string(),
            MethodId::Embed(RewardVariant::None) => model.to_string(),
            MethodId::Embed(v) => format!("{model}_{}", v.label()),
        }
    }

    pub fn variant(self) -> Option<RewardVariant> {
        match self {
            MethodId::Bm25 => None,
            MethodId::Embed(v) => Some(v),
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    /// Accepts `bm25`, `embed`/`glove`/`word2vec` (optionally suffixed with
    /// `_<variant>` or `-<variant>`), or a bare variant name. Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('-', "_");
        if lower == "bm25" {
            return Ok(MethodId::Bm25);
        }
        let unknown = || Error::UnknownMethod(s.to_string());
        let rest = ["embed", "glove", "word2vec"]
            .iter()
            .find_map(|p| lower.strip_prefix(p))
            .map(|r| r.strip_prefix('_').unwrap_or(r));
        let variant = match rest {
            Some("") => RewardVariant::None,
            Some(v) => v.parse().map_err(|_| unknown())?,
            None => lower.parse().map_err(|_| unknown())?,
        };
        Ok(MethodId::Embed(variant))
    }
}

impl Serialize for MethodId {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for MethodId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = <String as Deserialize>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rank score `r_s = c_s * e_c`.
#[inline]
pub fn rank_score(c_s: f64, e_c: f64) -> f64 {
    c_s * e_c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub review_id: String,
    pub score: f64,
    /// Similarity, polarity and reward; absent for BM25.
    pub c_s: Option<f64>,
    pub e_n: Option<f64>,
    pub e_c: Option<f64>,
}

/// Results of one (attribute, method) query, best first. Equal scores are
/// ordered by ascending review id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub attribute: Vec<String>,
    pub method: MethodId,
    pub entries: Vec<RankedEntry>,
    /// Reviews left out because none of their tokens has a vector.
    pub excluded: usize,
}

impl RankedList {
    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.review_id.as_str()).collect()
    }

    pub fn top(&self) -> Option<&RankedEntry> {
        self.entries.first()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn by_score_then_id(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.review_id.cmp(&b.review_id))
}

/// Everything a query may need. Only the stores a method uses must be set.
#[derive(Debug, Clone, Copy)]
pub struct Stores<'a> {
    /// The negative (score 1) partition.
    pub reviews: &'a [Review],
    pub index: Option<&'a InvertedIndex>,
    pub table: Option<&'a EmbeddingTable>,
    pub lexicon: Option<&'a EmotionLexicon>,
    pub bm25: Bm25Params,
}

impl<'a> Stores<'a> {
    pub fn new(reviews: &'a [Review]) -> Self {
        Stores { reviews, index: None, table: None, lexicon: None, bm25: Bm25Params::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Query<'q> {
    pub attribute: &'q [String],
    pub method: MethodId,
    pub k: usize,
    /// Restricts candidates to one product category.
    pub category: Option<&'q str>,
}

/// Answers attribute queries. Review mean vectors and polarities are computed
/// once at construction; queries are read-only.
#[derive(Debug)]
pub struct Ranker<'a> {
    stores: Stores<'a>,
    review_means: Vec<Option<Vec<f64>>>,
    polarities: Vec<Option<PolarityScore>>,
    by_id: BTreeMap<&'a str, usize>,
}

impl<'a> Ranker<'a> {
    pub fn new(stores: Stores<'a>) -> Result<Self> {
        stores.bm25.validate()?;
        let mut by_id = BTreeMap::new();
        for (i, r) in stores.reviews.iter().enumerate() {
            if by_id.insert(r.id.as_str(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        let review_means = match stores.table {
            Some(table) => stores
                .reviews
                .iter()
                .map(|r| mean_vector(&r.tokens, table).ok().map(|m| m.vector))
                .collect(),
            None => Vec::new(),
        };
        let polarities = stores.reviews.iter().map(|r| stores.lexicon.map(|lex| polarity(&r.tokens, lex))).collect();
        Ok(Ranker { stores, review_means, polarities, by_id })
    }

    pub fn stores(&self) -> &Stores<'a> {
        &self.stores
    }

    pub fn review(&self, id: &str) -> Option<&'a Review> {
        self.by_id.get(id).map(|&i| &self.stores.reviews[i])
    }

    /// Tokenizes a raw attribute string with `pipeline`, then ranks.
    pub fn rank_raw(
        &self,
        attribute: &str,
        pipeline: &Pipeline,
        method: MethodId,
        k: usize,
        category: Option<&str>,
    ) -> Result<RankedList> {
        let tokens = pipeline.tokens_of(attribute);
        self.rank(&Query { attribute: &tokens, method, k, category })
    }

    pub fn rank(&self, query: &Query<'_>) -> Result<RankedList> {
        if query.attribute.is_empty() {
            return Err(Error::invalid("attribute", "has no tokens after cleaning"));
        }
        let (mut entries, excluded) = match query.method {
            MethodId::Bm25 => (self.bm25_entries(query)?, 0),
            MethodId::Embed(variant) => self.embed_entries(query, variant)?,
        };
        entries.sort_by(by_score_then_id);
        entries.truncate(query.k);
        Ok(RankedList { attribute: query.attribute.to_vec(), method: query.method, entries, excluded })
    }

    fn in_category(&self, review_id: &str, category: Option<&str>) -> bool {
        match category {
            None => true,
            Some(c) => self.review(review_id).is_some_and(|r| r.category == c),
        }
    }

    fn bm25_entries(&self, query: &Query<'_>) -> Result<Vec<RankedEntry>> {
        let index = self.stores.index.ok_or(Error::MissingStore("BM25 index"))?;
        let scores = index.score_matching(query.attribute, &self.stores.bm25);
        Ok(scores
            .into_iter()
            .map(|(doc, score)| (&index.docs()[doc as usize].id, score))
            .filter(|(id, _)| self.in_category(id, query.category))
            .map(|(id, score)| RankedEntry { review_id: id.clone(), score, c_s: None, e_n: None, e_c: None })
            .collect())
    }

    fn attribute_vector(&self, attribute: &[String]) -> Result<Vec<f64>> {
        let table = self.stores.table.ok_or(Error::MissingStore("embedding table"))?;
        Ok(mean_vector(attribute, table)?.vector)
    }

    /// Similarity, polarity and reward for one review; `None` when the review
    /// has no usable vector.
    fn embed_entry(&self, i: usize, attr: &[f64], variant: RewardVariant) -> Result<Option<RankedEntry>> {
        let Some(review_vec) = self.review_means[i].as_deref() else {
            return Ok(None);
        };
        let c_s = match cosine(attr, review_vec) {
            Ok(c) => c,
            Err(Error::DegenerateVector) => return Ok(None),
            Err(e) => return Err(e),
        };
        let e_n = self.polarities[i].map(|p| p.e_n);
        let e_c = match (variant, e_n) {
            (RewardVariant::None, _) => 1.0,
            (v, Some(e)) => reward(e, v)?,
            (_, None) => return Err(Error::MissingStore("emotion lexicon")),
        };
        Ok(Some(RankedEntry {
            review_id: self.stores.reviews[i].id.clone(),
            score: rank_score(c_s, e_c),
            c_s: Some(c_s),
            e_n,
            e_c: Some(e_c),
        }))
    }

    fn embed_entries(&self, query: &Query<'_>, variant: RewardVariant) -> Result<(Vec<RankedEntry>, usize)> {
        if variant != RewardVariant::None && self.stores.lexicon.is_none() {
            return Err(Error::MissingStore("emotion lexicon"));
        }
        let attr = self.attribute_vector(query.attribute)?;
        if attr.iter().all(|&x| x == 0.0) {
            return Err(Error::DegenerateVector);
        }
        let mut entries = Vec::new();
        let mut excluded = 0;
        for (i, review) in self.stores.reviews.iter().enumerate() {
            if query.category.is_some_and(|c| c != review.category) {
                continue;
            }
            match self.embed_entry(i, &attr, variant)? {
                Some(e) => entries.push(e),
                None => excluded += 1,
            }
        }
        Ok((entries, excluded))
    }

    /// Orders the given reviews by the method's score, best first. Reviews the
    /// method cannot score (no term match for BM25, no vector for embedding
    /// methods) go last, ordered by id.
    pub fn order_subset(&self, attribute: &[String], method: MethodId, ids: &[String]) -> Result<Vec<String>> {
        if attribute.is_empty() {
            return Err(Error::invalid("attribute", "has no tokens after cleaning"));
        }
        let mut scored: Vec<RankedEntry> = Vec::with_capacity(ids.len());
        let attr = match method {
            MethodId::Embed(_) => Some(self.attribute_vector(attribute)?),
            MethodId::Bm25 => None,
        };
        for id in ids {
            let score = match method {
                MethodId::Bm25 => {
                    let index = self.stores.index.ok_or(Error::MissingStore("BM25 index"))?;
                    let s = index.score(attribute, id, &self.stores.bm25)?;
                    if s > 0.0 { s } else { f64::NEG_INFINITY }
                }
                MethodId::Embed(variant) => {
                    let i = *self.by_id.get(id.as_str()).ok_or_else(|| Error::UnknownReview(id.clone()))?;
                    let attr = attr.as_deref().expect("computed for embedding methods");
                    self.embed_entry(i, attr, variant)?.map_or(f64::NEG_INFINITY, |e| e.score)
                }
            };
            scored.push(RankedEntry { review_id: id.clone(), score, c_s: None, e_n: None, e_c: None });
        }
        scored.sort_by(by_score_then_id);
        Ok(scored.into_iter().map(|e| e.review_id).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const TOL: f64 = 1e-8;

    fn review(id: &str, category: &str, tokens: &[&str]) -> Review {
        Review {
            id: id.into(),
            product_id: "p".into(),
            category: category.into(),
            score: 1,
            raw_text: tokens.join(" "),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn attr(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    /// A: c_s = 0.9 and one negative word; B: c_s = 0.8 and no emotion words.
    /// Emotion words have no vectors so they do not move the mean.
    fn worked_fixture() -> (Vec<Review>, EmbeddingTable, EmotionLexicon) {
        let mut table = EmbeddingTable::new(2).unwrap();
        table.insert("quality", &[1.0, 0.0]).unwrap();
        table.insert("flimsy", &[0.9, libm::sqrt(1.0 - 0.81)]).unwrap();
        table.insert("plastic", &[0.8, 0.6]).unwrap();
        let lex = EmotionLexicon::from_seeds(["nice"], ["terrible"]).unwrap();
        let reviews = vec![review("A", "phone", &["flimsy", "terrible"]), review("B", "phone", &["plastic"])];
        (reviews, table, lex)
    }

    fn ranker<'a>(reviews: &'a [Review], table: &'a EmbeddingTable, lex: &'a EmotionLexicon) -> Ranker<'a> {
        Ranker::new(Stores { table: Some(table), lexicon: Some(lex), ..Stores::new(reviews) }).unwrap()
    }

    #[test]
    fn rank_score_examples() {
        assert_eq!(rank_score(0.0, 0.73), 0.0);
        assert!((rank_score(0.8, 0.5) - 0.4).abs() < 1e-15);
        assert_eq!(rank_score(-0.3, 1.0), -0.3);
    }

    #[test]
    fn worked_fixture_sigmoid_prefers_neutral() {
        let (reviews, table, lex) = worked_fixture();
        let r = ranker(&reviews, &table, &lex);
        let q = attr(&["quality"]);
        let list = r.rank(&Query { attribute: &q, method: MethodId::Embed(RewardVariant::Sigmoid), k: 10, category: None }).unwrap();
        assert_eq!(list.ids(), vec!["B", "A"]);
        let b = &list.entries[0];
        assert!((b.score - 0.4).abs() < TOL);
        assert_eq!(b.e_n, Some(0.0));
        let a = &list.entries[1];
        assert!((a.c_s.unwrap() - 0.9).abs() < TOL);
        assert_eq!(a.e_n, Some(-1.0));
        assert!((a.score - 0.9 * 0.268_941_421_369_995_1).abs() < TOL);
    }

    #[test]
    fn worked_fixture_imsigmoid_prefers_polarized() {
        let (reviews, table, lex) = worked_fixture();
        let r = ranker(&reviews, &table, &lex);
        let q = attr(&["quality"]);
        let list = r.rank(&Query { attribute: &q, method: MethodId::Embed(RewardVariant::IMSigmoid), k: 10, category: None }).unwrap();
        assert_eq!(list.ids(), vec!["A", "B"]);
        assert!((list.entries[0].score - 0.9 * 0.731_058_578_630_004_9).abs() < TOL);
        let plain = r.rank(&Query { attribute: &q, method: MethodId::Embed(RewardVariant::None), k: 10, category: None }).unwrap();
        assert_eq!(plain.ids(), vec!["A", "B"]);
        assert_eq!(plain.entries[0].e_c, Some(1.0));
    }

    #[test]
    fn oov_reviews_excluded_and_oov_attribute_errors() {
        let (mut reviews, table, lex) = worked_fixture();
        reviews.push(review("C", "phone", &["terrible", "unknown"]));
        let r = ranker(&reviews, &table, &lex);
        let q = attr(&["quality"]);
        let list = r.rank(&Query { attribute: &q, method: MethodId::Embed(RewardVariant::Sigmoid), k: 10, category: None }).unwrap();
        assert_eq!(list.excluded, 1);
        assert_eq!(list.len(), 2);
        let oov = attr(&["nothing"]);
        let err = r.rank(&Query { attribute: &oov, method: MethodId::Embed(RewardVariant::Sigmoid), k: 10, category: None });
        assert_eq!(err.unwrap_err(), Error::NoRepresentation);
    }

    #[test]
    fn k_zero_and_prefix_consistency() {
        let (reviews, table, lex) = worked_fixture();
        let r = ranker(&reviews, &table, &lex);
        let q = attr(&["quality"]);
        let m = MethodId::Embed(RewardVariant::MSigmoid);
        assert!(r.rank(&Query { attribute: &q, method: m, k: 0, category: None }).unwrap().is_empty());
        let full = r.rank(&Query { attribute: &q, method: m, k: 2, category: None }).unwrap();
        let one = r.rank(&Query { attribute: &q, method: m, k: 1, category: None }).unwrap();
        assert_eq!(one.entries[..], full.entries[..1]);
    }

    #[test]
    fn bm25_engine_and_category_filter() {
        let reviews = vec![
            review("1", "phone", &["battery", "battery", "hot"]),
            review("2", "laptop", &["battery", "fan"]),
            review("3", "phone", &["screen"]),
        ];
        let index = InvertedIndex::build(reviews.iter().map(|r| (r.id.as_str(), r.tokens.as_slice()))).unwrap();
        let r = Ranker::new(Stores { index: Some(&index), ..Stores::new(&reviews) }).unwrap();
        let q = attr(&["battery"]);
        let list = r.rank(&Query { attribute: &q, method: MethodId::Bm25, k: 10, category: None }).unwrap();
        assert_eq!(list.ids(), vec!["1", "2"]);
        assert!(list.entries.iter().all(|e| e.c_s.is_none() && e.e_c.is_none()));
        let phone = r.rank(&Query { attribute: &q, method: MethodId::Bm25, k: 10, category: Some("phone") }).unwrap();
        assert_eq!(phone.ids(), vec!["1"]);
        let order = r.order_subset(&q, MethodId::Bm25, &attr(&["3", "2", "1"])).unwrap();
        assert_eq!(order, attr(&["1", "2", "3"]));
    }

    #[test]
    fn missing_stores_reported() {
        let reviews = vec![review("1", "phone", &["a"])];
        let r = Ranker::new(Stores::new(&reviews)).unwrap();
        let q = attr(&["a"]);
        assert_eq!(
            r.rank(&Query { attribute: &q, method: MethodId::Bm25, k: 1, category: None }).unwrap_err(),
            Error::MissingStore("BM25 index")
        );
        assert_eq!(
            r.rank(&Query { attribute: &q, method: MethodId::Embed(RewardVariant::Sigmoid), k: 1, category: None }).unwrap_err(),
            Error::MissingStore("emotion lexicon")
        );
        assert!(r.rank(&Query { attribute: &[], method: MethodId::Bm25, k: 1, category: None }).is_err());
    }

    #[test]
    fn method_names() {
        for m in MethodId::ALL {
            assert_eq!(m.name().parse::<MethodId>().unwrap(), m);
        }
        assert_eq!("GloVe_Sigmoid".parse::<MethodId>().unwrap(), MethodId::Embed(RewardVariant::Sigmoid));
        assert_eq!("glove".parse::<MethodId>().unwrap(), MethodId::Embed(RewardVariant::None));
        assert_eq!("imsigmoid".parse::<MethodId>().unwrap(), MethodId::Embed(RewardVariant::IMSigmoid));
        assert_eq!("embed-isigmoid".parse::<MethodId>().unwrap(), MethodId::Embed(RewardVariant::ISigmoid));
        assert_eq!("BM25".parse::<MethodId>().unwrap(), MethodId::Bm25);
        assert!("tfidf".parse::<MethodId>().is_err());
        assert!("embed_tanh".parse::<MethodId>().is_err());
        assert_eq!(MethodId::Embed(RewardVariant::IMSigmoid).label("GloVe"), "GloVe_imSigmoid");
        assert_eq!(MethodId::Embed(RewardVariant::None).label("GloVe"), "GloVe");
    }
}
