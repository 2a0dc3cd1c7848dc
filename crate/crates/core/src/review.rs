//! Review records and corpus bookkeeping.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::text::Pipeline;

/// Rating that marks a review as negative.
pub const NEGATIVE_SCORE: u8 = 1;

/// One consumer review.
///
/// `tokens` stays empty until the review has gone through a [`Pipeline`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub product_id: String,
    pub category: String,
    pub score: u8,
    #[serde(rename = "text")]
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tokens: Vec<String>,
}

impl Review {
    pub fn is_negative(&self) -> bool {
        self.score == NEGATIVE_SCORE
    }

    pub fn has_valid_score(&self) -> bool {
        (1..=5).contains(&self.score)
    }
}

/// Counters reported by ingestion.
///
/// `total_ingested = kept + dropped_short + dropped_nonnegative` always
/// holds. Reviews rated above 1 are counted as `dropped_nonnegative` even
/// though the long-enough ones are retained in the auxiliary partition
/// (`auxiliary`) for lexicon induction. Malformed lines never enter the
/// total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_ingested: u64,
    pub kept: u64,
    pub dropped_short: u64,
    pub dropped_nonnegative: u64,
    pub auxiliary: u64,
    pub malformed: u64,
}

impl CorpusStats {
    pub fn is_balanced(&self) -> bool {
        self.total_ingested == self.kept + self.dropped_short + self.dropped_nonnegative
    }

    pub fn record(&mut self, outcome: &Outcome) {
        self.total_ingested += 1;
        match outcome {
            Outcome::Kept => self.kept += 1,
            Outcome::DroppedShort => self.dropped_short += 1,
            Outcome::NonNegative { retained } => {
                self.dropped_nonnegative += 1;
                if *retained {
                    self.auxiliary += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &CorpusStats) {
        self.total_ingested += other.total_ingested;
        self.kept += other.kept;
        self.dropped_short += other.dropped_short;
        self.dropped_nonnegative += other.dropped_nonnegative;
        self.auxiliary += other.auxiliary;
        self.malformed += other.malformed;
    }
}

/// What happened to one review during ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Negative and long enough: goes to the ranking partition.
    Kept,
    /// Negative but shorter than the minimum length.
    DroppedShort,
    /// Rated above 1. `retained` when it still passes the length filter and
    /// is kept for lexicon induction.
    NonNegative { retained: bool },
}

impl Outcome {
    pub fn is_stored(&self) -> bool {
        matches!(self, Outcome::Kept | Outcome::NonNegative { retained: true })
    }
}

/// Cleans and tokenizes `review` in place and classifies it.
pub fn process_review(review: &mut Review, pipeline: &Pipeline) -> Outcome {
    review.tokens = pipeline.tokens_of(&review.raw_text);
    let long_enough = pipeline.keeps(&review.tokens);
    if !review.is_negative() {
        Outcome::NonNegative { retained: long_enough }
    } else if long_enough {
        Outcome::Kept
    } else {
        Outcome::DroppedShort
    }
}

/// The cleaned corpus, split into the ranking partition (score 1) and the
/// auxiliary partition (everything else) used by lexicon induction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub negative: Vec<Review>,
    pub auxiliary: Vec<Review>,
}

impl Corpus {
    pub fn from_reviews(reviews: impl IntoIterator<Item = Review>) -> Self {
        let mut corpus = Corpus::default();
        for review in reviews {
            corpus.push(review);
        }
        corpus
    }

    pub fn push(&mut self, review: Review) {
        if review.is_negative() {
            self.negative.push(review);
        } else {
            self.auxiliary.push(review);
        }
    }

    pub fn len(&self) -> usize {
        self.negative.len() + self.auxiliary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every review, negative partition first.
    pub fn iter(&self) -> impl Iterator<Item = &Review> {
        self.negative.iter().chain(self.auxiliary.iter())
    }

    /// Reviews with the given score in either partition.
    pub fn with_score(&self, score: u8) -> impl Iterator<Item = &Review> {
        self.iter().filter(move |r| r.score == score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Pipeline;
    use alloc::string::ToString;

    fn review(id: &str, score: u8, text: &str) -> Review {
        Review {
            id: id.to_string(),
            product_id: "p".to_string(),
            category: "phone".to_string(),
            score,
            raw_text: text.to_string(),
            tokens: Vec::new(),
        }
    }

    #[test]
    fn classification_and_stats() {
        let pipeline = Pipeline::default();
        let mut stats = CorpusStats::default();
        let cases = [
            (review("a", 1, "one two three four five"), Outcome::Kept),
            (review("b", 1, "one two three four"), Outcome::DroppedShort),
            (review("c", 5, "one two three four five"), Outcome::NonNegative { retained: true }),
            (review("d", 3, "short"), Outcome::NonNegative { retained: false }),
        ];
        for (mut r, expected) in cases {
            let got = process_review(&mut r, &pipeline);
            assert_eq!(got, expected, "review {}", r.id);
            stats.record(&got);
        }
        assert_eq!(stats.total_ingested, 4);
        assert_eq!(stats.kept, 1);
        assert_eq!(stats.dropped_short, 1);
        assert_eq!(stats.dropped_nonnegative, 2);
        assert_eq!(stats.auxiliary, 1);
        assert!(stats.is_balanced());
    }

    #[test]
    fn corpus_partitions_by_score() {
        let corpus = Corpus::from_reviews([review("a", 1, ""), review("b", 5, ""), review("c", 1, "")]);
        assert_eq!(corpus.negative.len(), 2);
        assert_eq!(corpus.auxiliary.len(), 1);
        assert_eq!(corpus.with_score(5).count(), 1);
    }
}
