//! Emotion lexicons: induction from seed words by co-occurrence ratios, and
//! the polarity score of a token list.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }

    /// Short form used in lexicon files.
    pub fn code(self) -> &'static str {
        match self {
            Side::Positive => "pos",
            Side::Negative => "neg",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pos" | "positive" | "+" => Ok(Side::Positive),
            "neg" | "negative" | "-" => Ok(Side::Negative),
            other => Err(Error::invalid("side", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Seed,
    Expanded,
    Imported,
}

impl Origin {
    pub fn name(self) -> &'static str {
        match self {
            Origin::Seed => "seed",
            Origin::Expanded => "expanded",
            Origin::Imported => "imported",
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "seed" => Ok(Origin::Seed),
            "expanded" => Ok(Origin::Expanded),
            "imported" => Ok(Origin::Imported),
            other => Err(Error::invalid("origin", other)),
        }
    }
}

/// How a word got into the lexicon. Expanded words always carry the ratio
/// they were admitted at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub origin: Origin,
    pub iteration: u32,
    pub ratio_at_admission: Option<f64>,
}

impl Provenance {
    pub const SEED: Provenance = Provenance { origin: Origin::Seed, iteration: 0, ratio_at_admission: None };
    pub const IMPORTED: Provenance =
        Provenance { origin: Origin::Imported, iteration: 0, ratio_at_admission: None };

    pub fn expanded(iteration: u32, ratio: f64) -> Self {
        Provenance { origin: Origin::Expanded, iteration, ratio_at_admission: Some(ratio) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub side: Side,
    pub provenance: Provenance,
}

/// Disjoint positive and negative word sets.
///
/// Each word maps to exactly one side, so the two sets can never overlap.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl EmotionLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a seed lexicon. A word listed on both sides is an error.
    pub fn from_seeds<P, N>(positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let mut lex = EmotionLexicon::new();
        for w in positive {
            lex.insert(w.into(), Side::Positive, Provenance::SEED)?;
        }
        for w in negative {
            lex.insert(w.into(), Side::Negative, Provenance::SEED)?;
        }
        Ok(lex)
    }

    /// Adds `word` to `side`. Re-adding to the same side keeps the first
    /// provenance; adding to the other side fails.
    pub fn insert(&mut self, word: String, side: Side, provenance: Provenance) -> Result<()> {
        if provenance.origin == Origin::Expanded && provenance.ratio_at_admission.is_none() {
            return Err(Error::invalid("provenance", "expanded word without admission ratio"));
        }
        match self.entries.get(&word) {
            Some(e) if e.side != side => Err(Error::OverlappingSeeds(word)),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(word, LexiconEntry { side, provenance });
                Ok(())
            }
        }
    }

    pub fn side_of(&self, word: &str) -> Option<Side> {
        self.entries.get(word).map(|e| e.side)
    }

    pub fn entry(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn words(&self, side: Side) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(move |(_, e)| e.side == side).map(|(w, _)| w.as_str())
    }

    pub fn positive(&self) -> impl Iterator<Item = &str> {
        self.words(Side::Positive)
    }

    pub fn negative(&self) -> impl Iterator<Item = &str> {
        self.words(Side::Negative)
    }

    pub fn count(&self, side: Side) -> usize {
        self.words(side).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LexiconEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }

    /// The same lexicon with positive and negative exchanged.
    pub fn swapped(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(w, e)| (w.clone(), LexiconEntry { side: e.side.opposite(), ..*e }))
            .collect();
        EmotionLexicon { entries }
    }

    /// Whether every word of `other` is in `self` on the same side.
    pub fn includes(&self, other: &EmotionLexicon) -> bool {
        other.iter().all(|(w, e)| self.side_of(w) == Some(e.side))
    }
}

/// Co-occurrence counts of one candidate word with the current seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateStats {
    pub word: String,
    /// Co-occurrences with negative seeds.
    pub n_n: u64,
    /// Co-occurrences with positive seeds.
    pub n_p: u64,
}

impl CandidateStats {
    pub fn new(word: impl Into<String>, n_n: u64, n_p: u64) -> Self {
        CandidateStats { word: word.into(), n_n, n_p }
    }

    fn counts(&self, side: Side) -> (u64, u64) {
        match side {
            Side::Negative => (self.n_n, self.n_p),
            Side::Positive => (self.n_p, self.n_n),
        }
    }
}

/// `(own + alpha) / (other + alpha)` for the requested side.
pub fn side_ratio(stats: &CandidateStats, side: Side, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", "smoothing must be a finite value >= 0"));
    }
    let (own, other) = stats.counts(side);
    let denominator = other as f64 + alpha;
    if denominator == 0.0 {
        return Err(Error::UndefinedRatio { word: stats.word.clone() });
    }
    Ok((own as f64 + alpha) / denominator)
}

/// Smoothed negative ratio `(n_n + alpha) / (n_p + alpha)`.
pub fn negative_ratio(stats: &CandidateStats, alpha: f64) -> Result<f64> {
    side_ratio(stats, Side::Negative, alpha)
}

/// Smoothed positive ratio `(n_p + alpha) / (n_n + alpha)`.
pub fn positive_ratio(stats: &CandidateStats, alpha: f64) -> Result<f64> {
    side_ratio(stats, Side::Positive, alpha)
}

/// Counts, for every word that is neither in `lexicon` nor in `skip`, its
/// review-level co-occurrences with the lexicon's negative and positive
/// words.
///
/// A (word, seed) pair contributes one per review in which both appear,
/// however often either is repeated. Words that never meet a seed are
/// omitted.
pub fn cooccurrence_counts<D, T>(
    docs: &[D],
    lexicon: &EmotionLexicon,
    skip: &BTreeSet<String>,
) -> BTreeMap<String, CandidateStats>
where
    D: AsRef<[T]>,
    T: AsRef<str>,
{
    let mut out: BTreeMap<String, CandidateStats> = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        let (mut neg, mut pos) = (0u64, 0u64);
        for w in &distinct {
            match lexicon.side_of(w) {
                Some(Side::Negative) => neg += 1,
                Some(Side::Positive) => pos += 1,
                None => {}
            }
        }
        if neg + pos == 0 {
            continue;
        }
        for w in distinct {
            if lexicon.contains(w) || skip.contains(w) {
                continue;
            }
            let entry = out
                .entry(w.to_string())
                .or_insert_with(|| CandidateStats::new(w, 0, 0));
            entry.n_n += neg;
            entry.n_p += pos;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpansionConfig {
    /// Auto mode admits a candidate once its ratio reaches this value.
    pub admit_threshold: f64,
    /// Candidates below this ratio are not considered at all; expansion stops
    /// when none is left above it.
    pub stop_threshold: f64,
    /// Additive smoothing for both ratios.
    pub alpha: f64,
    pub max_iterations: u32,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { admit_threshold: 2.0, stop_threshold: 1.2, alpha: 1.0, max_iterations: 10 }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", "must be a finite value >= 0"));
        }
        if self.stop_threshold.is_nan() || self.stop_threshold <= 0.0 {
            return Err(Error::invalid("stop_threshold", "must be > 0"));
        }
        if self.admit_threshold.is_nan() || self.admit_threshold < self.stop_threshold {
            return Err(Error::invalid("admit_threshold", "must be >= stop_threshold"));
        }
        Ok(())
    }
}

/// A word offered for admission to one side.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub side: Side,
    pub iteration: u32,
    pub ratio: f64,
    pub stats: CandidateStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Add to the side being expanded.
    Accept,
    /// Not a word for this side; never offered for it again.
    Reject,
    /// Marked not-seed; never offered for either side again.
    Defer,
    /// No decision; the word stays a candidate.
    Pass,
}

/// Decides on candidates, which arrive in descending ratio order.
pub trait Judge {
    fn judge(&mut self, candidate: &Candidate) -> Verdict;
}

/// Accepts every candidate whose ratio reaches the threshold and passes on
/// the rest.
#[derive(Debug, Clone, Copy)]
pub struct AutoJudge {
    pub admit_threshold: f64,
}

impl Judge for AutoJudge {
    fn judge(&mut self, candidate: &Candidate) -> Verdict {
        if candidate.ratio >= self.admit_threshold {
            Verdict::Accept
        } else {
            Verdict::Pass
        }
    }
}

impl<F: FnMut(&Candidate) -> Verdict> Judge for F {
    fn judge(&mut self, candidate: &Candidate) -> Verdict {
        self(candidate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub iteration: u32,
    pub side: Side,
    pub offered: usize,
    pub admitted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub lexicon: EmotionLexicon,
    pub iterations: u32,
    pub log: Vec<IterationLog>,
    /// Words excluded from each side by reject or defer verdicts.
    pub not_seed: BTreeMap<Side, BTreeSet<String>>,
}

/// Grows `seeds` by alternating negative and positive passes over `docs`.
///
/// Each pass recounts co-occurrences against the current lexicon, offers
/// every eligible candidate with ratio at or above `stop_threshold` to the
/// judge in descending ratio order (ties by word), and applies the verdicts.
/// Expansion ends when no candidate reaches `stop_threshold`, when an
/// iteration changes nothing, or after `max_iterations`.
///
/// With zero smoothing a word that meets only one side has an infinite ratio.
pub fn expand_lexicon<D, T>(
    docs: &[D],
    seeds: &EmotionLexicon,
    config: &ExpansionConfig,
    judge: &mut dyn Judge,
) -> Result<Expansion>
where
    D: AsRef<[T]>,
    T: AsRef<str>,
{
    config.validate()?;
    if docs.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    if seeds.count(Side::Positive) == 0 || seeds.count(Side::Negative) == 0 {
        return Err(Error::invalid("seeds", "both sides need at least one seed word"));
    }

    let mut lexicon = seeds.clone();
    let mut not_seed: BTreeMap<Side, BTreeSet<String>> = BTreeMap::new();
    not_seed.insert(Side::Negative, BTreeSet::new());
    not_seed.insert(Side::Positive, BTreeSet::new());
    let mut log = Vec::new();
    let mut iterations = 0;

    for iteration in 1..=config.max_iterations {
        iterations = iteration;
        let mut any_offered = false;
        let mut changed = false;

        for side in [Side::Negative, Side::Positive] {
            let counts = cooccurrence_counts(docs, &lexicon, &not_seed[&side]);
            let mut offered: Vec<Candidate> = Vec::new();
            for stats in counts.into_values() {
                let ratio = match side_ratio(&stats, side, config.alpha) {
                    Ok(r) => r,
                    Err(Error::UndefinedRatio { .. }) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                if ratio >= config.stop_threshold {
                    offered.push(Candidate { side, iteration, ratio, stats });
                }
            }
            offered.sort_by(|a, b| {
                b.ratio.partial_cmp(&a.ratio).unwrap_or(Ordering::Equal).then_with(|| a.stats.word.cmp(&b.stats.word))
            });

            let mut admitted = 0;
            for candidate in &offered {
                let word = &candidate.stats.word;
                match judge.judge(candidate) {
                    Verdict::Accept => {
                        lexicon.insert(word.clone(), side, Provenance::expanded(iteration, candidate.ratio))?;
                        admitted += 1;
                        changed = true;
                    }
                    Verdict::Reject => {
                        not_seed.get_mut(&side).expect("both sides present").insert(word.clone());
                        changed = true;
                    }
                    Verdict::Defer => {
                        for set in not_seed.values_mut() {
                            set.insert(word.clone());
                        }
                        changed = true;
                    }
                    Verdict::Pass => {}
                }
            }
            any_offered |= !offered.is_empty();
            log.push(IterationLog { iteration, side, offered: offered.len(), admitted });
        }

        if !any_offered || !changed {
            break;
        }
    }

    Ok(Expansion { lexicon, iterations, log, not_seed })
}

/// Positive/negative hit counts and the resulting emotion polarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityScore {
    pub p: u64,
    pub n: u64,
    /// `(p - n) / (p + n)`, or 0 when the review has no emotion words.
    pub e_n: f64,
}

impl PolarityScore {
    pub fn from_counts(p: u64, n: u64) -> Self {
        let e_n = if p + n == 0 { 0.0 } else { (p as f64 - n as f64) / (p + n) as f64 };
        PolarityScore { p, n, e_n }
    }
}

/// Emotion polarity of a token list. Repeated emotion words count each time.
pub fn polarity<T: AsRef<str>>(tokens: &[T], lexicon: &EmotionLexicon) -> PolarityScore {
    let (mut p, mut n) = (0, 0);
    for t in tokens {
        match lexicon.side_of(t.as_ref()) {
            Some(Side::Positive) => p += 1,
            Some(Side::Negative) => n += 1,
            None => {}
        }
    }
    PolarityScore::from_counts(p, n)
}
