//! Ranking-quality metrics against expert judgements, and the per-method
//! comparison report.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::{MethodId, Query, Ranker};
use crate::text::Pipeline;

fn distinct<S: AsRef<str>>(ids: &[S]) -> Option<BTreeSet<&str>> {
    let set: BTreeSet<&str> = ids.iter().map(AsRef::as_ref).collect();
    (set.len() == ids.len()).then_some(set)
}

/// Fraction of the gold top-`n` that also appears in the ranked top-`n`.
pub fn top_n_rate<G, R>(gold: &[G], ranked: &[R], n: usize) -> Result<f64>
where
    G: AsRef<str>,
    R: AsRef<str>,
{
    let max = gold.len().min(ranked.len());
    if n == 0 || n > max {
        return Err(Error::OutOfRange { name: "n", value: n, max });
    }
    let gold_top: BTreeSet<&str> = gold[..n].iter().map(AsRef::as_ref).collect();
    let hits = ranked[..n].iter().filter(|r| gold_top.contains(r.as_ref())).count();
    Ok(hits as f64 / n as f64)
}

/// Pairwise concordance: the fraction of unordered pairs that both lists put
/// in the same order. Equals `(tau + 1) / 2` for Kendall's tau.
pub fn average_correct_rate<G, R>(gold: &[G], ranked: &[R]) -> Result<f64>
where
    G: AsRef<str>,
    R: AsRef<str>,
{
    let gold_set = distinct(gold).ok_or(Error::SetMismatch)?;
    let ranked_set = distinct(ranked).ok_or(Error::SetMismatch)?;
    if gold_set != ranked_set {
        return Err(Error::SetMismatch);
    }
    let m = gold.len();
    if m < 2 {
        return Err(Error::TooFewItems(m));
    }
    let position: BTreeMap<&str, usize> = ranked.iter().enumerate().map(|(i, r)| (r.as_ref(), i)).collect();
    let pos: Vec<usize> = gold.iter().map(|g| position[g.as_ref()]).collect();
    let mut concordant = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            if pos[i] < pos[j] {
                concordant += 1;
            }
        }
    }
    let pairs = (m * (m - 1) / 2) as f64;
    Ok(concordant as f64 / pairs)
}

/// Merges several orderings by Borda count: an item at position `i` of a list
/// of length `L` earns `L - i` points; items are ordered by total points,
/// ties by id. Items missing from a list earn nothing from it.
pub fn borda_consensus<S: AsRef<str>>(orderings: &[Vec<S>]) -> Vec<String> {
    let mut points: BTreeMap<&str, u64> = BTreeMap::new();
    for list in orderings {
        let len = list.len() as u64;
        for (i, id) in list.iter().enumerate() {
            *points.entry(id.as_ref()).or_default() += len - i as u64;
        }
    }
    let mut ranked: Vec<(&str, u64)> = points.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().map(|(id, _)| id.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub attribute: String,
    pub annotator: String,
    pub review_id: String,
    pub helpful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldOrdering {
    pub attribute: String,
    pub annotator: String,
    pub review_ids: Vec<String>,
}

/// Expert helpfulness marks and optional gold orderings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    marks: BTreeMap<(String, String, String), bool>,
    gold: Vec<GoldOrdering>,
}

impl AnnotationSet {
    pub fn new(marks: Vec<Annotation>, gold: Vec<GoldOrdering>) -> Result<Self> {
        let mut set = AnnotationSet::default();
        for a in marks {
            let key = (a.attribute, a.review_id, a.annotator);
            if set.marks.contains_key(&key) {
                let (attribute, review_id, annotator) = key;
                return Err(Error::DuplicateAnnotation { attribute, annotator, review_id });
            }
            set.marks.insert(key, a.helpful);
        }
        for g in &gold {
            if distinct(&g.review_ids).is_none() {
                return Err(Error::invalid("gold ordering", format!("duplicate review in ({}, {})", g.attribute, g.annotator)));
            }
        }
        set.gold = gold;
        Ok(set)
    }

    pub fn mark_count(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty() && self.gold.is_empty()
    }

    /// `(annotator, helpful)` for every mark on this review under this attribute.
    pub fn marks_for<'s>(&'s self, attribute: &str, review_id: &str) -> impl Iterator<Item = (&'s str, bool)> + 's {
        let lo = (attribute.to_string(), review_id.to_string(), String::new());
        let (attribute, review_id) = (attribute.to_string(), review_id.to_string());
        self.marks
            .range(lo..)
            .take_while(move |((a, r, _), _)| *a == attribute && *r == review_id)
            .map(|((_, _, who), &h)| (who.as_str(), h))
    }

    pub fn gold_orderings(&self) -> &[GoldOrdering] {
        &self.gold
    }

    /// Attributes that have at least one gold ordering.
    pub fn gold_attributes(&self) -> BTreeSet<&str> {
        self.gold.iter().map(|g| g.attribute.as_str()).collect()
    }

    /// Borda consensus of every annotator's ordering for `attribute`.
    pub fn consensus(&self, attribute: &str) -> Option<Vec<String>> {
        let lists: Vec<&Vec<String>> = self.gold.iter().filter(|g| g.attribute == attribute).map(|g| &g.review_ids).collect();
        if lists.is_empty() {
            return None;
        }
        let owned: Vec<Vec<&str>> = lists.iter().map(|l| l.iter().map(String::as_str).collect()).collect();
        Some(borda_consensus(&owned))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub helpful: u64,
    pub total: u64,
    pub rate: f64,
}

impl Rate {
    fn from_counts(helpful: u64, total: u64) -> Option<Self> {
        (total > 0).then(|| Rate { helpful, total, rate: helpful as f64 / total as f64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelpfulnessOutcome {
    #[serde(flatten)]
    pub overall: Rate,
    pub per_annotator: BTreeMap<String, Rate>,
    /// `(attribute, review_id)` pairs retrieved but never annotated; they are
    /// left out of the denominator.
    pub gaps: Vec<(String, String)>,
}

/// Fraction of expert marks that judge the retrieved top-1 reviews helpful.
///
/// `top1` lists `(attribute, review_id)` pairs, one per query. Every mark on
/// a retrieved review under its attribute is consumed, so
/// `rate * total == helpful` exactly.
pub fn helpfulness_rate(annotations: &AnnotationSet, top1: &[(String, String)]) -> Result<HelpfulnessOutcome> {
    let (mut helpful, mut total) = (0u64, 0u64);
    let mut per: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut gaps = Vec::new();
    for (attribute, review_id) in top1 {
        let mut seen = false;
        for (who, h) in annotations.marks_for(attribute, review_id) {
            seen = true;
            total += 1;
            let slot = per.entry(who.to_string()).or_default();
            slot.1 += 1;
            if h {
                helpful += 1;
                slot.0 += 1;
            }
        }
        if !seen {
            gaps.push((attribute.clone(), review_id.clone()));
        }
    }
    let overall = Rate::from_counts(helpful, total).ok_or(Error::Empty("annotations for the retrieved reviews"))?;
    let per_annotator = per
        .into_iter()
        .filter_map(|(who, (h, t))| Rate::from_counts(h, t).map(|r| (who, r)))
        .collect();
    Ok(HelpfulnessOutcome { overall, per_annotator, gaps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: MethodId,
    pub label: String,
    /// Helpfulness per product category; `None` where no retrieved review
    /// was annotated.
    pub helpfulness: BTreeMap<String, Option<HelpfulnessOutcome>>,
    /// Top-n rate averaged over attributes with a gold ordering.
    pub top_n_rate: BTreeMap<usize, f64>,
    pub average_correct_rate: Option<f64>,
}

/// One distinct review the experts need to judge, with the methods that
/// retrieved it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorksheetItem {
    pub category: String,
    pub attribute: String,
    pub review_id: String,
    pub methods: Vec<MethodId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub categories: Vec<String>,
    pub methods: Vec<MethodReport>,
    pub worksheet: Vec<WorksheetItem>,
    /// Queries for which a method retrieved nothing.
    pub unretrieved: Vec<(MethodId, String, String)>,
}

impl MetricReport {
    pub fn method(&self, method: MethodId) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn helpfulness(&self, method: MethodId, category: &str) -> Option<f64> {
        self.method(method)?.helpfulness.get(category)?.as_ref().map(|h| h.overall.rate)
    }

    /// Methods as rows, categories as columns, rates to two decimals.
    pub fn to_table(&self) -> String {
        let label_width = self.methods.iter().map(|m| m.label.chars().count()).max().unwrap_or(0).max(6);
        let widths: Vec<usize> = self.categories.iter().map(|c| c.chars().count().max(6)).collect();
        let mut out = String::new();
        let _ = write!(out, "{:<label_width$}", "");
        for (c, w) in self.categories.iter().zip(&widths) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
        for m in &self.methods {
            let _ = write!(out, "{:<label_width$}", m.label);
            for (c, w) in self.categories.iter().zip(&widths) {
                let cell = match m.helpfulness.get(c) {
                    Some(Some(h)) => format!("{:.2}", h.overall.rate),
                    _ => "-".to_string(),
                };
                let _ = write!(out, "  {cell:>w$}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CompareSettings {
    /// Embedding model name used in row labels.
    pub model_label: String,
    /// Largest `n` for top-n rates.
    pub max_n: usize,
}

impl Default for CompareSettings {
    fn default() -> Self {
        CompareSettings { model_label: "Embed".to_string(), max_n: 10 }
    }
}

/// Runs every (category, attribute, method) query, deduplicates the
/// retrieved top-1 reviews into one worksheet, and computes helpfulness
/// rates from `annotations`; where gold orderings exist, also top-n rates and
/// the average correct rate.
pub fn compare_methods(
    ranker: &Ranker<'_>,
    pipeline: &Pipeline,
    attributes: &[String],
    categories: &[String],
    methods: &[MethodId],
    annotations: &AnnotationSet,
    settings: &CompareSettings,
) -> Result<MetricReport> {
    if attributes.is_empty() {
        return Err(Error::invalid("attributes", "at least one attribute is required"));
    }
    if methods.is_empty() {
        return Err(Error::invalid("methods", "at least one method is required"));
    }
    let tokenized: Vec<(&String, Vec<String>)> = attributes.iter().map(|a| (a, pipeline.tokens_of(a))).collect();

    let mut worksheet: BTreeMap<(String, String, String), Vec<MethodId>> = BTreeMap::new();
    let mut unretrieved = Vec::new();
    let mut reports = Vec::with_capacity(methods.len());

    for &method in methods {
        let mut helpfulness = BTreeMap::new();
        for category in categories {
            let mut top1 = Vec::new();
            for (attribute, tokens) in &tokenized {
                let list = ranker.rank(&Query { attribute: tokens, method, k: 1, category: Some(category) })?;
                match list.top() {
                    Some(top) => {
                        top1.push(((*attribute).clone(), top.review_id.clone()));
                        worksheet
                            .entry((category.clone(), (*attribute).clone(), top.review_id.clone()))
                            .or_default()
                            .push(method);
                    }
                    None => unretrieved.push((method, category.clone(), (*attribute).clone())),
                }
            }
            let cell = match helpfulness_rate(annotations, &top1) {
                Ok(outcome) => Some(outcome),
                Err(Error::Empty(_)) => None,
                Err(e) => return Err(e),
            };
            helpfulness.insert(category.clone(), cell);
        }

        let (top_n_rate, average_correct_rate) = gold_metrics(ranker, annotations, &tokenized, method, settings)?;
        reports.push(MethodReport {
            method,
            label: method.label(&settings.model_label),
            helpfulness,
            top_n_rate,
            average_correct_rate,
        });
    }

    let worksheet = worksheet
        .into_iter()
        .map(|((category, attribute, review_id), methods)| WorksheetItem { category, attribute, review_id, methods })
        .collect();
    Ok(MetricReport { categories: categories.to_vec(), methods: reports, worksheet, unretrieved })
}

fn gold_metrics(
    ranker: &Ranker<'_>,
    annotations: &AnnotationSet,
    tokenized: &[(&String, Vec<String>)],
    method: MethodId,
    settings: &CompareSettings,
) -> Result<(BTreeMap<usize, f64>, Option<f64>)> {
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let (mut acr_sum, mut acr_count) = (0.0, 0usize);
    for (attribute, tokens) in tokenized {
        let Some(gold) = annotations.consensus(attribute) else { continue };
        let category = gold.first().and_then(|id| ranker.review(id)).map(|r| r.category.as_str());
        let ranked = ranker.rank(&Query { attribute: tokens, method, k: usize::MAX, category })?;
        let ids = ranked.ids();
        for n in 1..=settings.max_n.min(gold.len()).min(ids.len()) {
            let slot = sums.entry(n).or_default();
            slot.0 += top_n_rate(&gold, &ids, n)?;
            slot.1 += 1;
        }
        if gold.len() >= 2 {
            let order = ranker.order_subset(tokens, method, &gold)?;
            acr_sum += average_correct_rate(&gold, &order)?;
            acr_count += 1;
        }
    }
    let top_n = sums.into_iter().map(|(n, (s, c))| (n, s / c as f64)).collect();
    let acr = (acr_count > 0).then(|| acr_sum / acr_count as f64);
    Ok((top_n, acr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn ids(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn mark(attribute: &str, annotator: &str, review_id: &str, helpful: bool) -> Annotation {
        Annotation { attribute: attribute.into(), annotator: annotator.into(), review_id: review_id.into(), helpful }
    }

    /// Enumerates every pair directly.
    fn concordance_oracle(gold: &[String], ranked: &[String]) -> f64 {
        let pos = |x: &String| ranked.iter().position(|r| r == x).unwrap();
        let mut agree = 0;
        let mut pairs = 0;
        for a in gold {
            for b in gold {
                let (ga, gb) = (gold.iter().position(|g| g == a).unwrap(), gold.iter().position(|g| g == b).unwrap());
                if ga < gb {
                    pairs += 1;
                    if pos(a) < pos(b) {
                        agree += 1;
                    }
                }
            }
        }
        agree as f64 / pairs as f64
    }

    #[test]
    fn top_n_examples() {
        let gold = ids("a b c d e");
        for n in 1..=5 {
            assert_eq!(top_n_rate(&gold, &gold, n).unwrap(), 1.0);
        }
        assert_eq!(top_n_rate(&ids("a b"), &ids("c d"), 2).unwrap(), 0.0);
        assert_eq!(top_n_rate(&ids("a b c d"), &ids("a c x y"), 4).unwrap(), 0.5);
        assert!(top_n_rate(&gold, &gold, 0).is_err());
        assert_eq!(
            top_n_rate(&gold, &ids("a b"), 3).unwrap_err(),
            Error::OutOfRange { name: "n", value: 3, max: 2 }
        );
    }

    #[test]
    fn average_correct_rate_examples() {
        let g = ids("a b c");
        assert_eq!(average_correct_rate(&g, &g).unwrap(), 1.0);
        assert_eq!(average_correct_rate(&g, &ids("c b a")).unwrap(), 0.0);
        assert!((average_correct_rate(&g, &ids("b a c")).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(average_correct_rate(&g, &ids("a b d")).unwrap_err(), Error::SetMismatch);
        assert_eq!(average_correct_rate(&g, &ids("a b")).unwrap_err(), Error::SetMismatch);
        assert_eq!(average_correct_rate(&ids("a"), &ids("a")).unwrap_err(), Error::TooFewItems(1));
    }

    #[test]
    fn borda() {
        let lists = vec![ids("a b c"), ids("b a c"), ids("a c b")];
        assert_eq!(borda_consensus(&lists), ids("a b c"));
        assert_eq!(borda_consensus(&[ids("x y"), ids("y x")]), ids("x y"));
    }

    #[test]
    fn helpfulness_examples() {
        let mut marks = Vec::new();
        for i in 0..10 {
            marks.push(mark(&format!("attr{i}"), "e1", &format!("r{i}"), i < 7));
        }
        let set = AnnotationSet::new(marks, vec![]).unwrap();
        let top1: Vec<(String, String)> = (0..10).map(|i| (format!("attr{i}"), format!("r{i}"))).collect();
        let out = helpfulness_rate(&set, &top1).unwrap();
        assert_eq!(out.overall.rate, 0.7);
        assert_eq!((out.overall.helpful, out.overall.total), (7, 10));
        assert!(out.gaps.is_empty());

        let all = AnnotationSet::new(vec![mark("q", "e1", "r", true), mark("q", "e2", "r", true)], vec![]).unwrap();
        let out = helpfulness_rate(&all, &[("q".into(), "r".into()), ("q2".into(), "r9".into())]).unwrap();
        assert_eq!(out.overall.rate, 1.0);
        assert_eq!(out.per_annotator.len(), 2);
        assert_eq!(out.gaps, vec![("q2".to_string(), "r9".to_string())]);
        assert!(helpfulness_rate(&all, &[("z".into(), "r".into())]).is_err());
    }

    #[test]
    fn table_one_cell_arithmetic() {
        // 25 marks on one method's top-1 reviews, 18 helpful.
        let mut marks = Vec::new();
        let mut top1 = Vec::new();
        for q in 0..5 {
            top1.push((format!("q{q}"), format!("r{q}")));
            for e in 0..5 {
                marks.push(mark(&format!("q{q}"), &format!("e{e}"), &format!("r{q}"), q * 5 + e < 18));
            }
        }
        let out = helpfulness_rate(&AnnotationSet::new(marks, vec![]).unwrap(), &top1).unwrap();
        assert_eq!(out.overall.rate, 0.72);
    }

    #[test]
    fn duplicate_annotations_rejected() {
        let err = AnnotationSet::new(vec![mark("q", "e", "r", true), mark("q", "e", "r", false)], vec![]);
        assert!(matches!(err, Err(Error::DuplicateAnnotation { .. })));
        let gold = GoldOrdering { attribute: "q".into(), annotator: "e".into(), review_ids: ids("a a") };
        assert!(AnnotationSet::new(vec![], vec![gold]).is_err());
    }

    #[test]
    fn marks_for_does_not_bleed_between_keys() {
        let set = AnnotationSet::new(
            vec![mark("q", "e1", "r", true), mark("q", "e2", "r", false), mark("q", "e1", "r2", true), mark("q2", "e1", "r", true)],
            vec![],
        )
        .unwrap();
        let got: Vec<(&str, bool)> = set.marks_for("q", "r").collect();
        assert_eq!(got, vec![("e1", true), ("e2", false)]);
    }

    fn permutation() -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
        (2usize..12).prop_flat_map(|m| {
            let base: Vec<String> = (0..m).map(|i| format!("id{i}")).collect();
            (Just(base.clone()).prop_shuffle(), Just(base).prop_shuffle())
        })
    }

    proptest! {
        #[test]
        fn concordance_matches_oracle((gold, ranked) in permutation()) {
            let fast = average_correct_rate(&gold, &ranked).unwrap();
            prop_assert!((fast - concordance_oracle(&gold, &ranked)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&fast));
        }

        #[test]
        fn identity_and_reversal((gold, _) in permutation()) {
            let mut rev = gold.clone();
            rev.reverse();
            prop_assert_eq!(average_correct_rate(&gold, &gold).unwrap(), 1.0);
            prop_assert_eq!(average_correct_rate(&gold, &rev).unwrap(), 0.0);
        }

        #[test]
        fn invariant_under_relabeling((gold, ranked) in permutation(), n in 1usize..12) {
            let relabel = |v: &[String]| -> Vec<String> { v.iter().map(|s| format!("zz-{}", s.replace("id", ""))).collect() };
            let (g2, r2) = (relabel(&gold), relabel(&ranked));
            prop_assert_eq!(average_correct_rate(&gold, &ranked).unwrap(), average_correct_rate(&g2, &r2).unwrap());
            let n = n.min(gold.len());
            let rate = top_n_rate(&gold, &ranked, n).unwrap();
            prop_assert_eq!(rate, top_n_rate(&g2, &r2, n).unwrap());
            prop_assert!((0.0..=1.0).contains(&rate));
        }

        #[test]
        fn helpfulness_integer_identity(flags in proptest::collection::vec(any::<bool>(), 1..60)) {
            let marks: Vec<Annotation> = flags.iter().enumerate().map(|(i, &h)| mark("q", &format!("e{i}"), "r", h)).collect();
            let set = AnnotationSet::new(marks, vec![]).unwrap();
            let out = helpfulness_rate(&set, &[("q".into(), "r".into())]).unwrap();
            let helpful = flags.iter().filter(|&&h| h).count() as f64;
            prop_assert_eq!((out.overall.rate * out.overall.total as f64).round(), helpful);
            prop_assert_eq!(out.overall.total as usize, flags.len());
        }
    }
}
