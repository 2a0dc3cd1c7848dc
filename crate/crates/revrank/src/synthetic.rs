//! Synthetic corpora with known answers, for tests and demonstrations.
//!
//! * [`lexicon_corpus`]: planted emotion words that expansion should find.
//! * [`gold_corpus`]: one uniquely best review per attribute.
//! * [`table_fixture`]: two categories with expert marks tuned to fixed
//!   helpfulness rates.
//! * [`twin_corpus`]: context twins for the embedding trainer.
//!
//! Every generator is deterministic in its seed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use revrank_core::bm25::InvertedIndex;
use revrank_core::embedding::EmbeddingTable;
use revrank_core::lexicon::{EmotionLexicon, Provenance, Side};
use revrank_core::metrics::{Annotation, GoldOrdering};
use revrank_core::rank::{MethodId, Query, Ranker, Stores};
use revrank_core::review::{process_review, Review};
use revrank_core::reward::RewardVariant;

use crate::annotations::{format_gold, format_marks};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::lexicon_io::format_lexicon;
use crate::vectors::format_table;

fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:02}")).collect()
}

fn review(id: String, category: &str, score: u8, tokens: Vec<String>) -> Review {
    Review {
        id,
        product_id: format!("{category}-p1"),
        category: category.to_string(),
        score,
        raw_text: tokens.join(" "),
        tokens,
    }
}

#[derive(Debug, Clone)]
pub struct LexiconCorpusSpec {
    pub reviews: usize,
    pub planted_per_side: usize,
    pub seeds_per_side: usize,
    pub neutral: usize,
    /// Share of reviews that contain no seed word.
    pub unseeded_fraction: f64,
    /// Chance that a planted word shows up in a review of the other polarity.
    pub cross_noise: f64,
}

impl Default for LexiconCorpusSpec {
    fn default() -> Self {
        LexiconCorpusSpec {
            reviews: 2000,
            planted_per_side: 20,
            seeds_per_side: 10,
            neutral: 50,
            unseeded_fraction: 0.2,
            cross_noise: 0.03,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LexiconCorpus {
    /// Negative-polarity reviews are rated 1, positive ones 5. Tokens are
    /// filled in.
    pub reviews: Vec<Review>,
    pub seeds: EmotionLexicon,
    pub planted_negative: Vec<String>,
    pub planted_positive: Vec<String>,
    pub neutral: Vec<String>,
}

impl LexiconCorpus {
    pub fn planted(&self, side: Side) -> &[String] {
        match side {
            Side::Negative => &self.planted_negative,
            Side::Positive => &self.planted_positive,
        }
    }
}

/// Reviews of two polarities. Each mixes seed words (unless unseeded),
/// planted words of its own polarity and frequent neutral words.
pub fn lexicon_corpus(spec: &LexiconCorpusSpec, seed: u64) -> LexiconCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_neg = words("seedneg", spec.seeds_per_side);
    let seed_pos = words("seedpos", spec.seeds_per_side);
    let planted_negative = words("plantneg", spec.planted_per_side);
    let planted_positive = words("plantpos", spec.planted_per_side);
    let neutral = words("common", spec.neutral);

    let mut reviews = Vec::with_capacity(spec.reviews);
    for i in 0..spec.reviews {
        let negative = rng.random_bool(0.5);
        let (seeds, own, other) = if negative {
            (&seed_neg, &planted_negative, &planted_positive)
        } else {
            (&seed_pos, &planted_positive, &planted_negative)
        };
        let mut tokens = Vec::new();
        if !rng.random_bool(spec.unseeded_fraction) {
            for _ in 0..rng.random_range(1..=2) {
                tokens.push(seeds.choose(&mut rng).expect("seeds").clone());
            }
        }
        for _ in 0..rng.random_range(1..=3) {
            let pool = if rng.random_bool(spec.cross_noise) { other } else { own };
            tokens.push(pool.choose(&mut rng).expect("planted").clone());
        }
        for _ in 0..rng.random_range(6..=10) {
            tokens.push(neutral.choose(&mut rng).expect("neutral").clone());
        }
        tokens.shuffle(&mut rng);
        let score = if negative { 1 } else { 5 };
        reviews.push(review(format!("lx{i:05}"), "general", score, tokens));
    }
    let seeds = EmotionLexicon::from_seeds(seed_pos, seed_neg).expect("disjoint seed names");
    LexiconCorpus { reviews, seeds, planted_negative, planted_positive, neutral }
}

const ATTRIBUTES: [&str; 10] = [
    "battery", "screen", "keyboard", "speaker", "camera", "charger", "delivery", "packaging", "price", "service",
];

/// Out-of-vocabulary padding words; none is a default stopword.
const FILLERS: [&str; 10] = ["item", "order", "week", "arrived", "today", "box", "model", "store", "unit", "purchase"];

/// Vector space shared by the gold and table fixtures: one axis per
/// attribute, four generic axes and two emotion axes.
struct Space {
    table: EmbeddingTable,
    lexicon: EmotionLexicon,
    generic: Vec<String>,
    positive: Vec<String>,
    negative: Vec<String>,
}

const GENERIC_AXES: usize = 4;

impl Space {
    fn dim() -> usize {
        ATTRIBUTES.len() + GENERIC_AXES + 2
    }

    fn synonym(attribute: &str, k: usize) -> String {
        format!("{attribute}syn{k}")
    }

    fn new(rng: &mut ChaCha8Rng) -> Self {
        let dim = Self::dim();
        let mut table = EmbeddingTable::new(dim).expect("dim > 0");
        let axis = |i: usize, scale: f64| {
            let mut v = vec![0.0; dim];
            v[i] = scale;
            v
        };
        for (i, a) in ATTRIBUTES.iter().enumerate() {
            table.insert(*a, &axis(i, 1.0)).expect("finite");
            for k in 1..=2 {
                let mut v = axis(i, 1.0);
                for g in 0..GENERIC_AXES {
                    v[ATTRIBUTES.len() + g] = rng.random_range(-0.15..0.15);
                }
                table.insert(Self::synonym(a, k), &v).expect("finite");
            }
        }
        let generic = words("thing", 8);
        for (j, w) in generic.iter().enumerate() {
            let mut v = axis(ATTRIBUTES.len() + j % GENERIC_AXES, 1.0);
            v[ATTRIBUTES.len() + (j + 1) % GENERIC_AXES] = rng.random_range(0.0..0.2);
            table.insert(w.clone(), &v).expect("finite");
        }
        let positive: Vec<String> = ["sturdy", "smooth", "pleasant"].map(String::from).to_vec();
        let negative: Vec<String> = ["flimsy", "awful", "faulty"].map(String::from).to_vec();
        let (pos_axis, neg_axis) = (dim - 2, dim - 1);
        for w in &positive {
            table.insert(w.clone(), &axis(pos_axis, 1.0)).expect("finite");
        }
        for w in &negative {
            table.insert(w.clone(), &axis(neg_axis, 1.0)).expect("finite");
        }
        let lexicon = EmotionLexicon::from_seeds(positive.clone(), negative.clone()).expect("disjoint");
        let lexicon = reprovenance(lexicon);
        Space { table, lexicon, generic, positive, negative }
    }

    fn fillers(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
        (0..n).map(|_| FILLERS.choose(rng).expect("fillers").to_string()).collect()
    }
}

/// Marks every entry as imported; the fixture lexicons are given, not grown.
fn reprovenance(lexicon: EmotionLexicon) -> EmotionLexicon {
    let mut out = EmotionLexicon::new();
    for (w, e) in lexicon.iter() {
        out.insert(w.to_string(), e.side, Provenance::IMPORTED).expect("copy of a valid lexicon");
    }
    out
}

#[derive(Debug, Clone)]
pub struct GoldCorpus {
    /// All rated 1, category `phone`, tokens filled in.
    pub reviews: Vec<Review>,
    pub table: EmbeddingTable,
    pub lexicon: EmotionLexicon,
    pub attributes: Vec<String>,
    /// Attribute to its uniquely best review.
    pub best: BTreeMap<String, String>,
    pub gold: Vec<GoldOrdering>,
    pub marks: Vec<Annotation>,
}

/// One neutral review per attribute built from the attribute word and its
/// synonyms, so its similarity is close to 1, plus distractors that mention
/// an attribute once among generic and emotion words. Distractor similarity
/// stays below 0.5, under the 0.684 ratio at which an emotion reward could
/// overturn a neutral review.
pub fn gold_corpus(seed: u64) -> GoldCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = Space::new(&mut rng);
    let mut reviews = Vec::new();
    let mut best = BTreeMap::new();
    for (i, a) in ATTRIBUTES.iter().enumerate() {
        let mut tokens = vec![a.to_string(), Space::synonym(a, 1), Space::synonym(a, 2)];
        tokens.extend(space.fillers(&mut rng, 3));
        tokens.shuffle(&mut rng);
        let id = format!("gb{i:02}");
        best.insert(a.to_string(), id.clone());
        reviews.push(review(id, "phone", 1, tokens));
    }
    for d in 0..80 {
        let a = ATTRIBUTES.choose(&mut rng).expect("attributes");
        let mut tokens = vec![a.to_string()];
        let mut generic = space.generic.clone();
        generic.shuffle(&mut rng);
        tokens.extend(generic.into_iter().take(3));
        match rng.random_range(0..3) {
            0 => tokens.push(space.positive.choose(&mut rng).expect("pos").clone()),
            1 => tokens.push(space.negative.choose(&mut rng).expect("neg").clone()),
            _ => {}
        }
        tokens.extend(space.fillers(&mut rng, 2));
        tokens.shuffle(&mut rng);
        reviews.push(review(format!("gd{d:02}"), "phone", 1, tokens));
    }

    let attributes: Vec<String> = ATTRIBUTES.iter().map(|a| a.to_string()).collect();
    let mut gold = Vec::new();
    let mut marks = Vec::new();
    for annotator in ["e1", "e2", "e3"] {
        for a in &attributes {
            gold.push(GoldOrdering {
                attribute: a.clone(),
                annotator: annotator.to_string(),
                review_ids: vec![best[a].clone()],
            });
            marks.push(Annotation {
                attribute: a.clone(),
                annotator: annotator.to_string(),
                review_id: best[a].clone(),
                helpful: true,
            });
        }
    }
    GoldCorpus { reviews, table: space.table, lexicon: space.lexicon, attributes, best, gold, marks }
}

/// Helpful-mark totals over ten top-1 reviews with five annotators each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkTarget {
    pub category: &'static str,
    pub method: MethodId,
    pub helpful: u64,
}

pub const TABLE_ANNOTATORS: usize = 5;
/// Helpful marks given to a top-1 review of any method without a target.
pub const DEFAULT_HELPFUL: usize = 3;

pub const TABLE_TARGETS: [MarkTarget; 4] = [
    MarkTarget { category: "phone", method: MethodId::Embed(RewardVariant::Sigmoid), helpful: 36 },
    MarkTarget { category: "laptop", method: MethodId::Embed(RewardVariant::Sigmoid), helpful: 35 },
    MarkTarget { category: "phone", method: MethodId::Bm25, helpful: 32 },
    MarkTarget { category: "laptop", method: MethodId::Bm25, helpful: 31 },
];

#[derive(Debug, Clone)]
pub struct TableFixture {
    pub reviews: Vec<Review>,
    pub table: EmbeddingTable,
    pub lexicon: EmotionLexicon,
    pub attributes: Vec<String>,
    pub categories: Vec<String>,
    pub marks: Vec<Annotation>,
    /// (method, category, attribute) to top-1 review id.
    pub top1: BTreeMap<(MethodId, String, String), String>,
}

/// Two categories, ten attributes, four reviews per (category, attribute):
///
/// * `s`: two synonyms and a positive word, no literal attribute term;
/// * `b`: the literal attribute term padded with unknown words;
/// * `n`: one synonym, a negative word and a generic word;
/// * `m`: generic words and a positive word.
///
/// Sigmoid ranks `s` first (0.73 reward on ~0.89 similarity beats 0.5 on
/// 1.0) while BM25 only matches `b`, so their top-1 reviews never coincide.
/// The methods' actual top-1 reviews are then marked so that the target
/// methods reach [`TABLE_TARGETS`] and every other top-1 review gets
/// [`DEFAULT_HELPFUL`] of [`TABLE_ANNOTATORS`] helpful marks.
pub fn table_fixture(seed: u64) -> Result<TableFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = Space::new(&mut rng);
    let categories = vec!["phone".to_string(), "laptop".to_string()];
    let attributes: Vec<String> = ATTRIBUTES.iter().map(|a| a.to_string()).collect();
    let config = PipelineConfig::default();
    let pipeline = config.pipeline()?;

    let mut reviews = Vec::new();
    for category in &categories {
        for a in ATTRIBUTES {
            let mut kinds: Vec<(&str, Vec<String>)> = vec![
                ("s", vec![
                    Space::synonym(a, 1),
                    Space::synonym(a, 2),
                    space.positive.choose(&mut rng).expect("pos").clone(),
                ]),
                ("b", vec![a.to_string()]),
                ("n", vec![
                    Space::synonym(a, 1),
                    space.negative.choose(&mut rng).expect("neg").clone(),
                    space.generic.choose(&mut rng).expect("generic").clone(),
                ]),
                ("m", vec![
                    space.generic.choose(&mut rng).expect("generic").clone(),
                    space.generic.choose(&mut rng).expect("generic").clone(),
                    space.positive.choose(&mut rng).expect("pos").clone(),
                ]),
            ];
            for (kind, tokens) in kinds.iter_mut() {
                let pad = 6usize.saturating_sub(tokens.len());
                tokens.extend(space.fillers(&mut rng, pad));
                tokens.shuffle(&mut rng);
                let mut r = review(format!("{category}-{a}-{kind}"), category, 1, std::mem::take(tokens));
                r.product_id = format!("{category}-{a}");
                process_review(&mut r, &pipeline);
                reviews.push(r);
            }
        }
    }
    reviews.sort_by(|a, b| a.id.cmp(&b.id));

    let index = InvertedIndex::build(reviews.iter().map(|r| (r.id.as_str(), r.tokens.as_slice())))?;
    let mut stores = Stores::new(&reviews);
    stores.index = Some(&index);
    stores.table = Some(&space.table);
    stores.lexicon = Some(&space.lexicon);
    stores.bm25 = config.bm25;
    let ranker = Ranker::new(stores)?;

    let mut top1 = BTreeMap::new();
    for method in MethodId::ALL {
        for category in &categories {
            for a in &attributes {
                let tokens = pipeline.tokens_of(a);
                let list = ranker.rank(&Query { attribute: &tokens, method, k: 1, category: Some(category) })?;
                let top = list.top().ok_or_else(|| Error::config(format!("{method} retrieves nothing for {a}")))?;
                top1.insert((method, category.clone(), a.clone()), top.review_id.clone());
            }
        }
    }

    // helpful-mark count per (attribute, review)
    let mut helpful: BTreeMap<(String, String), usize> = BTreeMap::new();
    for target in TABLE_TARGETS {
        let per = target.helpful as usize / attributes.len();
        let extra = target.helpful as usize % attributes.len();
        for (i, a) in attributes.iter().enumerate() {
            let id = &top1[&(target.method, target.category.to_string(), a.clone())];
            let count = per + usize::from(i < extra);
            if helpful.insert((a.clone(), id.clone()), count).is_some() {
                return Err(Error::config(format!("targets share the top-1 review {id} for {a}")));
            }
        }
    }
    for ((_, _, a), id) in &top1 {
        helpful.entry((a.clone(), id.clone())).or_insert(DEFAULT_HELPFUL);
    }
    let mut marks = Vec::new();
    for ((attribute, review_id), h) in helpful {
        for k in 0..TABLE_ANNOTATORS {
            marks.push(Annotation {
                attribute: attribute.clone(),
                annotator: format!("e{}", k + 1),
                review_id: review_id.clone(),
                helpful: k < h,
            });
        }
    }
    Ok(TableFixture { reviews, table: space.table, lexicon: space.lexicon, attributes, categories, marks, top1 })
}

#[derive(Debug, Clone)]
pub struct TwinCorpusSpec {
    pub groups: usize,
    /// Size of the context pool shared by all groups.
    pub pool: usize,
    /// Context words each group draws from.
    pub profile: usize,
    /// Context words on each side of the twin.
    pub span: usize,
    pub sentences: usize,
}

impl Default for TwinCorpusSpec {
    fn default() -> Self {
        TwinCorpusSpec { groups: 8, pool: 24, profile: 6, span: 2, sentences: 3000 }
    }
}

#[derive(Debug, Clone)]
pub struct TwinCorpus {
    pub sentences: Vec<Vec<String>>,
    /// Pairs of words that share every context but never appear together.
    pub twins: Vec<(String, String)>,
}

/// Groups of two twin words over one shared pool of context words. Each
/// group draws its contexts from its own random subset of the pool, so a
/// context word serves several groups and sits between them, while the two
/// twins of a group have the same context distribution. A sentence puts one
/// twin between context words of its group.
pub fn twin_corpus(spec: &TwinCorpusSpec, seed: u64) -> TwinCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = words("ctx", spec.pool);
    let mut twins = Vec::new();
    let mut profiles = Vec::new();
    for g in 0..spec.groups {
        twins.push((format!("twin{g}a"), format!("twin{g}b")));
        let mut shuffled = pool.clone();
        shuffled.shuffle(&mut rng);
        shuffled.truncate(spec.profile);
        profiles.push(shuffled);
    }
    let mut sentences = Vec::with_capacity(spec.sentences);
    for _ in 0..spec.sentences {
        let g = rng.random_range(0..spec.groups);
        let twin = if rng.random_bool(0.5) { &twins[g].0 } else { &twins[g].1 };
        let profile = &profiles[g];
        let mut s: Vec<String> =
            (0..2 * spec.span).map(|_| profile.choose(&mut rng).expect("profile").clone()).collect();
        s.insert(spec.span, twin.clone());
        sentences.push(s);
    }
    TwinCorpus { sentences, twins }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lexicon,
    Gold,
    Table1,
    Trainer,
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleSummary {
    pub kind: Kind,
    pub seed: u64,
    pub reviews: usize,
    pub files: Vec<String>,
}

struct Bundle<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Bundle<'_> {
    fn put(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn reviews(&mut self, reviews: &[Review]) -> Result<()> {
        let mut out = String::new();
        for r in reviews {
            let raw = serde_json::json!({
                "id": r.id,
                "product_id": r.product_id,
                "category": r.category,
                "score": r.score,
                "text": r.raw_text,
            });
            out.push_str(&raw.to_string());
            out.push('\n');
        }
        self.put("reviews.jsonl", out)
    }
}

fn toml_list(items: &[String]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| format!("{s:?}")).collect();
    format!("[{}]", quoted.join(", "))
}

/// Writes a generated corpus and a ready-to-run `config.toml` into `dir`.
pub fn write_bundle(kind: Kind, dir: &Path, seed: u64) -> Result<BundleSummary> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut b = Bundle { dir, files: Vec::new() };
    let common = "[paths]\ninput = \"reviews.jsonl\"\ncorpus = \"corpus.jsonl\"\n";
    let reviews = match kind {
        Kind::Lexicon => {
            let c = lexicon_corpus(&LexiconCorpusSpec::default(), seed);
            b.reviews(&c.reviews)?;
            let mut seeds = String::new();
            for (w, e) in c.seeds.iter() {
                seeds.push_str(&format!("{w}\t{}\n", e.side.code()));
            }
            b.put("seeds.tsv", seeds)?;
            let planted = serde_json::json!({
                "negative": c.planted_negative,
                "positive": c.planted_positive,
                "neutral": c.neutral,
            });
            b.put("planted.json", serde_json::to_string_pretty(&planted).expect("json"))?;
            b.put(
                "config.toml",
                format!("seed = {seed}\n{common}seeds = \"seeds.tsv\"\nlexicon = \"lexicon.tsv\"\n"),
            )?;
            c.reviews.len()
        }
        Kind::Gold => {
            let c = gold_corpus(seed);
            b.reviews(&c.reviews)?;
            b.put("vectors.txt", format_table(&c.table))?;
            b.put("lexicon.tsv", format_lexicon(&c.lexicon))?;
            b.put("annotations.csv", format_marks(&c.marks))?;
            b.put("gold.csv", format_gold(&c.gold))?;
            b.put("best.json", serde_json::to_string_pretty(&c.best).expect("json"))?;
            b.put(
                "config.toml",
                format!(
                    "seed = {seed}\n{common}lexicon = \"lexicon.tsv\"\nvectors = \"vectors.txt\"\nindex = \"index.bin\"\n\
                     annotations = \"annotations.csv\"\ngold = \"gold.csv\"\n\n[evaluate]\nattributes = {}\n\
                     categories = [\"phone\"]\n",
                    toml_list(&c.attributes)
                ),
            )?;
            c.reviews.len()
        }
        Kind::Table1 => {
            let f = table_fixture(seed)?;
            b.reviews(&f.reviews)?;
            b.put("vectors.txt", format_table(&f.table))?;
            b.put("lexicon.tsv", format_lexicon(&f.lexicon))?;
            b.put("annotations.csv", format_marks(&f.marks))?;
            b.put(
                "config.toml",
                format!(
                    "seed = {seed}\nembedding_label = \"GloVe\"\n{common}lexicon = \"lexicon.tsv\"\n\
                     vectors = \"vectors.txt\"\nindex = \"index.bin\"\nannotations = \"annotations.csv\"\n\n\
                     [evaluate]\nattributes = {}\ncategories = {}\n",
                    toml_list(&f.attributes),
                    toml_list(&f.categories)
                ),
            )?;
            f.reviews.len()
        }
        Kind::Trainer => {
            let c = twin_corpus(&TwinCorpusSpec::default(), seed);
            let reviews: Vec<Review> = c
                .sentences
                .iter()
                .enumerate()
                .map(|(i, s)| review(format!("tw{i:05}"), "general", 1, s.clone()))
                .collect();
            b.reviews(&reviews)?;
            let twins: Vec<[&str; 2]> = c.twins.iter().map(|(a, t)| [a.as_str(), t.as_str()]).collect();
            b.put("twins.json", serde_json::to_string_pretty(&twins).expect("json"))?;
            b.put(
                "config.toml",
                format!("seed = {seed}\n{common}vectors = \"vectors.txt\"\n\n[train]\ndim = 16\niterations = 30\n"),
            )?;
            reviews.len()
        }
    };
    Ok(BundleSummary { kind, seed, reviews, files: b.files })
}

/// Distinct words of a token list, for brute-force checks.
pub fn distinct<T: AsRef<str>>(tokens: &[T]) -> BTreeSet<&str> {
    tokens.iter().map(AsRef::as_ref).collect()
}
