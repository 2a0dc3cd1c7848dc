//! Small-scale global co-occurrence embedding trainer.
//!
//! Builds a symmetric windowed co-occurrence count matrix and fits word and
//! context vectors by weighted least squares on `log X_ij` with per-parameter
//! AdaGrad steps. Intended for self-contained fixtures and tests, not for
//! web-scale corpora.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dim: usize,
    /// Co-occurrence window on each side of the centre word.
    pub window: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    /// Counts at or above this get full weight.
    pub x_max: f64,
    /// Exponent of the weighting function below `x_max`.
    pub weight_exponent: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 50,
            window: 5,
            iterations: 25,
            learning_rate: 0.05,
            x_max: 100.0,
            weight_exponent: 0.75,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::invalid("x_max", "must be positive"));
        }
        if !(self.weight_exponent >= 0.0 && self.weight_exponent.is_finite()) {
            return Err(Error::invalid("weight_exponent", "must be >= 0"));
        }
        Ok(())
    }
}

/// Word ids ordered by descending frequency, ties by word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn build<D, T>(sentences: &[D]) -> Self
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
        for s in sentences {
            for t in s.as_ref() {
                *freq.entry(t.as_ref()).or_default() += 1;
            }
        }
        let mut ordered: Vec<(&str, u64)> = freq.into_iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let words: Vec<String> = ordered.iter().map(|(w, _)| w.to_string()).collect();
        let counts = ordered.iter().map(|&(_, c)| c).collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Vocabulary { words, counts, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }
}

/// Sparse symmetric co-occurrence counts keyed by `(row, col)` word ids.
pub type CooccurrenceMatrix = BTreeMap<(u32, u32), f64>;

/// Every ordered pair of positions `(i, j)`, `i != j`, at most `window`
/// apart within one sentence adds one to `X[w_i][w_j]`.
pub fn cooccurrence_matrix<D, T>(sentences: &[D], vocab: &Vocabulary, window: usize) -> CooccurrenceMatrix
where
    D: AsRef<[T]>,
    T: AsRef<str>,
{
    let mut matrix = CooccurrenceMatrix::new();
    for s in sentences {
        let ids: Vec<u32> = s.as_ref().iter().filter_map(|t| vocab.id(t.as_ref())).collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in ids.iter().skip(i + 1).take(window) {
                *matrix.entry((a, b)).or_default() += 1.0;
                *matrix.entry((b, a)).or_default() += 1.0;
            }
        }
    }
    matrix
}

#[derive(Debug, Clone)]
pub struct TrainedEmbeddings {
    /// Word vector plus context vector for every vocabulary word.
    pub table: EmbeddingTable,
    /// Value of the weighted least-squares objective after each iteration.
    pub losses: Vec<f64>,
    pub nonzero: usize,
}

struct Params {
    dim: usize,
    word: Vec<f64>,
    context: Vec<f64>,
    word_bias: Vec<f64>,
    context_bias: Vec<f64>,
    word_gradsq: Vec<f64>,
    context_gradsq: Vec<f64>,
    word_bias_gradsq: Vec<f64>,
    context_bias_gradsq: Vec<f64>,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Params {
    fn init(vocab: usize, dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| (unit_f64(rng) - 0.5) / dim as f64).collect() };
        let word = draw(vocab * dim);
        let context = draw(vocab * dim);
        let word_bias = draw(vocab);
        let context_bias = draw(vocab);
        Params {
            dim,
            word,
            context,
            word_bias,
            context_bias,
            word_gradsq: vec![1.0; vocab * dim],
            context_gradsq: vec![1.0; vocab * dim],
            word_bias_gradsq: vec![1.0; vocab],
            context_bias_gradsq: vec![1.0; vocab],
        }
    }

    fn residual(&self, i: usize, j: usize, x: f64) -> f64 {
        let (wi, cj) = (&self.word[i * self.dim..(i + 1) * self.dim], &self.context[j * self.dim..(j + 1) * self.dim]);
        let dot: f64 = wi.iter().zip(cj).map(|(a, b)| a * b).sum();
        dot + self.word_bias[i] + self.context_bias[j] - libm::log(x)
    }

    fn step(&mut self, i: usize, j: usize, x: f64, weight: f64, lr: f64) {
        let g = lr * weight * self.residual(i, j, x);
        let d = self.dim;
        for k in 0..d {
            let (wi, cj) = (i * d + k, j * d + k);
            let grad_w = g * self.context[cj];
            let grad_c = g * self.word[wi];
            self.word[wi] -= grad_w / libm::sqrt(self.word_gradsq[wi]);
            self.context[cj] -= grad_c / libm::sqrt(self.context_gradsq[cj]);
            self.word_gradsq[wi] += grad_w * grad_w;
            self.context_gradsq[cj] += grad_c * grad_c;
        }
        self.word_bias[i] -= g / libm::sqrt(self.word_bias_gradsq[i]);
        self.context_bias[j] -= g / libm::sqrt(self.context_bias_gradsq[j]);
        self.word_bias_gradsq[i] += g * g;
        self.context_bias_gradsq[j] += g * g;
    }
}

fn weight(x: f64, config: &TrainConfig) -> f64 {
    if x < config.x_max {
        libm::pow(x / config.x_max, config.weight_exponent)
    } else {
        1.0
    }
}

/// Weighted least-squares objective `sum f(X_ij) (w_i·c_j + b_i + b'_j - ln X_ij)^2`.
fn objective(params: &Params, entries: &[(u32, u32, f64)], config: &TrainConfig) -> f64 {
    entries
        .iter()
        .map(|&(i, j, x)| {
            let r = params.residual(i as usize, j as usize, x);
            weight(x, config) * r * r
        })
        .sum()
}

/// Trains word vectors on tokenized sentences. Deterministic for a fixed
/// `config.seed`.
pub fn train_toy_embeddings<D, T>(sentences: &[D], config: &TrainConfig) -> Result<TrainedEmbeddings>
where
    D: AsRef<[T]>,
    T: AsRef<str>,
{
    config.validate()?;
    if sentences.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let vocab = Vocabulary::build(sentences);
    if vocab.len() < 2 {
        return Err(Error::VocabularyTooSmall(vocab.len()));
    }
    let matrix = cooccurrence_matrix(sentences, &vocab, config.window);
    if matrix.is_empty() {
        return Err(Error::EmptyCooccurrence);
    }
    let mut entries: Vec<(u32, u32, f64)> = matrix.iter().map(|(&(i, j), &x)| (i, j, x)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = Params::init(vocab.len(), config.dim, &mut rng);
    let mut losses = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        // Fisher-Yates with the seeded generator.
        for k in (1..entries.len()).rev() {
            let r = (rng.next_u64() % (k as u64 + 1)) as usize;
            entries.swap(k, r);
        }
        for &(i, j, x) in &entries {
            params.step(i as usize, j as usize, x, weight(x, config), config.learning_rate);
        }
        losses.push(objective(&params, &entries, config));
    }

    let mut table = EmbeddingTable::new(config.dim)?;
    let d = config.dim;
    let mut row = vec![0.0; d];
    for id in 0..vocab.len() {
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = params.word[id * d + k] + params.context[id * d + k];
        }
        table.insert(vocab.word(id as u32), &row)?;
    }
    Ok(TrainedEmbeddings { table, losses, nonzero: entries.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sentences(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter().map(|s| s.split_whitespace().map(String::from).collect()).collect()
    }

    /// Direct double loop over position pairs.
    fn brute_force(sentences: &[Vec<String>], vocab: &Vocabulary, window: usize) -> CooccurrenceMatrix {
        let mut m = CooccurrenceMatrix::new();
        for s in sentences {
            for i in 0..s.len() {
                for j in 0..s.len() {
                    if i != j && i.abs_diff(j) <= window {
                        let key = (vocab.id(&s[i]).unwrap(), vocab.id(&s[j]).unwrap());
                        *m.entry(key).or_default() += 1.0;
                    }
                }
            }
        }
        m
    }

    #[test]
    fn vocabulary_order() {
        let v = Vocabulary::build(&sentences(&["b a b c", "c b"]));
        assert_eq!(v.word(0), "b");
        assert_eq!(v.word(1), "c");
        assert_eq!(v.word(2), "a");
        assert_eq!(v.count(0), 3);
    }

    #[test]
    fn matrix_hand_count() {
        let s = sentences(&["a b c"]);
        let v = Vocabulary::build(&s);
        let m = cooccurrence_matrix(&s, &v, 1);
        let id = |w| v.id(w).unwrap();
        assert_eq!(m[&(id("a"), id("b"))], 1.0);
        assert_eq!(m[&(id("b"), id("c"))], 1.0);
        assert!(!m.contains_key(&(id("a"), id("c"))));
        assert_eq!(cooccurrence_matrix(&s, &v, 2)[&(id("c"), id("a"))], 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        let cfg = TrainConfig::default();
        assert_eq!(
            train_toy_embeddings(&sentences(&["same same same"]), &cfg).unwrap_err(),
            Error::VocabularyTooSmall(1)
        );
        let zero = TrainConfig { window: 0, ..cfg };
        assert_eq!(train_toy_embeddings(&sentences(&["a b c"]), &zero).unwrap_err(), Error::EmptyCooccurrence);
        let empty: Vec<Vec<String>> = Vec::new();
        assert!(train_toy_embeddings(&empty, &cfg).is_err());
        assert!(train_toy_embeddings(&sentences(&["a b"]), &TrainConfig { dim: 0, ..cfg }).is_err());
    }

    #[test]
    fn loss_falls_and_training_is_deterministic() {
        let corpus = sentences(&[
            "battery drains fast after update",
            "battery died within a week",
            "screen cracked after one drop",
            "screen flickers and battery drains",
            "delivery was late and box damaged",
            "courier lost the box delivery late",
        ]);
        let cfg = TrainConfig { dim: 8, window: 3, iterations: 10, seed: 7, ..Default::default() };
        let a = train_toy_embeddings(&corpus, &cfg).unwrap();
        assert!(a.losses[9] < a.losses[0]);
        let b = train_toy_embeddings(&corpus, &cfg).unwrap();
        assert_eq!(a.losses, b.losses);
        assert_eq!(a.table, b.table);
        assert_eq!(a.table.dim(), 8);
    }

    proptest! {
        #[test]
        fn matrix_matches_brute_force(
            raw in proptest::collection::vec(proptest::collection::vec(0usize..8, 0..15), 1..30),
            window in 0usize..6,
        ) {
            let words = ["a", "b", "c", "d", "e", "f", "g", "h"];
            let s: Vec<Vec<String>> = raw.iter().map(|x| x.iter().map(|&i| words[i].to_string()).collect()).collect();
            let v = Vocabulary::build(&s);
            prop_assert_eq!(cooccurrence_matrix(&s, &v, window), brute_force(&s, &v, window));
        }
    }
}
