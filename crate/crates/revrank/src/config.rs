//! Run configuration: one TOML file with a section per stage.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Every numeric field is range-checked by [`PipelineConfig::validate`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use revrank_core::bm25::Bm25Params;
use revrank_core::lexicon::ExpansionConfig;
use revrank_core::rank::MethodId;
use revrank_core::text::{self, DictionarySegmenter, Pipeline, SegmenterRegistry};
use revrank_core::trainer::TrainConfig;

use crate::error::{Error, Result};

/// Environment variable consulted when no `--config` flag is given.
pub const CONFIG_ENV: &str = "REVRANK_CONFIG";

/// Stopwords used when no stopword file is configured.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
/// Seed words used when no seed file is configured.
pub const DEFAULT_SEEDS: &str = include_str!("../data/seeds.tsv");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Raw review JSONL consumed by `ingest`.
    pub input: Option<PathBuf>,
    /// Cleaned corpus store written by `ingest`.
    pub corpus: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// Word list for the `dictionary` tokenizer.
    pub dictionary: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Plain positive word list to import instead of a lexicon TSV.
    pub positive_words: Option<PathBuf>,
    /// Plain negative word list to import instead of a lexicon TSV.
    pub negative_words: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub gold: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub tokenizer: String,
    pub min_len: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection { tokenizer: text::WHITESPACE.to_string(), min_len: text::DEFAULT_MIN_LEN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankSection {
    pub method: String,
    pub top_k: usize,
}

impl Default for RankSection {
    fn default() -> Self {
        RankSection { method: "embed_sigmoid".to_string(), top_k: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub methods: Vec<String>,
    pub attributes: Vec<String>,
    /// Empty means every category present in the corpus.
    pub categories: Vec<String>,
    pub max_n: usize,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection {
            methods: MethodId::ALL.iter().map(|m| m.name()).collect(),
            attributes: Vec::new(),
            categories: Vec::new(),
            max_n: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub dim: usize,
    pub window: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub x_max: f64,
    pub weight_exponent: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            dim: d.dim,
            window: d.window,
            iterations: d.iterations,
            learning_rate: d.learning_rate,
            x_max: d.x_max,
            weight_exponent: d.weight_exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Embedding model name shown in report rows, e.g. `GloVe`.
    pub embedding_label: String,
    pub paths: Paths,
    pub corpus: CorpusSection,
    pub lexicon: ExpansionConfig,
    pub bm25: Bm25Params,
    pub rank: RankSection,
    pub train: TrainSection,
    pub evaluate: EvaluateSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            embedding_label: "Embed".to_string(),
            paths: Paths::default(),
            corpus: CorpusSection::default(),
            lexicon: ExpansionConfig::default(),
            bm25: Bm25Params::default(),
            rank: RankSection::default(),
            train: TrainSection::default(),
            evaluate: EvaluateSection::default(),
        }
    }
}

impl PipelineConfig {
    pub fn parse(source: &str) -> Result<Self> {
        let config: PipelineConfig = toml::from_str(source).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file, resolving relative paths against
    /// its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&source)?;
        if let Some(dir) = path.parent() {
            config.resolve_relative_to(dir);
        }
        Ok(config)
    }

    pub fn resolve_relative_to(&mut self, dir: &Path) {
        let p = &mut self.paths;
        for slot in [
            &mut p.input,
            &mut p.corpus,
            &mut p.stopwords,
            &mut p.dictionary,
            &mut p.seeds,
            &mut p.lexicon,
            &mut p.positive_words,
            &mut p.negative_words,
            &mut p.vectors,
            &mut p.index,
            &mut p.annotations,
            &mut p.gold,
        ] {
            if let Some(path) = slot.as_mut() {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.lexicon.validate()?;
        self.bm25.validate()?;
        self.train_config().validate()?;
        self.method()?;
        self.methods()?;
        if self.corpus.tokenizer != text::WHITESPACE && self.corpus.tokenizer != text::DICTIONARY {
            return Err(revrank_core::Error::UnknownSegmenter(self.corpus.tokenizer.clone()).into());
        }
        if self.evaluate.max_n == 0 {
            return Err(Error::config("evaluate.max_n must be at least 1"));
        }
        Ok(())
    }

    pub fn method(&self) -> Result<MethodId> {
        Ok(self.rank.method.parse()?)
    }

    pub fn methods(&self) -> Result<Vec<MethodId>> {
        parse_methods(&self.evaluate.methods)
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            dim: t.dim,
            window: t.window,
            iterations: t.iterations,
            learning_rate: t.learning_rate,
            x_max: t.x_max,
            weight_exponent: t.weight_exponent,
            seed: self.seed,
        }
    }

    /// A path the command cannot run without.
    pub fn require(&self, path: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
        path.clone().ok_or_else(|| Error::config(format!("paths.{key} is not set")))
    }

    /// Builds the text pipeline: tokenizer registry lookup, stopwords and
    /// minimum length.
    pub fn pipeline(&self) -> Result<Pipeline> {
        let mut registry = SegmenterRegistry::default();
        if let Some(path) = &self.paths.dictionary {
            let source = read_text(path)?;
            registry.register(text::DICTIONARY, Arc::new(DictionarySegmenter::parse(&source)));
        } else if self.corpus.tokenizer == text::DICTIONARY {
            return Err(Error::config("tokenizer `dictionary` needs paths.dictionary"));
        }
        let segmenter = registry.get(&self.corpus.tokenizer)?;
        let stopwords = match &self.paths.stopwords {
            Some(path) => text::parse_stopwords(&read_text(path)?),
            None => text::parse_stopwords(DEFAULT_STOPWORDS),
        };
        Ok(Pipeline::new(segmenter, stopwords, self.corpus.min_len))
    }
}

pub fn parse_methods<S: AsRef<str>>(names: &[S]) -> Result<Vec<MethodId>> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let m: MethodId = name.as_ref().parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.methods().unwrap().len(), 6);
        assert_eq!(c.corpus.min_len, 5);
        assert_eq!((c.bm25.k1, c.bm25.b), (1.2, 0.75));
        assert_eq!((c.lexicon.admit_threshold, c.lexicon.stop_threshold, c.lexicon.alpha), (2.0, 1.2, 1.0));
        let p = c.pipeline().unwrap();
        assert!(p.stopwords.contains("the"));
    }

    #[test]
    fn parses_sections_and_resolves_paths() {
        let mut c = PipelineConfig::parse(
            r#"
            seed = 7
            embedding_label = "GloVe"
            [paths]
            corpus = "corpus.jsonl"
            vectors = "/abs/vectors.txt"
            [bm25]
            k1 = 1.5
            [rank]
            method = "GloVe_imSigmoid"
            top_k = 3
            [evaluate]
            methods = ["bm25", "embed_sigmoid"]
            attributes = ["battery"]
            "#,
        )
        .unwrap();
        c.resolve_relative_to(Path::new("/data/run"));
        assert_eq!(c.paths.corpus.as_deref(), Some(Path::new("/data/run/corpus.jsonl")));
        assert_eq!(c.paths.vectors.as_deref(), Some(Path::new("/abs/vectors.txt")));
        assert_eq!(c.bm25.b, 0.75);
        assert_eq!(c.train_config().seed, 7);
        assert_eq!(c.methods().unwrap().len(), 2);
        assert_eq!(c.method().unwrap().name(), "embed_imsigmoid");
    }

    #[test]
    fn bad_values_are_config_errors() {
        for bad in [
            "[bm25]\nb = 2.0",
            "[rank]\nmethod = \"tfidf\"",
            "[corpus]\ntokenizer = \"jieba\"",
            "[lexicon]\nadmit_threshold = 1.0\nstop_threshold = 1.5",
            "[train]\ndim = 0",
            "unknown_key = 1",
            "[evaluate]\nmax_n = 0",
        ] {
            let err = PipelineConfig::parse(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn dictionary_tokenizer_needs_a_dictionary() {
        let c = PipelineConfig::parse("[corpus]\ntokenizer = \"dictionary\"").unwrap();
        assert_eq!(c.pipeline().unwrap_err().exit_code(), 2);
    }
}
