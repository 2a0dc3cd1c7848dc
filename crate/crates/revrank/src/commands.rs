//! The pipeline stages behind each subcommand. Every function reads its
//! inputs from the config, writes machine-readable output to `out` and
//! leaves diagnostics to the logger.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use revrank_core::bm25::InvertedIndex;
use revrank_core::embedding::EmbeddingTable;
use revrank_core::lexicon::{expand_lexicon, AutoJudge, EmotionLexicon, Expansion, Judge, Side};
use revrank_core::metrics::{compare_methods, CompareSettings, MetricReport};
use revrank_core::rank::{MethodId, Query, RankedList, Ranker, Stores};
use revrank_core::review::{Corpus, CorpusStats, Review};
use revrank_core::reward::RewardVariant;
use revrank_core::trainer::train_toy_embeddings;

use crate::annotations::load_annotations;
use crate::config::{read_text, PipelineConfig, DEFAULT_SEEDS};
use crate::corpus::{ingest, read_store};
use crate::error::{Error, Result};
use crate::index_io::{read_index, write_index};
use crate::interactive::PromptJudge;
use crate::lexicon_io::{import_word_lists, load_lexicon, parse_seeds, write_lexicon};
use crate::vectors::{load_table, write_table};

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn or_config(flag: Option<PathBuf>, config: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
    flag.or_else(|| config.clone()).ok_or_else(|| Error::config(format!("paths.{key} is not set")))
}

pub fn load_corpus(config: &PipelineConfig, flag: Option<PathBuf>) -> Result<Corpus> {
    read_store(&or_config(flag, &config.paths.corpus, "corpus")?)
}

pub fn run_ingest(config: &PipelineConfig, input: Option<PathBuf>, store: Option<PathBuf>, append: bool, out: &mut dyn Write) -> Result<CorpusStats> {
    let input = or_config(input, &config.paths.input, "input")?;
    let store = or_config(store, &config.paths.corpus, "corpus")?;
    let pipeline = config.pipeline()?;
    let stats = ingest(&input, &pipeline, &store, append)?;
    log::info!("ingested {} reviews into {}", stats.total_ingested, store.display());
    emit_json(out, &stats)?;
    Ok(stats)
}

/// Seeds from `paths.seeds`, or the shipped default list.
pub fn load_seed_lexicon(config: &PipelineConfig, flag: Option<PathBuf>) -> Result<EmotionLexicon> {
    match flag.or_else(|| config.paths.seeds.clone()) {
        Some(path) => parse_seeds(&read_text(&path)?, &path),
        None => parse_seeds(DEFAULT_SEEDS, Path::new("<default seeds>")),
    }
}

#[derive(Debug, Serialize)]
struct LexiconSummary<'a> {
    path: &'a Path,
    positive: usize,
    negative: usize,
    iterations: u32,
    admitted_negative: Vec<&'a str>,
    admitted_positive: Vec<&'a str>,
}

pub struct LexiconArgs {
    pub corpus: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub interactive: bool,
}

pub fn run_lexicon(
    config: &PipelineConfig,
    args: LexiconArgs,
    prompts: Option<(&mut dyn BufRead, &mut dyn Write)>,
    out: &mut dyn Write,
) -> Result<Expansion> {
    let target = or_config(args.out, &config.paths.lexicon, "lexicon")?;
    let corpus = load_corpus(config, args.corpus)?;
    let seeds = load_seed_lexicon(config, args.seeds)?;
    let docs: Vec<&[String]> = corpus.iter().map(|r| r.tokens.as_slice()).collect();
    let expansion = match (args.interactive, prompts) {
        (true, Some((input, output))) => {
            let mut judge = PromptJudge::new(input, output);
            expand_lexicon(&docs, &seeds, &config.lexicon, &mut judge)?
        }
        (true, None) => {
            let stdin = io::stdin();
            let mut judge = PromptJudge::new(stdin.lock(), io::stderr());
            expand_lexicon(&docs, &seeds, &config.lexicon, &mut judge)?
        }
        (false, _) => {
            let mut judge = AutoJudge { admit_threshold: config.lexicon.admit_threshold };
            expand_lexicon(&docs, &seeds, &config.lexicon, &mut judge as &mut dyn Judge)?
        }
    };
    write_lexicon(&expansion.lexicon, &target)?;
    let admitted = |side: Side| -> Vec<&str> {
        expansion.lexicon.words(side).filter(|w| !seeds.contains(w)).collect()
    };
    emit_json(
        out,
        &LexiconSummary {
            path: &target,
            positive: expansion.lexicon.count(Side::Positive),
            negative: expansion.lexicon.count(Side::Negative),
            iterations: expansion.iterations,
            admitted_negative: admitted(Side::Negative),
            admitted_positive: admitted(Side::Positive),
        },
    )?;
    Ok(expansion)
}

#[derive(Debug, Serialize)]
struct TrainSummary<'a> {
    path: &'a Path,
    vocab_size: usize,
    dim: usize,
    nonzero: usize,
    losses: &'a [f64],
}

pub fn run_train(config: &PipelineConfig, corpus: Option<PathBuf>, target: Option<PathBuf>, out: &mut dyn Write) -> Result<EmbeddingTable> {
    let target = or_config(target, &config.paths.vectors, "vectors")?;
    let corpus = load_corpus(config, corpus)?;
    let sentences: Vec<&[String]> = corpus.iter().map(|r| r.tokens.as_slice()).collect();
    let trained = train_toy_embeddings(&sentences, &config.train_config())?;
    write_table(&trained.table, &target)?;
    emit_json(
        out,
        &TrainSummary {
            path: &target,
            vocab_size: trained.table.vocab_size(),
            dim: trained.table.dim(),
            nonzero: trained.nonzero,
            losses: &trained.losses,
        },
    )?;
    Ok(trained.table)
}

#[derive(Debug, Serialize)]
struct TableSummary<'a> {
    path: &'a Path,
    vocab_size: usize,
    dim: usize,
    duplicates: usize,
}

pub fn run_load_embeddings(config: &PipelineConfig, vectors: Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let path = or_config(vectors, &config.paths.vectors, "vectors")?;
    let parsed = load_table(&path)?;
    emit_json(
        out,
        &TableSummary {
            path: &path,
            vocab_size: parsed.table.vocab_size(),
            dim: parsed.table.dim(),
            duplicates: parsed.duplicates,
        },
    )
}

#[derive(Debug, Serialize)]
struct IndexSummary<'a> {
    path: &'a Path,
    docs: usize,
    terms: usize,
    avg_doc_len: f64,
}

fn build_index(reviews: &[Review]) -> Result<InvertedIndex> {
    Ok(InvertedIndex::build(reviews.iter().map(|r| (r.id.as_str(), r.tokens.as_slice())))?)
}

pub fn run_index(config: &PipelineConfig, corpus: Option<PathBuf>, target: Option<PathBuf>, out: &mut dyn Write) -> Result<InvertedIndex> {
    let target = or_config(target, &config.paths.index, "index")?;
    let corpus = load_corpus(config, corpus)?;
    let index = build_index(&corpus.negative)?;
    write_index(&index, &target)?;
    emit_json(
        out,
        &IndexSummary { path: &target, docs: index.doc_count(), terms: index.term_count(), avg_doc_len: index.avg_doc_len() },
    )?;
    Ok(index)
}

/// Stores loaded for ranking; only what the requested methods need.
pub struct Loaded {
    pub corpus: Corpus,
    pub index: Option<InvertedIndex>,
    pub table: Option<EmbeddingTable>,
    pub lexicon: Option<EmotionLexicon>,
}

impl Loaded {
    pub fn load(config: &PipelineConfig, methods: &[MethodId]) -> Result<Self> {
        let corpus = load_corpus(config, None)?;
        let needs_bm25 = methods.contains(&MethodId::Bm25);
        let needs_table = methods.iter().any(|m| m.variant().is_some());
        let needs_lexicon = methods.iter().any(|m| m.variant().is_some_and(|v| v != RewardVariant::None));

        let index = match (needs_bm25, &config.paths.index) {
            (false, _) => None,
            (true, Some(path)) => Some(read_index(path)?),
            (true, None) => {
                log::info!("paths.index not set, indexing the corpus in memory");
                Some(build_index(&corpus.negative)?)
            }
        };
        let index = match index {
            Some(i) => {
                let ids: BTreeSet<&str> = corpus.negative.iter().map(|r| r.id.as_str()).collect();
                if i.doc_count() != ids.len() || i.docs().iter().any(|d| !ids.contains(d.id.as_str())) {
                    log::warn!("the BM25 index does not match the corpus store; rebuild it with `revrank index`");
                }
                Some(i)
            }
            None => None,
        };
        let table = match needs_table {
            true => Some(load_table(&config.require(&config.paths.vectors, "vectors")?)?.table),
            false => None,
        };
        let lexicon = if needs_lexicon { Some(load_config_lexicon(config)?) } else { None };
        Ok(Loaded { corpus, index, table, lexicon })
    }

    pub fn ranker(&self, config: &PipelineConfig) -> Result<Ranker<'_>> {
        let mut stores = Stores::new(&self.corpus.negative);
        stores.index = self.index.as_ref();
        stores.table = self.table.as_ref();
        stores.lexicon = self.lexicon.as_ref();
        stores.bm25 = config.bm25;
        Ok(Ranker::new(stores)?)
    }
}

/// The emotion lexicon: a lexicon TSV, or two imported word lists.
pub fn load_config_lexicon(config: &PipelineConfig) -> Result<EmotionLexicon> {
    let p = &config.paths;
    match (&p.lexicon, &p.positive_words, &p.negative_words) {
        (Some(path), _, _) => load_lexicon(path),
        (None, Some(pos), Some(neg)) => import_word_lists(&read_text(pos)?, &read_text(neg)?),
        _ => Err(Error::config("set paths.lexicon, or both paths.positive_words and paths.negative_words")),
    }
}

#[derive(Debug, Serialize)]
struct RankRow<'a> {
    attribute: &'a str,
    method: String,
    rank: usize,
    review_id: &'a str,
    score: f64,
    c_s: Option<f64>,
    e_n: Option<f64>,
    e_c: Option<f64>,
}

pub struct RankArgs {
    pub attribute: String,
    pub method: Option<String>,
    pub top: Option<usize>,
    pub category: Option<String>,
}

pub fn run_rank(config: &PipelineConfig, args: RankArgs, out: &mut dyn Write) -> Result<RankedList> {
    let method: MethodId = match &args.method {
        Some(m) => m.parse()?,
        None => config.method()?,
    };
    let loaded = Loaded::load(config, &[method])?;
    let ranker = loaded.ranker(config)?;
    let pipeline = config.pipeline()?;
    let tokens = pipeline.tokens_of(&args.attribute);
    let k = args.top.unwrap_or(config.rank.top_k);
    let list = ranker.rank(&Query { attribute: &tokens, method, k, category: args.category.as_deref() })?;
    if list.excluded > 0 {
        log::warn!("{} reviews have no in-vocabulary token and were not ranked", list.excluded);
    }
    for (i, e) in list.entries.iter().enumerate() {
        let row = RankRow {
            attribute: &args.attribute,
            method: method.name(),
            rank: i + 1,
            review_id: &e.review_id,
            score: e.score,
            c_s: e.c_s,
            e_n: e.e_n,
            e_c: e.e_c,
        };
        serde_json::to_writer(&mut *out, &row).map_err(io::Error::from)?;
        writeln!(out)?;
    }
    Ok(list)
}

pub struct EvaluateArgs {
    pub methods: Option<Vec<String>>,
    pub attributes: Option<Vec<String>>,
    pub categories: Option<Vec<String>>,
    pub annotations: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub table_out: Option<PathBuf>,
}

/// Writes the report JSON to `out` and the aligned table to `table_out`,
/// or to `diag` when no table file is given.
pub fn run_evaluate(config: &PipelineConfig, args: EvaluateArgs, out: &mut dyn Write, diag: &mut dyn Write) -> Result<MetricReport> {
    let annotations_path = args
        .annotations
        .or_else(|| config.paths.annotations.clone())
        .ok_or_else(|| Error::config("evaluation needs an annotation file (paths.annotations)"))?;
    let gold_path = args.gold.or_else(|| config.paths.gold.clone());
    let annotations = load_annotations(&annotations_path, gold_path.as_deref())?;
    if annotations.is_empty() {
        return Err(Error::config(format!("{} holds no annotations", annotations_path.display())));
    }
    let methods = match &args.methods {
        Some(names) => crate::config::parse_methods(names)?,
        None => config.methods()?,
    };
    let mut attributes = args.attributes.unwrap_or_else(|| config.evaluate.attributes.clone());
    if attributes.is_empty() {
        attributes = annotations.gold_attributes().into_iter().map(String::from).collect();
    }
    if attributes.is_empty() {
        return Err(Error::config("no attributes to evaluate (evaluate.attributes)"));
    }

    let loaded = Loaded::load(config, &methods)?;
    let mut categories = args.categories.unwrap_or_else(|| config.evaluate.categories.clone());
    if categories.is_empty() {
        let seen: BTreeSet<&str> = loaded.corpus.negative.iter().map(|r| r.category.as_str()).collect();
        categories = seen.into_iter().map(String::from).collect();
    }
    let ranker = loaded.ranker(config)?;
    let pipeline = config.pipeline()?;
    let settings = CompareSettings { model_label: config.embedding_label.clone(), max_n: config.evaluate.max_n };
    let report = compare_methods(&ranker, &pipeline, &attributes, &categories, &methods, &annotations, &settings)?;
    for m in &report.methods {
        for (category, cell) in &m.helpfulness {
            if let Some(outcome) = cell {
                for (attribute, review) in &outcome.gaps {
                    log::warn!("{} / {category}: top-1 {review} for `{attribute}` has no annotation", m.label);
                }
            }
        }
    }
    emit_json(out, &report)?;
    let table = report.to_table();
    match &args.table_out {
        Some(path) => std::fs::write(path, &table).map_err(|e| Error::io(path, e))?,
        None => diag.write_all(table.as_bytes())?,
    }
    Ok(report)
}
