use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, EvaluateArgs, LexiconArgs, RankArgs};
use crate::config::{PipelineConfig, CONFIG_ENV};
use crate::error::Result;
use crate::synthetic::{self, Kind};

/// Rank negative product reviews for an attribute query.
#[derive(Debug, Parser)]
#[command(name = "revrank", version)]
pub struct Cli {
    /// TOML config file. Relative paths inside it resolve against its
    /// directory.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Repeat for more log output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean, tokenize and filter a review JSONL file into the corpus store.
    Ingest {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Corpus store to write.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add to an existing store instead of replacing it.
        #[arg(long)]
        append: bool,
    },
    /// Grow the seed lexicon over the corpus and write the lexicon TSV.
    Lexicon {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ask on the terminal about every candidate.
        #[arg(long)]
        interactive: bool,
    },
    /// Train small word vectors from the corpus store.
    TrainEmbeddings {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a vector file and report its size.
    LoadEmbeddings {
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Build the BM25 index over the negative partition.
    Index {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank reviews for one attribute; JSONL on stdout.
    Rank {
        #[arg(long)]
        attribute: String,
        /// bm25, embed, or embed_<sigmoid|isigmoid|msigmoid|imsigmoid>.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        category: Option<String>,
    },
    /// Compare methods against expert annotations; JSON on stdout.
    Evaluate {
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        attributes: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        categories: Option<Vec<String>>,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Write the text table here instead of stderr.
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Write a synthetic corpus and a matching config into a directory.
    GenSynthetic {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

pub fn load_config(path: Option<&std::path::Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Command::GenSynthetic { kind, out: dir, seed } = &cli.command {
        let summary = synthetic::write_bundle(*kind, dir, *seed)?;
        serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
        writeln!(out)?;
        return Ok(());
    }
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest { input, out: store, append } => {
            commands::run_ingest(&config, input, store, append, &mut out)?;
        }
        Command::Lexicon { corpus, seeds, out: target, interactive } => {
            commands::run_lexicon(&config, LexiconArgs { corpus, seeds, out: target, interactive }, None, &mut out)?;
        }
        Command::TrainEmbeddings { corpus, out: target, seed } => {
            if let Some(seed) = seed {
                config.seed = seed;
            }
            commands::run_train(&config, corpus, target, &mut out)?;
        }
        Command::LoadEmbeddings { vectors } => commands::run_load_embeddings(&config, vectors, &mut out)?,
        Command::Index { corpus, out: target } => {
            commands::run_index(&config, corpus, target, &mut out)?;
        }
        Command::Rank { attribute, method, top, category } => {
            commands::run_rank(&config, RankArgs { attribute, method, top, category }, &mut out)?;
        }
        Command::Evaluate { methods, attributes, categories, annotations, gold, table_out } => {
            let args = EvaluateArgs { methods, attributes, categories, annotations, gold, table_out };
            commands::run_evaluate(&config, args, &mut out, &mut io::stderr())?;
        }
        Command::GenSynthetic { .. } => unreachable!("handled above"),
    }
    out.flush()?;
    Ok(())
}
