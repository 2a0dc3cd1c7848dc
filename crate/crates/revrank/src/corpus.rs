//! Review ingestion and the corpus store.
//!
//! Input is JSONL with `id`, `product_id`, `category`, `score` and `text`.
//! The store is the same JSONL with a `tokens` field added, next to a
//! `<store>.stats.json` sidecar holding the cumulative [`CorpusStats`].

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use revrank_core::review::{process_review, Corpus, CorpusStats, Outcome, Review};
use revrank_core::text::Pipeline;

use crate::error::{Error, Result};

pub fn stats_path(store: &Path) -> PathBuf {
    let mut name = store.as_os_str().to_owned();
    name.push(".stats.json");
    PathBuf::from(name)
}

enum Parsed {
    Review(Review),
    Malformed(String),
}

fn parse_line(line: &str) -> Parsed {
    match serde_json::from_str::<Review>(line) {
        Ok(r) if !r.has_valid_score() => Parsed::Malformed(format!("score {} outside 1..=5", r.score)),
        Ok(r) if r.id.is_empty() => Parsed::Malformed("empty id".to_string()),
        Ok(r) => Parsed::Review(r),
        Err(e) => Parsed::Malformed(e.to_string()),
    }
}

type LineResult = (usize, std::result::Result<(Review, Outcome), String>);

/// Result of processing one input file, in input order.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub stats: CorpusStats,
    /// Reviews that go to the store: the negative partition and the
    /// retained auxiliary reviews, in input order.
    pub stored: Vec<Review>,
}

/// Cleans, tokenizes and classifies every line of `source`.
///
/// Lines are processed in parallel and merged in input order. Malformed
/// lines (bad JSON, score outside 1..=5, an id seen before, including in
/// `known_ids`) are counted and skipped; blank lines are ignored.
pub fn process_lines(source: &str, pipeline: &Pipeline, known_ids: &BTreeSet<String>) -> Ingested {
    let lines: Vec<(usize, &str)> =
        source.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).collect();
    let processed: Vec<LineResult> = lines
        .par_iter()
        .map(|&(i, line)| {
            let result = match parse_line(line) {
                Parsed::Review(mut r) => {
                    let outcome = process_review(&mut r, pipeline);
                    Ok((r, outcome))
                }
                Parsed::Malformed(m) => Err(m),
            };
            (i + 1, result)
        })
        .collect();

    let mut seen = known_ids.clone();
    let mut out = Ingested::default();
    for (line, result) in processed {
        match result {
            Ok((review, _)) if seen.contains(&review.id) => {
                log::warn!("line {line}: duplicate review id `{}`, skipped", review.id);
                out.stats.malformed += 1;
            }
            Ok((review, outcome)) => {
                seen.insert(review.id.clone());
                out.stats.record(&outcome);
                if outcome.is_stored() {
                    out.stored.push(review);
                }
            }
            Err(message) => {
                log::warn!("line {line}: malformed review skipped: {message}");
                out.stats.malformed += 1;
            }
        }
    }
    out
}

/// Ingests `input` into `store`.
///
/// With `append` the reviews are added to an existing store and the
/// returned stats are cumulative; otherwise the store is rewritten.
pub fn ingest(input: &Path, pipeline: &Pipeline, store: &Path, append: bool) -> Result<CorpusStats> {
    let source = std::fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
    let (mut stats, known_ids) = if append && store.exists() {
        let previous = read_stats(store)?;
        let ids = read_store(store)?.iter().map(|r| r.id.clone()).collect();
        (previous, ids)
    } else {
        (CorpusStats::default(), BTreeSet::new())
    };
    let ingested = process_lines(&source, pipeline, &known_ids);
    stats.merge(&ingested.stats);

    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(store)
        .map_err(|e| Error::io(store, e))?;
    let mut w = BufWriter::new(file);
    for review in &ingested.stored {
        serde_json::to_writer(&mut w, review).map_err(|e| Error::io(store, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(store, e))?;
    }
    w.flush().map_err(|e| Error::io(store, e))?;
    write_stats(store, &stats)?;
    Ok(stats)
}

pub fn write_stats(store: &Path, stats: &CorpusStats) -> Result<()> {
    let path = stats_path(store);
    let mut text = serde_json::to_string_pretty(stats).expect("stats serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub fn read_stats(store: &Path) -> Result<CorpusStats> {
    let path = stats_path(store);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(&path, e.to_string()))
}

/// Loads a corpus store. Unlike raw input, every line must be valid.
pub fn read_store(store: &Path) -> Result<Corpus> {
    let file = File::open(store).map_err(|e| Error::io(store, e))?;
    let mut corpus = Corpus::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(store, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let review: Review = serde_json::from_str(&line)
            .map_err(|e| Error::format(store, format!("line {}: {e}", i + 1)))?;
        corpus.push(review);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, score: u8, text: &str) -> String {
        serde_json::json!({"id": id, "product_id": "p", "category": "phone", "score": score, "text": text})
            .to_string()
    }

    #[test]
    fn hand_counted_fixture() {
        let long = "screen cracked after two days of use";
        let mut lines = Vec::new();
        for i in 0..5 {
            lines.push(line(&format!("k{i}"), 1, long));
        }
        lines.push(line("s0", 1, "bad"));
        lines.push(line("s1", 1, "too small"));
        lines.push(line("n0", 5, long));
        lines.push(line("n1", 4, long));
        lines.push(line("n2", 3, "ok"));
        let out = process_lines(&lines.join("\n"), &Pipeline::default(), &BTreeSet::new());
        let s = out.stats;
        assert_eq!((s.total_ingested, s.kept, s.dropped_short, s.dropped_nonnegative), (10, 5, 2, 3));
        assert_eq!((s.auxiliary, s.malformed), (2, 0));
        assert!(s.is_balanced());
        assert_eq!(out.stored.len(), 7);
        assert_eq!(out.stored[0].id, "k0");
    }

    #[test]
    fn malformed_lines_are_counted() {
        let long = "screen cracked after two days of use";
        let mut lines: Vec<String> = (0..9).map(|i| line(&format!("r{i}"), 1, long)).collect();
        lines.insert(4, "{not json".to_string());
        lines.push(line("r0", 1, long));
        lines.push(line("x", 9, long));
        lines.push(String::new());
        let out = process_lines(&lines.join("\n"), &Pipeline::default(), &BTreeSet::new());
        assert_eq!(out.stats.kept, 9);
        assert_eq!(out.stats.malformed, 3);
        assert!(out.stats.is_balanced());
    }

    #[test]
    fn empty_input() {
        let out = process_lines("", &Pipeline::default(), &BTreeSet::new());
        assert_eq!(out.stats, CorpusStats::default());
    }
}
