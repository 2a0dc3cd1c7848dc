//! Lexicon and seed files.
//!
//! Lexicon TSV: `word side origin iteration ratio` with a header row. Seed
//! TSV: `word side`. Both accept `#` comments and blank lines. Plain word
//! lists (one word per line, one file per side) can be imported as well.

use std::fmt::Write as _;
use std::path::Path;

use revrank_core::lexicon::{EmotionLexicon, Origin, Provenance, Side};

use crate::config::read_text;
use crate::error::{Error, Result};

pub const LEXICON_HEADER: &str = "word\tside\torigin\titeration\tratio";

fn content_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_matches(|c| c == ' ' || c == '\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn bad(path: &Path, line: usize, message: impl std::fmt::Display) -> Error {
    Error::format(path, format!("line {line}: {message}"))
}

pub fn format_lexicon(lexicon: &EmotionLexicon) -> String {
    let mut out = String::from(LEXICON_HEADER);
    out.push('\n');
    for (word, entry) in lexicon.iter() {
        let p = entry.provenance;
        let ratio = p.ratio_at_admission.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{word}\t{}\t{}\t{}\t{ratio}", entry.side.code(), p.origin.name(), p.iteration);
    }
    out
}

/// Parses a lexicon TSV. `path` is only used in error messages.
pub fn parse_lexicon(source: &str, path: &Path) -> Result<EmotionLexicon> {
    let mut lexicon = EmotionLexicon::new();
    for (line, text) in content_lines(source) {
        if text == LEXICON_HEADER {
            continue;
        }
        let fields: Vec<&str> = text.split('\t').map(str::trim).collect();
        let [word, side, origin, iteration, ratio] = fields[..] else {
            return Err(bad(path, line, format!("expected 5 tab-separated fields, found {}", fields.len())));
        };
        let side: Side = side.parse().map_err(|e| bad(path, line, e))?;
        let origin: Origin = origin.parse().map_err(|e| bad(path, line, e))?;
        let iteration: u32 = iteration.parse().map_err(|_| bad(path, line, "iteration is not a count"))?;
        let ratio_at_admission = match ratio {
            "" => None,
            r => Some(r.parse::<f64>().map_err(|_| bad(path, line, "ratio is not a number"))?),
        };
        let provenance = Provenance { origin, iteration, ratio_at_admission };
        lexicon.insert(word.to_string(), side, provenance).map_err(|e| bad(path, line, e))?;
    }
    Ok(lexicon)
}

/// Parses a seed TSV (`word side`).
pub fn parse_seeds(source: &str, path: &Path) -> Result<EmotionLexicon> {
    let mut lexicon = EmotionLexicon::new();
    for (line, text) in content_lines(source) {
        let mut fields = text.split_whitespace();
        let (Some(word), Some(side), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(path, line, "expected `word<TAB>side`"));
        };
        let side: Side = side.parse().map_err(|e| bad(path, line, e))?;
        lexicon.insert(word.to_lowercase(), side, Provenance::SEED)?;
    }
    Ok(lexicon)
}

/// Builds a lexicon from two plain word lists.
pub fn import_word_lists(positive: &str, negative: &str) -> Result<EmotionLexicon> {
    let mut lexicon = EmotionLexicon::new();
    for (source, side) in [(positive, Side::Positive), (negative, Side::Negative)] {
        for (_, word) in content_lines(source) {
            lexicon.insert(word.trim().to_lowercase(), side, Provenance::IMPORTED)?;
        }
    }
    Ok(lexicon)
}

pub fn load_lexicon(path: &Path) -> Result<EmotionLexicon> {
    parse_lexicon(&read_text(path)?, path)
}

pub fn load_seeds(path: &Path) -> Result<EmotionLexicon> {
    parse_seeds(&read_text(path)?, path)
}

pub fn write_lexicon(lexicon: &EmotionLexicon, path: &Path) -> Result<()> {
    std::fs::write(path, format_lexicon(lexicon)).map_err(|e| Error::io(path, e))
}
