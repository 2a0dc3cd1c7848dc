//! Text vector files: optional `vocab_size dim` header, then `word v1 .. vd`.

use std::fmt::Write as _;
use std::path::Path;

use revrank_core::embedding::{parse_vectors, EmbeddingTable, ParsedTable};

use crate::config::read_text;
use crate::error::{Error, Result};

pub fn load_table(path: &Path) -> Result<ParsedTable> {
    let source = read_text(path)?;
    let parsed = parse_vectors(&source).map_err(|e| Error::format(path, e.to_string()))?;
    if parsed.duplicates > 0 {
        log::warn!("{}: {} duplicate words, last occurrence kept", path.display(), parsed.duplicates);
    }
    Ok(parsed)
}

/// Serializes with a header line. Floats use the shortest representation
/// that reads back to the same value.
pub fn format_table(table: &EmbeddingTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", table.vocab_size(), table.dim());
    for (word, v) in table.iter() {
        out.push_str(word);
        for x in v {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

pub fn write_table(table: &EmbeddingTable, path: &Path) -> Result<()> {
    std::fs::write(path, format_table(table)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = EmbeddingTable::new(3).unwrap();
        t.insert("a", &[0.1, -2.5e-7, 3.0]).unwrap();
        t.insert("b", &[1.0 / 3.0, 0.0, -1.0]).unwrap();
        let back = parse_vectors(&format_table(&t)).unwrap();
        assert_eq!(back.table, t);
        assert_eq!(back.duplicates, 0);
    }
}
