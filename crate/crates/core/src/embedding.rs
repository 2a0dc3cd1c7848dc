//! Word vectors, mean review vectors and cosine similarity.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Word to dense vector map with a fixed dimension.
///
/// Vectors are stored row-major in one buffer; every row has `dim`
/// finite components. The table is immutable once built and can be shared
/// freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: BTreeMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        Ok(EmbeddingTable { dim, words: Vec::new(), index: BTreeMap::new(), data: Vec::new() })
    }

    /// Inserts or replaces a vector. Returns `true` when `word` was already
    /// present (the new vector wins).
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<bool> {
        let word = word.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: vector.len() });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteComponent { word });
        }
        match self.index.get(&word) {
            Some(&row) => {
                self.data[row * self.dim..(row + 1) * self.dim].copy_from_slice(vector);
                Ok(true)
            }
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.data.extend_from_slice(vector);
                Ok(false)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&row| self.row(row))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Words in insertion order with their vectors.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words.iter().enumerate().map(|(i, w)| (w.as_str(), self.row(i)))
    }

    fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// The `k` words most cosine-similar to `word`, excluding itself. Ties
    /// are broken by word. Zero vectors are skipped.
    pub fn nearest(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        let query = self.get(word).ok_or(Error::NoRepresentation)?;
        let mut scored: Vec<(String, f64)> = Vec::new();
        for (w, v) in self.iter() {
            if w == word {
                continue;
            }
            match cosine(query, v) {
                Ok(c) => scored.push((w.to_string(), c)),
                Err(Error::DegenerateVector) => {}
                Err(e) => return Err(e),
            }
        }
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }
}

/// Result of parsing a vector file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub table: EmbeddingTable,
    /// Words that appeared more than once; the last occurrence was kept.
    pub duplicates: usize,
}

/// Parses the text vector format: an optional `vocab_size dim` header line,
/// then one `word v1 ... vd` line per word.
///
/// The first line is taken as a header when it has exactly two fields that
/// both parse as unsigned integers. Blank lines are ignored. Line numbers
/// in errors are 1-based.
pub fn parse_vectors(source: &str) -> Result<ParsedTable> {
    let mut lines = source.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let mut declared_dim = None;
    if let Some((_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split_whitespace().collect();
        if let [count, dim] = fields[..] {
            if let (Ok(_), Ok(dim)) = (count.parse::<usize>(), dim.parse::<usize>()) {
                declared_dim = Some(dim);
                lines.next();
            }
        }
    }

    let mut table: Option<EmbeddingTable> = None;
    let mut duplicates = 0;
    let mut buf: Vec<f64> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-blank line has a field");
        buf.clear();
        for f in fields {
            let x: f64 = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: alloc::format!("`{f}` is not a number"),
            })?;
            buf.push(x);
        }
        let table = match table.as_mut() {
            Some(t) => t,
            None => {
                let dim = declared_dim.unwrap_or(buf.len());
                table.insert(EmbeddingTable::new(dim).map_err(|_| Error::Parse {
                    line: line_no,
                    message: "vector has no components".to_string(),
                })?)
            }
        };
        if buf.len() != table.dim() {
            return Err(Error::Parse {
                line: line_no,
                message: alloc::format!("expected {} components, found {}", table.dim(), buf.len()),
            });
        }
        match table.insert(word, &buf) {
            Ok(true) => duplicates += 1,
            Ok(false) => {}
            Err(e) => {
                return Err(Error::Parse { line: line_no, message: e.to_string() });
            }
        }
    }
    let table = table.ok_or(Error::Empty("vector file"))?;
    Ok(ParsedTable { table, duplicates })
}

/// Mean of the in-vocabulary token vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanVector {
    pub vector: Vec<f64>,
    pub used: usize,
    /// Out-of-vocabulary tokens that were skipped.
    pub skipped: usize,
}

/// Arithmetic mean of the vectors of the tokens found in `table`.
pub fn mean_vector<T: AsRef<str>>(tokens: &[T], table: &EmbeddingTable) -> Result<MeanVector> {
    let mut sum = alloc::vec![0.0; table.dim()];
    let (mut used, mut skipped) = (0, 0);
    for t in tokens {
        match table.get(t.as_ref()) {
            Some(v) => {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::NoRepresentation);
    }
    let n = used as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Ok(MeanVector { vector: sum, used, skipped })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Cosine similarity `a·b / (|a| |b|)`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(Error::DegenerateVector);
    }
    Ok(dot(a, b) / (na * nb))
}

/// Similarity between an attribute (word or phrase) and a review: cosine of
/// their mean vectors.
pub fn attribute_similarity<A, R>(attribute: &[A], review: &[R], table: &EmbeddingTable) -> Result<f64>
where
    A: AsRef<str>,
    R: AsRef<str>,
{
    let a = mean_vector(attribute, table)?;
    let r = mean_vector(review, table)?;
    cosine(&a.vector, &r.vector)
}
