//! Binary inverted index files.
//!
//! Layout, all integers little-endian `u32`:
//!
//! ```text
//! "RVIX" version:u8
//! doc_count  { id_len id_bytes doc_len }*
//! term_count { term_len term_bytes posting_count { doc tf }* }*
//! ```
//!
//! Documents appear in ascending id order and terms in ascending byte order,
//! so equal indexes serialize to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use revrank_core::bm25::{IndexedDoc, InvertedIndex, Posting};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"RVIX";
pub const VERSION: u8 = 1;

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

pub fn encode_index(index: &InvertedIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    put_u32(&mut out, index.doc_count() as u32);
    for doc in index.docs() {
        put_str(&mut out, &doc.id);
        put_u32(&mut out, doc.len);
    }
    put_u32(&mut out, index.term_count() as u32);
    for (term, postings) in index.terms() {
        put_str(&mut out, term);
        put_u32(&mut out, postings.len() as u32);
        for p in postings {
            put_u32(&mut out, p.doc);
            put_u32(&mut out, p.tf);
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn string(&mut self) -> std::result::Result<String, String> {
        let len = self.u32()? as usize;
        let at = self.pos;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| format!("invalid UTF-8 at byte {at}"))
    }
}

type Parts = (Vec<IndexedDoc>, BTreeMap<String, Vec<Posting>>);

fn decode(bytes: &[u8]) -> std::result::Result<Parts, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).ok() != Some(MAGIC.as_slice()) {
        return Err("not an index file (bad magic)".to_string());
    }
    let version = r.take(1)?[0];
    if version != VERSION {
        return Err(format!("unsupported index format version {version}, expected {VERSION}"));
    }
    let doc_count = r.u32()? as usize;
    let mut docs = Vec::with_capacity(doc_count.min(bytes.len()));
    for _ in 0..doc_count {
        let id = r.string()?;
        let len = r.u32()?;
        docs.push(IndexedDoc { id, len });
    }
    let term_count = r.u32()? as usize;
    let mut postings = BTreeMap::new();
    for _ in 0..term_count {
        let term = r.string()?;
        let n = r.u32()? as usize;
        let mut list = Vec::with_capacity(n.min(bytes.len()));
        for _ in 0..n {
            let doc = r.u32()?;
            let tf = r.u32()?;
            list.push(Posting { doc, tf });
        }
        if postings.insert(term.clone(), list).is_some() {
            return Err(format!("term `{term}` appears twice"));
        }
    }
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    Ok((docs, postings))
}

/// Decodes an index; `path` is only used in error messages.
pub fn decode_index(bytes: &[u8], path: &Path) -> Result<InvertedIndex> {
    let (docs, postings) = decode(bytes).map_err(|m| Error::format(path, m))?;
    InvertedIndex::from_parts(docs, postings).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_index(index: &InvertedIndex, path: &Path) -> Result<()> {
    std::fs::write(path, encode_index(index)).map_err(|e| Error::io(path, e))
}

pub fn read_index(path: &Path) -> Result<InvertedIndex> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_index(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> InvertedIndex {
        let docs: Vec<(String, Vec<String>)> = vec![
            ("b".into(), vec!["battery".into(), "died".into(), "battery".into()]),
            ("a".into(), vec!["screen".into(), "écran".into()]),
        ];
        InvertedIndex::build(docs.iter().map(|(id, t)| (id.as_str(), t.as_slice()))).unwrap()
    }

    #[test]
    fn round_trip() {
        let index = sample();
        let bytes = encode_index(&index);
        assert_eq!(&bytes[..5], b"RVIX\x01");
        assert_eq!(decode_index(&bytes, Path::new("i")).unwrap(), index);
    }

    #[test]
    fn rejects_damage() {
        let bytes = encode_index(&sample());
        let p = Path::new("i");
        let mut wrong_version = bytes.clone();
        wrong_version[4] = 2;
        let err = decode_index(&wrong_version, p).unwrap_err().to_string();
        assert!(err.contains("version 2"), "{err}");
        assert!(decode_index(&bytes[..bytes.len() - 1], p).is_err());
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(decode_index(&trailing, p).is_err());
        assert!(decode_index(b"JUNKJUNK", p).is_err());
        let mut corrupt = bytes;
        let last = corrupt.len() - 8;
        corrupt[last] = 99;
        assert!(decode_index(&corrupt, p).is_err());
    }
}
