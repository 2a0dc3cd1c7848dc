//! Expert annotation files.
//!
//! Marks: CSV `attribute,annotator,review_id,helpful` with `helpful` 0 or 1.
//! Gold orderings: CSV `attribute,annotator,rank,review_id`, ranks starting
//! at 1 and contiguous per (attribute, annotator).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use revrank_core::metrics::{Annotation, AnnotationSet, GoldOrdering};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct MarkRow {
    attribute: String,
    annotator: String,
    review_id: String,
    helpful: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoldRow {
    attribute: String,
    annotator: String,
    rank: u32,
    review_id: String,
}

fn reader(source: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(source.as_bytes())
}

fn row_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| format!("line {}: ", p.line())).unwrap_or_default();
    Error::format(path, format!("{line}{e}"))
}

pub fn parse_marks(source: &str, path: &Path) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    for row in reader(source).deserialize::<MarkRow>() {
        let row = row.map_err(|e| row_error(path, e))?;
        let helpful = match row.helpful {
            0 => false,
            1 => true,
            h => return Err(Error::format(path, format!("helpful must be 0 or 1, found {h}"))),
        };
        out.push(Annotation { attribute: row.attribute, annotator: row.annotator, review_id: row.review_id, helpful });
    }
    Ok(out)
}

pub fn parse_gold(source: &str, path: &Path) -> Result<Vec<GoldOrdering>> {
    let mut grouped: BTreeMap<(String, String), BTreeMap<u32, String>> = BTreeMap::new();
    for row in reader(source).deserialize::<GoldRow>() {
        let row = row.map_err(|e| row_error(path, e))?;
        let slot = grouped.entry((row.attribute.clone(), row.annotator.clone())).or_default();
        if slot.insert(row.rank, row.review_id).is_some() {
            return Err(Error::format(
                path,
                format!("rank {} given twice for ({}, {})", row.rank, row.attribute, row.annotator),
            ));
        }
    }
    let mut out = Vec::with_capacity(grouped.len());
    for ((attribute, annotator), ranks) in grouped {
        if ranks.keys().copied().ne(1..=ranks.len() as u32) {
            return Err(Error::format(path, format!("ranks for ({attribute}, {annotator}) must run 1..=n")));
        }
        out.push(GoldOrdering { attribute, annotator, review_ids: ranks.into_values().collect() });
    }
    Ok(out)
}

/// Loads marks and, when given, gold orderings.
pub fn load_annotations(marks: &Path, gold: Option<&Path>) -> Result<AnnotationSet> {
    let text = crate::config::read_text(marks)?;
    let marks = parse_marks(&text, marks)?;
    let gold = match gold {
        Some(path) => parse_gold(&crate::config::read_text(path)?, path)?,
        None => Vec::new(),
    };
    Ok(AnnotationSet::new(marks, gold)?)
}

pub fn format_marks(marks: &[Annotation]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for m in marks {
        w.serialize(MarkRow {
            attribute: m.attribute.clone(),
            annotator: m.annotator.clone(),
            review_id: m.review_id.clone(),
            helpful: m.helpful as u8,
        })
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn format_gold(gold: &[GoldOrdering]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for g in gold {
        for (i, id) in g.review_ids.iter().enumerate() {
            w.serialize(GoldRow {
                attribute: g.attribute.clone(),
                annotator: g.annotator.clone(),
                rank: i as u32 + 1,
                review_id: id.clone(),
            })
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: &str = "a.csv";

    #[test]
    fn marks_round_trip() {
        let text = "attribute,annotator,review_id,helpful\nbattery,e1,r1,1\nbattery,e2,r1,0\n";
        let marks = parse_marks(text, Path::new(P)).unwrap();
        assert_eq!(marks.len(), 2);
        assert!(marks[0].helpful && !marks[1].helpful);
        assert_eq!(format_marks(&marks), text);
    }

    #[test]
    fn bad_marks() {
        assert!(parse_marks("attribute,annotator,review_id,helpful\nb,e,r,2\n", Path::new(P)).is_err());
        assert!(parse_marks("attribute,annotator,review_id,helpful\nb,e,r\n", Path::new(P)).is_err());
        let dup = "attribute,annotator,review_id,helpful\nb,e,r,1\nb,e,r,0\n";
        let marks = parse_marks(dup, Path::new(P)).unwrap();
        assert!(AnnotationSet::new(marks, vec![]).is_err());
    }

    #[test]
    fn gold_groups_and_orders_by_rank() {
        let text = "attribute,annotator,rank,review_id\nb,e1,2,r2\nb,e1,1,r1\nb,e2,1,r3\n";
        let gold = parse_gold(text, Path::new(P)).unwrap();
        assert_eq!(gold[0].review_ids, vec!["r1", "r2"]);
        assert_eq!(gold[1].annotator, "e2");
        assert_eq!(parse_gold(&format_gold(&gold), Path::new(P)).unwrap(), gold);
        assert!(parse_gold("attribute,annotator,rank,review_id\nb,e1,2,r2\n", Path::new(P)).is_err());
        assert!(parse_gold("attribute,annotator,rank,review_id\nb,e1,1,r2\nb,e1,1,r3\n", Path::new(P)).is_err());
    }
}
