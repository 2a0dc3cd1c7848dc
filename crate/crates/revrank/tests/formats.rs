use std::collections::BTreeMap;
use std::path::Path;

use proptest::prelude::*;

use revrank::annotations::{format_gold, format_marks, parse_gold, parse_marks};
use revrank::index_io::{decode_index, encode_index};
use revrank::lexicon_io::{format_lexicon, parse_lexicon};
use revrank::vectors::format_table;
use revrank_core::bm25::InvertedIndex;
use revrank_core::embedding::{parse_vectors, EmbeddingTable};
use revrank_core::lexicon::{EmotionLexicon, Provenance, Side};
use revrank_core::metrics::{Annotation, GoldOrdering};

fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,7}"
}

proptest! {
    #[test]
    fn vectors_round_trip(rows in prop::collection::btree_map(word(), prop::collection::vec(-1e6f64..1e6, 3), 1..20)) {
        let mut table = EmbeddingTable::new(3).unwrap();
        for (w, v) in &rows {
            table.insert(w.clone(), v).unwrap();
        }
        let back = parse_vectors(&format_table(&table)).unwrap();
        prop_assert_eq!(back.duplicates, 0);
        prop_assert_eq!(back.table, table);
    }

    #[test]
    fn lexicon_round_trip(words in prop::collection::btree_map(word(), (any::<bool>(), 0u32..5, 1.0f64..100.0), 1..30)) {
        let mut lex = EmotionLexicon::new();
        for (w, (neg, iteration, ratio)) in &words {
            let side = if *neg { Side::Negative } else { Side::Positive };
            let provenance = if *iteration == 0 { Provenance::SEED } else { Provenance::expanded(*iteration, *ratio) };
            lex.insert(w.clone(), side, provenance).unwrap();
        }
        prop_assert_eq!(parse_lexicon(&format_lexicon(&lex), Path::new("l")).unwrap(), lex);
    }

    #[test]
    fn index_round_trip(docs in prop::collection::btree_map("d[0-9]{1,3}", prop::collection::vec(word(), 1..12), 1..15)) {
        let index = InvertedIndex::build(docs.iter().map(|(id, t)| (id.as_str(), t.as_slice()))).unwrap();
        let bytes = encode_index(&index);
        prop_assert_eq!(&encode_index(&decode_index(&bytes, Path::new("i")).unwrap()), &bytes);
    }
}

#[test]
fn annotation_round_trip() {
    let marks: Vec<Annotation> = (0..6)
        .map(|i| Annotation {
            attribute: "battery".into(),
            annotator: format!("e{}", i % 2),
            review_id: format!("r{i}"),
            helpful: i % 3 == 0,
        })
        .collect();
    assert_eq!(parse_marks(&format_marks(&marks), Path::new("m")).unwrap(), marks);
    let gold = vec![GoldOrdering {
        attribute: "battery".into(),
        annotator: "e1".into(),
        review_ids: vec!["r2".into(), "r0".into(), "r1".into()],
    }];
    assert_eq!(parse_gold(&format_gold(&gold), Path::new("g")).unwrap(), gold);
}

#[test]
fn gold_ranks_must_be_contiguous() {
    let text = "attribute,annotator,review_id,rank\nbattery,e1,r0,1\nbattery,e1,r1,3\n";
    let err = parse_gold(text, Path::new("g.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let dup = "attribute,annotator,review_id,rank\nbattery,e1,r0,1\nbattery,e1,r1,1\n";
    assert!(parse_gold(dup, Path::new("g.csv")).is_err());
}

#[test]
fn vector_header_is_optional() {
    let with = parse_vectors("2 2\na 1 0\nb 0 1\n").unwrap().table;
    let without = parse_vectors("a 1 0\nb 0 1\n").unwrap().table;
    assert_eq!(with, without);
    let counts: BTreeMap<_, _> = with.iter().map(|(w, v)| (w.to_string(), v.len())).collect();
    assert_eq!(counts.len(), 2);
}
