//! Raw text to ranked lists through the public API only.

use revrank_core::bm25::InvertedIndex;
use revrank_core::embedding::EmbeddingTable;
use revrank_core::lexicon::{expand_lexicon, AutoJudge, EmotionLexicon, ExpansionConfig, Side};
use revrank_core::rank::{MethodId, Query, Ranker, Stores};
use revrank_core::review::{process_review, Review};
use revrank_core::reward::RewardVariant;
use revrank_core::text::Pipeline;

fn raw(id: &str, score: u8, text: &str) -> Review {
    Review {
        id: id.into(),
        product_id: "p1".into(),
        category: "phone".into(),
        score,
        raw_text: text.into(),
        tokens: Vec::new(),
    }
}

fn corpus() -> Vec<Review> {
    let pipeline = Pipeline::default();
    let mut reviews = vec![
        raw("r1", 1, "The BATTERY drains within hours, terrible battery life!!"),
        raw("r2", 1, "Screen flickers constantly and the display is broken"),
        raw("r3", 1, "Battery swelled up, charger also broken, awful purchase"),
        raw("r4", 1, "Delivery took three weeks and the courier was rude"),
    ];
    for r in &mut reviews {
        process_review(r, &pipeline);
    }
    reviews
}

#[test]
fn bm25_prefers_repeated_attribute() {
    let reviews = corpus();
    assert!(reviews[0].tokens.iter().filter(|t| *t == "battery").count() == 2);
    let index = InvertedIndex::build(reviews.iter().map(|r| (r.id.as_str(), r.tokens.as_slice()))).unwrap();
    let mut stores = Stores::new(&reviews);
    stores.index = Some(&index);
    let ranker = Ranker::new(stores).unwrap();
    let attribute = vec!["battery".to_string()];
    let list = ranker
        .rank(&Query { attribute: &attribute, method: MethodId::Bm25, k: 10, category: None })
        .unwrap();
    assert_eq!(list.ids(), ["r1", "r3"]);
}

#[test]
fn emotion_reward_reorders_embedding_ranking() {
    let reviews = corpus();
    let mut table = EmbeddingTable::new(2).unwrap();
    for (w, v) in [("battery", [1.0, 0.0]), ("drains", [0.9, 0.3]), ("swelled", [0.8, 0.2]), ("screen", [0.1, 1.0])] {
        table.insert(w, &v).unwrap();
    }
    let lexicon = EmotionLexicon::from_seeds(["great"], ["terrible", "awful", "broken", "rude"]).unwrap();
    let mut stores = Stores::new(&reviews);
    stores.table = Some(&table);
    stores.lexicon = Some(&lexicon);
    let ranker = Ranker::new(stores).unwrap();
    let attribute = vec!["battery".to_string()];
    let rank = |v| {
        ranker
            .rank(&Query { attribute: &attribute, method: MethodId::Embed(v), k: 4, category: None })
            .unwrap()
    };
    let plain = rank(RewardVariant::None);
    let negative_first = rank(RewardVariant::ISigmoid);
    assert_eq!(plain.entries.len(), negative_first.entries.len());
    for e in &negative_first.entries {
        let e_n = e.e_n.unwrap();
        assert!(e_n <= 0.0, "{} has e_n {e_n}", e.review_id);
    }
    let flipped = rank(RewardVariant::Sigmoid);
    let score = |list: &revrank_core::rank::RankedList, id: &str| {
        list.entries.iter().find(|e| e.review_id == id).unwrap().score
    };
    assert!(score(&negative_first, "r3") > score(&flipped, "r3"));
}

#[test]
fn expansion_then_ranking() {
    let docs: Vec<Vec<String>> = (0..40)
        .map(|i| {
            let words: &[&str] = if i % 2 == 0 { &["bad", "flimsy", "case"] } else { &["good", "sturdy", "case"] };
            words.iter().map(|w| w.to_string()).collect()
        })
        .collect();
    let refs: Vec<&[String]> = docs.iter().map(Vec::as_slice).collect();
    let seeds = EmotionLexicon::from_seeds(["good"], ["bad"]).unwrap();
    let config = ExpansionConfig::default();
    let mut judge = AutoJudge { admit_threshold: config.admit_threshold };
    let grown = expand_lexicon(&refs, &seeds, &config, &mut judge).unwrap().lexicon;
    assert_eq!(grown.side_of("flimsy"), Some(Side::Negative));
    assert_eq!(grown.side_of("sturdy"), Some(Side::Positive));
    assert_eq!(grown.side_of("case"), None);
}
