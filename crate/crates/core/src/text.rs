//! Text cleaning, pluggable segmentation, stopword removal and the length
//! filter applied before anything is stored.
//!
//! All functions here are pure; a [`Pipeline`] can be shared between threads.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Default minimum review length, in tokens, after cleaning.
pub const DEFAULT_MIN_LEN: usize = 5;

/// Name under which the whitespace/punctuation splitter is registered.
pub const WHITESPACE: &str = "whitespace";
/// Name conventionally used for a [`DictionarySegmenter`].
pub const DICTIONARY: &str = "dictionary";

/// Removes URLs, HTML entities, emoticons/pictographs and control characters,
/// then trims and collapses whitespace runs to a single space.
///
/// Each removed span is replaced by a separator so neighbouring words never
/// fuse. The pattern set is a best-effort stand-in for typical review junk.
pub fn clean_text(raw: &str) -> String {
    let mut spaced = String::with_capacity(raw.len());
    let mut prev: Option<char> = None;
    let mut rest = raw;
    while let Some(c) = rest.chars().next() {
        let at_boundary = prev.is_none_or(|p| !p.is_alphanumeric());
        let junk_len = if at_boundary { url_len(rest) } else { None }.or_else(|| entity_len(rest));
        if let Some(len) = junk_len {
            spaced.push(' ');
            prev = rest[..len].chars().next_back();
            rest = &rest[len..];
            continue;
        }
        spaced.push(if is_junk_char(c) { ' ' } else { c });
        prev = Some(c);
        rest = &rest[c.len_utf8()..];
    }

    let mut out = String::with_capacity(spaced.len());
    for word in spaced.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

fn starts_with_ignore_ascii_case(s: &str, prefix: &str) -> bool {
    s.len() >= prefix.len()
        && s.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
}

/// Length in bytes of a URL starting at the head of `s`.
fn url_len(s: &str) -> Option<usize> {
    let scheme = ["http://", "https://", "www."]
        .iter()
        .find(|p| starts_with_ignore_ascii_case(s, p))?;
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    (end > scheme.len()).then_some(end)
}

/// Length in bytes of an HTML entity (`&amp;`, `&#39;`, `&#x1F600;`) at the
/// head of `s`.
fn entity_len(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    if bytes.first() != Some(&b'&') {
        return None;
    }
    let (offset, accept): (usize, fn(&u8) -> bool) = match bytes.get(1..3) {
        Some([b'#', b'x' | b'X']) => (3, u8::is_ascii_hexdigit),
        _ if bytes.get(1) == Some(&b'#') => (2, u8::is_ascii_digit),
        _ => (1, u8::is_ascii_alphanumeric),
    };
    let body = &bytes[offset.min(bytes.len())..];
    let run = body.iter().take(32).take_while(|b| accept(b)).count();
    if run == 0 || body.get(run) != Some(&b';') {
        return None;
    }
    // Named entities start with a letter.
    if offset == 1 && !body[0].is_ascii_alphabetic() {
        return None;
    }
    Some(offset + run + 1)
}

/// Emoticon, pictograph, joiner and control code points.
fn is_junk_char(c: char) -> bool {
    if c.is_control() {
        return true;
    }
    matches!(c as u32,
        0x1F000..=0x1FAFF   // pictographs, emoticons, transport, flags, skin tones
        | 0x2600..=0x27BF   // miscellaneous symbols and dingbats
        | 0x2B00..=0x2BFF   // stars, arrows used as emoji
        | 0xE000..=0xF8FF   // private use (vendor emoji)
        | 0xFE00..=0xFE0F   // variation selectors
        | 0x200B..=0x200F   // zero-width space/joiners, direction marks
        | 0x20E3            // combining keycap
        | 0xFEFF            // byte-order mark
        | 0xE0020..=0xE007F // tag characters
    )
}

/// Splits cleaned text into raw (not yet normalized) tokens.
pub trait Segmenter: Send + Sync {
    fn segment(&self, text: &str) -> Vec<String>;
}

/// Splits on whitespace and on any character that is neither alphanumeric
/// nor an underscore.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceSegmenter;

impl Segmenter for WhitespaceSegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .filter(|t| !t.is_empty())
            .map(ToOwned::to_owned)
            .collect()
    }
}

/// Forward maximum matching against a word list, for scripts written
/// without spaces.
///
/// Within each alphanumeric run the longest dictionary word starting at the
/// current position is taken. Where nothing matches, an ASCII alphanumeric
/// run is emitted whole and any other character on its own.
#[derive(Debug, Clone, Default)]
pub struct DictionarySegmenter {
    words: BTreeSet<String>,
    longest: usize,
}

impl DictionarySegmenter {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: BTreeSet<String> = words.into_iter().map(Into::into).filter(|w| !w.is_empty()).collect();
        let longest = words.iter().map(|w| w.chars().count()).max().unwrap_or(0);
        DictionarySegmenter { words, longest }
    }

    /// Parses a dictionary file: one entry per line, first whitespace-separated
    /// field is the word (extra columns such as frequencies are ignored), `#`
    /// starts a comment.
    pub fn parse(source: &str) -> Self {
        Self::new(
            source
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .filter_map(|l| l.split_whitespace().next())
                .map(str::to_lowercase),
        )
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn segment_run(&self, run: &str, out: &mut Vec<String>) {
        let chars: Vec<(usize, char)> = run.char_indices().collect();
        let byte_at = |i: usize| chars.get(i).map_or(run.len(), |&(b, _)| b);
        let mut i = 0;
        while i < chars.len() {
            let start = byte_at(i);
            let max = self.longest.min(chars.len() - i);
            let matched = (1..=max).rev().find(|&len| {
                let word = &run[start..byte_at(i + len)];
                self.words.contains(&word.to_lowercase())
            });
            let len = match matched {
                Some(len) => len,
                None if chars[i].1.is_ascii_alphanumeric() => {
                    chars[i..].iter().take_while(|(_, c)| c.is_ascii_alphanumeric()).count()
                }
                None => 1,
            };
            out.push(run[start..byte_at(i + len)].to_owned());
            i += len;
        }
    }
}

impl Segmenter for DictionarySegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for run in text.split(|c: char| !(c.is_alphanumeric() || c == '_')).filter(|t| !t.is_empty()) {
            self.segment_run(run, &mut out);
        }
        out
    }
}

pub type SegmenterHandle = Arc<dyn Segmenter>;

/// Named segmenters. A fresh registry knows only [`WHITESPACE`].
#[derive(Clone)]
pub struct SegmenterRegistry {
    entries: BTreeMap<String, SegmenterHandle>,
}

impl Default for SegmenterRegistry {
    fn default() -> Self {
        let mut entries: BTreeMap<String, SegmenterHandle> = BTreeMap::new();
        entries.insert(WHITESPACE.to_string(), Arc::new(WhitespaceSegmenter));
        SegmenterRegistry { entries }
    }
}

impl SegmenterRegistry {
    pub fn register(&mut self, name: impl Into<String>, segmenter: SegmenterHandle) {
        self.entries.insert(name.into(), segmenter);
    }

    pub fn get(&self, name: &str) -> Result<SegmenterHandle> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownSegmenter(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Parses a stopword list: one entry per line, `#` starts a comment,
/// entries are trimmed and lowercased.
pub fn parse_stopwords(source: &str) -> BTreeSet<String> {
    source
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Segments `text`, lowercases the tokens and drops stopwords, keeping order
/// and duplicates.
pub fn tokenize(text: &str, segmenter: &dyn Segmenter, stopwords: &BTreeSet<String>) -> Vec<String> {
    segmenter
        .segment(text)
        .into_iter()
        .map(|t| t.to_lowercase())
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .collect()
}

/// Keep flag for the minimum-length filter.
pub fn filter_review(tokens: &[String], min_len: usize) -> bool {
    tokens.len() >= min_len
}

/// Cleaning, segmentation, stopwords and length filter bundled together.
#[derive(Clone)]
pub struct Pipeline {
    pub segmenter: SegmenterHandle,
    pub stopwords: BTreeSet<String>,
    pub min_len: usize,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline")
            .field("stopwords", &self.stopwords.len())
            .field("min_len", &self.min_len)
            .finish_non_exhaustive()
    }
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            segmenter: Arc::new(WhitespaceSegmenter),
            stopwords: BTreeSet::new(),
            min_len: DEFAULT_MIN_LEN,
        }
    }
}

impl Pipeline {
    pub fn new(segmenter: SegmenterHandle, stopwords: BTreeSet<String>, min_len: usize) -> Self {
        Pipeline { segmenter, stopwords, min_len }
    }

    /// Clean, then tokenize.
    pub fn tokens_of(&self, raw: &str) -> Vec<String> {
        tokenize(&clean_text(raw), self.segmenter.as_ref(), &self.stopwords)
    }

    pub fn keeps(&self, tokens: &[String]) -> bool {
        filter_review(tokens, self.min_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn strings(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn clean_text_examples() {
        assert_eq!(clean_text("bad battery http://t.cn/xyz"), "bad battery");
        assert_eq!(clean_text(""), "");
        assert_eq!(clean_text("screen 😡 cracked"), "screen cracked");
    }

    #[test]
    fn clean_text_patterns() {
        assert_eq!(clean_text("  see WWW.example.com/x now "), "see now");
        assert_eq!(clean_text("a&amp;b &#39;ok&#x27;"), "a b ok");
        assert_eq!(clean_text("tab\there\u{0007}bell"), "tab here bell");
        assert_eq!(clean_text("thumbs👍🏻up"), "thumbs up");
        assert_eq!(clean_text("❤️love"), "love");
        // Not a URL when glued to a word, not an entity without `;`.
        assert_eq!(clean_text("awww.great & fine"), "awww.great & fine");
        assert_eq!(clean_text("https://"), "https://");
    }

    #[test]
    fn tokenize_examples() {
        let stop = parse_stopwords("the\n");
        assert_eq!(
            tokenize("the battery died fast", &WhitespaceSegmenter, &stop),
            strings(&["battery", "died", "fast"])
        );
        assert!(tokenize("", &WhitespaceSegmenter, &stop).is_empty());
        assert_eq!(
            tokenize("battery battery", &WhitespaceSegmenter, &BTreeSet::new()),
            strings(&["battery", "battery"])
        );
    }

    #[test]
    fn tokenize_lowercases_and_splits_punctuation() {
        let stop = parse_stopwords("# comment\n  The  \nis # trailing\n\n");
        assert_eq!(stop.len(), 2);
        assert_eq!(
            tokenize("The Screen, is CRACKED!!", &WhitespaceSegmenter, &stop),
            strings(&["screen", "cracked"])
        );
    }

    #[test]
    fn filter_review_boundary() {
        assert!(!filter_review(&strings(&["a", "b", "c", "d"]), 5));
        assert!(filter_review(&strings(&["a", "b", "c", "d", "e"]), 5));
        assert!(!filter_review(&[], 5));
    }

    #[test]
    fn dictionary_segmenter_longest_match() {
        let seg = DictionarySegmenter::parse("电池 100 n\n电池续航\n屏幕\n# c\n");
        assert_eq!(seg.len(), 3);
        assert_eq!(seg.segment("电池续航很差,屏幕ok"), strings(&["电池续航", "很", "差", "屏幕", "ok"]));
        assert_eq!(seg.segment("电池坏了"), strings(&["电池", "坏", "了"]));
    }

    #[test]
    fn registry_lookup() {
        let mut reg = SegmenterRegistry::default();
        assert!(reg.get(WHITESPACE).is_ok());
        assert_eq!(reg.get("jieba").err(), Some(Error::UnknownSegmenter("jieba".into())));
        reg.register(DICTIONARY, Arc::new(DictionarySegmenter::new(vec!["ab"])));
        assert_eq!(reg.get(DICTIONARY).unwrap().segment("abab"), strings(&["ab", "ab"]));
        assert_eq!(reg.names().count(), 2);
    }

    #[test]
    fn pipeline_cleans_before_tokenizing() {
        let pipeline = Pipeline::default();
        assert_eq!(
            pipeline.tokens_of("Battery&amp;screen 😡 https://x.y/z BAD"),
            strings(&["battery", "screen", "bad"])
        );
    }

    proptest! {
        #[test]
        fn clean_text_is_idempotent(s in "\\PC{0,40}|[a-z &#;:/.w😡\u{200d}\t]{0,40}") {
            let once = clean_text(&s);
            prop_assert_eq!(clean_text(&once), once);
        }

        #[test]
        fn tokens_never_empty_or_stopwords(s in "[a-zA-Z ,.!]{0,60}") {
            let stop = parse_stopwords("a\nthe\nis");
            let toks = tokenize(&s, &WhitespaceSegmenter, &stop);
            prop_assert!(toks.iter().all(|t| !t.is_empty() && !stop.contains(t)));
        }

        #[test]
        fn filter_is_monotone_in_min_len(lens in proptest::collection::vec(0usize..12, 0..30), lo in 0usize..10, step in 0usize..5) {
            let docs: Vec<Vec<String>> = lens.iter().map(|&n| vec![String::from("w"); n]).collect();
            let kept = |m: usize| docs.iter().filter(|d| filter_review(d, m)).count();
            prop_assert!(kept(lo + step) <= kept(lo));
        }
    }
}
