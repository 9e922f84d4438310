//! Tokenization, rule-based entity extraction, lexicon sentiment and the
//! stylistic features used by the bias classifier.
//!
//! All text handling goes through one scanner so that the token stream seen
//! by [`preprocess`], the entity extractor and the sentiment scorer agree.
//! URLs are dropped before scanning; punctuation separates tokens (apostrophes
//! are deleted so `don't` becomes `dont`); a `#` at a token boundary followed
//! by a word character opens a hashtag, which keeps its `#` and may contain
//! underscores.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::collections::BTreeMap;

use crate::error::{Error, Result};

/// Ordered, lower-cased tokens with stopwords removed.
pub type TokenList = Vec<String>;

/// Entities of one text, lower-cased.
pub type EntitySet = BTreeSet<String>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

const ENGLISH_STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are", "as", "at", "be",
    "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could", "did", "do",
    "does", "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has", "have", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    "yourself", "yourselves",
];

impl Stopwords {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stopwords(words.into_iter().map(|w| w.as_ref().trim().to_lowercase()).filter(|w| !w.is_empty()).collect())
    }

    pub fn english() -> Self {
        Self::new(ENGLISH_STOPWORDS.iter())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn is_url(chunk: &str) -> bool {
    let lower = chunk.trim_start_matches(['(', '[', '<', '"', '\'']).to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

#[derive(Debug, Clone, PartialEq)]
struct ScannedToken {
    text: String,
    hashtag: bool,
    /// First character was upper-case in the raw text.
    capitalized: bool,
    /// First token of the text or of a sentence.
    sentence_initial: bool,
}

struct Scanner {
    out: Vec<ScannedToken>,
    buf: String,
    hashtag: bool,
    capitalized: bool,
    initial: bool,
    at_sentence_start: bool,
}

impl Scanner {
    fn flush(&mut self) {
        if self.buf.is_empty() {
            self.hashtag = false;
            return;
        }
        self.out.push(ScannedToken {
            text: core::mem::take(&mut self.buf),
            hashtag: self.hashtag,
            capitalized: self.capitalized,
            sentence_initial: self.initial,
        });
        self.hashtag = false;
        self.at_sentence_start = false;
    }

    fn push_word_char(&mut self, c: char) {
        if self.buf.is_empty() {
            self.capitalized = c.is_uppercase();
            self.initial = self.at_sentence_start;
        }
        self.buf.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
    }
}

fn scan(text: &str) -> Vec<ScannedToken> {
    let mut s = Scanner {
        out: Vec::new(),
        buf: String::new(),
        hashtag: false,
        capitalized: false,
        initial: false,
        at_sentence_start: true,
    };
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            if c == '#' && s.buf.is_empty() {
                let opens = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric() || *n == '_');
                if opens {
                    s.buf.push('#');
                    s.hashtag = true;
                    s.capitalized = false;
                    s.initial = s.at_sentence_start;
                }
                continue;
            }
            if c.is_alphanumeric() {
                s.push_word_char(c);
            } else if c == '_' && s.hashtag {
                s.buf.push('_');
            } else if c == '\'' || c == '\u{2019}' {
                // deleted, not a separator
            } else if matches!(c, '.' | '?' | '!') {
                s.flush();
                s.at_sentence_start = true;
            } else {
                s.flush();
            }
        }
        s.flush();
    }
    s.out
}

/// Case-folds, strips punctuation and URLs, and removes stopwords.
pub fn preprocess(text: &str, stopwords: &Stopwords) -> TokenList {
    scan(text)
        .into_iter()
        .map(|t| t.text)
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// Rule-based replacement for a noun/NER tagger.
///
/// An occurrence is an entity when it is a hashtag, or a non-stopword token
/// that starts upper-case away from a sentence start, or a non-stopword token
/// listed in the gazetteer.
#[derive(Debug, Clone, Default)]
pub struct EntityExtractor {
    pub stopwords: Stopwords,
    pub gazetteer: BTreeSet<String>,
}

impl EntityExtractor {
    pub fn new(stopwords: Stopwords) -> Self {
        EntityExtractor {
            stopwords,
            gazetteer: BTreeSet::new(),
        }
    }

    pub fn with_gazetteer<I, S>(mut self, entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.gazetteer
            .extend(entries.into_iter().map(|e| e.as_ref().trim().to_lowercase()).filter(|e| !e.is_empty()));
        self
    }

    /// Entity occurrences in text order (a multiset).
    pub fn occurrences(&self, text: &str) -> Vec<String> {
        scan(text)
            .into_iter()
            .filter(|t| {
                t.hashtag
                    || (!self.stopwords.contains(&t.text)
                        && ((t.capitalized && !t.sentence_initial) || self.gazetteer.contains(&t.text)))
            })
            .map(|t| t.text)
            .collect()
    }

    pub fn extract(&self, text: &str) -> EntitySet {
        self.occurrences(text).into_iter().collect()
    }

    pub fn preprocess(&self, text: &str) -> TokenList {
        preprocess(text, &self.stopwords)
    }
}

pub fn extract_entities(text: &str, stopwords: &Stopwords) -> EntitySet {
    EntityExtractor::new(stopwords.clone()).extract(text)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    entries: BTreeMap<String, (f64, f64)>,
    negators: BTreeSet<String>,
}

const DEFAULT_NEGATORS: &[&str] = &[
    "not", "no", "never", "dont", "doesnt", "didnt", "isnt", "wasnt", "arent", "werent", "cannot", "cant", "wont",
    "nothing", "nobody", "neither", "nor", "without",
];

// token, polarity, subjectivity
const BUILTIN_LEXICON: &[(&str, f64, f64)] = &[
    ("good", 0.7, 0.6),
    ("great", 0.8, 0.75),
    ("excellent", 1.0, 1.0),
    ("best", 1.0, 0.3),
    ("better", 0.5, 0.5),
    ("love", 0.5, 0.6),
    ("happy", 0.8, 1.0),
    ("strong", 0.43, 0.73),
    ("safe", 0.5, 0.5),
    ("fair", 0.7, 0.9),
    ("free", 0.4, 0.8),
    ("win", 0.8, 0.4),
    ("proud", 0.8, 1.0),
    ("hope", 0.3, 0.5),
    ("support", 0.3, 0.3),
    ("protect", 0.3, 0.3),
    ("success", 0.6, 0.5),
    ("beautiful", 0.85, 1.0),
    ("wonderful", 1.0, 1.0),
    ("right", 0.29, 0.54),
    ("bad", -0.7, 0.67),
    ("terrible", -1.0, 1.0),
    ("worst", -1.0, 1.0),
    ("worse", -0.4, 0.6),
    ("hate", -0.8, 0.9),
    ("sad", -0.5, 1.0),
    ("angry", -0.5, 1.0),
    ("weak", -0.38, 0.63),
    ("dangerous", -0.6, 0.9),
    ("corrupt", -0.5, 0.8),
    ("crisis", -0.4, 0.6),
    ("fail", -0.5, 0.3),
    ("failed", -0.5, 0.3),
    ("unfair", -0.5, 0.9),
    ("wrong", -0.5, 0.9),
    ("fake", -0.5, 1.0),
    ("disaster", -0.8, 0.9),
    ("stupid", -0.8, 1.0),
    ("evil", -1.0, 1.0),
    ("crime", -0.3, 0.5),
];

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Small general-purpose English lexicon with the default negators.
    pub fn builtin() -> Self {
        let mut lex = Self::new().with_default_negators();
        for &(token, polarity, subjectivity) in BUILTIN_LEXICON {
            lex.insert(token, polarity, subjectivity).expect("builtin lexicon in range");
        }
        lex
    }

    pub fn with_default_negators(mut self) -> Self {
        self.negators.extend(DEFAULT_NEGATORS.iter().map(|s| s.to_string()));
        self
    }

    pub fn insert(&mut self, token: &str, polarity: f64, subjectivity: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&polarity) {
            return Err(Error::InvalidRecord(format!("polarity {polarity} of {token:?} outside [-1, 1]")));
        }
        if !(0.0..=1.0).contains(&subjectivity) {
            return Err(Error::InvalidRecord(format!("subjectivity {subjectivity} of {token:?} outside [0, 1]")));
        }
        self.entries.insert(token.to_lowercase(), (polarity, subjectivity));
        Ok(())
    }

    pub fn add_negator(&mut self, token: &str) {
        self.negators.insert(token.to_lowercase());
    }

    pub fn get(&self, token: &str) -> Option<(f64, f64)> {
        self.entries.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    // (polarity, subjectivity) per matched token, negation applied
    fn matches(&self, text: &str) -> Vec<(f64, f64)> {
        let tokens: Vec<String> = scan(text).into_iter().map(|t| t.text).collect();
        tokens
            .iter()
            .enumerate()
            .filter_map(|(i, tok)| {
                let (pol, subj) = self.get(tok)?;
                let negated = i > 0 && self.is_negator(&tokens[i - 1]);
                Some((if negated { -pol } else { pol }, subj))
            })
            .collect()
    }
}

/// Mean polarity of lexicon hits; a hit directly after a negator flips sign.
pub fn sentiment(text: &str, lexicon: &SentimentLexicon) -> f64 {
    let hits = lexicon.matches(text);
    if hits.is_empty() {
        return 0.0;
    }
    (hits.iter().map(|h| h.0).sum::<f64>() / hits.len() as f64).clamp(-1.0, 1.0)
}

pub fn subjectivity(text: &str, lexicon: &SentimentLexicon) -> f64 {
    let hits = lexicon.matches(text);
    if hits.is_empty() {
        return 0.0;
    }
    (hits.iter().map(|h| h.1).sum::<f64>() / hits.len() as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StyleFeatures {
    /// 0 for Democrat speeches and for every post, 1 for Republican speeches.
    pub party_flag: u8,
    pub n_sen: usize,
    pub n_word: usize,
    pub n_char: usize,
    pub avg_sentence_len: f64,
    pub avg_word_len: f64,
    pub polarity: f64,
    pub subjectivity: f64,
}

impl StyleFeatures {
    pub const NAMES: [&'static str; 8] = [
        "party",
        "n_sen",
        "n_word",
        "n_char",
        "avg_sentence_len",
        "avg_word_len",
        "sentiment",
        "subjectivity",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        alloc::vec![
            f64::from(self.party_flag),
            self.n_sen as f64,
            self.n_word as f64,
            self.n_char as f64,
            self.avg_sentence_len,
            self.avg_word_len,
            self.polarity,
            self.subjectivity,
        ]
    }
}

pub fn style_features(text: &str, lexicon: &SentimentLexicon) -> StyleFeatures {
    let n_char = text.chars().filter(|c| !c.is_whitespace()).count();
    let kept: Vec<&str> = text.split_whitespace().filter(|c| !is_url(c)).collect();
    let body = kept.join(" ");

    let n_sen = body
        .split(['.', '?', '!'])
        .filter(|seg| seg.chars().any(char::is_alphanumeric))
        .count();
    let word_lens: Vec<usize> = kept
        .iter()
        .map(|chunk| chunk.chars().filter(|c| c.is_alphanumeric()).count())
        .filter(|&n| n > 0)
        .collect();
    let n_word = word_lens.len();
    let word_chars: usize = word_lens.iter().sum();

    StyleFeatures {
        party_flag: 0,
        n_sen,
        n_word,
        n_char,
        avg_sentence_len: crate::math::ratio(n_word as f64, n_sen as f64),
        avg_word_len: crate::math::ratio(word_chars as f64, n_word as f64),
        polarity: sentiment(text, lexicon),
        subjectivity: subjectivity(text, lexicon),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn preprocess_basic_rules() {
        let stop = Stopwords::new(["the"]);
        assert_eq!(preprocess("The Wall! #MAGA", &stop), toks(&["wall", "#maga"]));
        assert!(preprocess("", &stop).is_empty());
        assert_eq!(
            preprocess("Read https://t.co/abc and www.cnn.com now", &Stopwords::default()),
            toks(&["read", "and", "now"])
        );
        assert_eq!(preprocess("don't stop-believing", &Stopwords::default()), toks(&["dont", "stop", "believing"]));
        assert_eq!(preprocess("#Make_America a#b # lone", &Stopwords::default()), toks(&["#make_america", "a", "b", "lone"]));
    }

    #[test]
    fn preprocess_ten_sentence_fixture() {
        let text = "The Senate passed the bill today. Critics said it fails! Did Congress read it? \
                    We need #HealthCare now. Visit https://example.com/x for details. \
                    Taxes went up 3% in 2018. The border wall costs $5 billion. \
                    Obama's plan, they argue, was better. \"Jobs, jobs, jobs!\" he shouted. \
                    What about the @EPA report?";
        let stop = Stopwords::new(["the", "it", "we", "for", "in", "was", "he", "they", "what", "about", "did", "up"]);
        let expected = toks(&[
            "senate", "passed", "bill", "today", "critics", "said", "fails", "congress", "read", "need",
            "#healthcare", "now", "visit", "details", "taxes", "went", "3", "2018", "border", "wall", "costs", "5",
            "billion", "obamas", "plan", "argue", "better", "jobs", "jobs", "jobs", "shouted", "epa", "report",
        ]);
        assert_eq!(preprocess(text, &stop), expected);
    }

    #[test]
    fn entity_heuristic() {
        let stop = Stopwords::english();
        let ex = EntityExtractor::new(stop.clone());
        // sentence-initial capitals are not evidence of a noun
        assert_eq!(ex.extract("Obama visited Paris #healthcare"), toks(&["paris", "#healthcare"]).into_iter().collect());
        let ex = ex.with_gazetteer(["Obama"]);
        assert_eq!(
            ex.extract("Obama visited Paris #healthcare"),
            toks(&["obama", "paris", "#healthcare"]).into_iter().collect()
        );
        assert!(extract_entities("the and of it", &stop).is_empty());
        assert!(extract_entities("RUNNING quickly", &stop).is_empty());
        // a new sentence resets the position; stopwords are never entities
        assert_eq!(
            extract_entities("we met. Trump spoke in The Hague", &stop),
            toks(&["hague"]).into_iter().collect()
        );
    }

    #[test]
    fn entity_occurrences_are_a_multiset() {
        let ex = EntityExtractor::new(Stopwords::english());
        assert_eq!(ex.occurrences("I saw Biden and Biden saw #usa #USA"), toks(&["biden", "biden", "#usa", "#usa"]));
    }

    fn tiny_lexicon() -> SentimentLexicon {
        let mut lex = SentimentLexicon::new().with_default_negators();
        lex.insert("good", 1.0, 0.2).unwrap();
        lex.insert("bad", -1.0, 0.4).unwrap();
        lex.insert("awful", -0.5, 0.9).unwrap();
        lex
    }

    #[test]
    fn sentiment_cases() {
        let lex = tiny_lexicon();
        assert!((sentiment("good good bad", &lex) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sentiment("nothing matches here", &lex), 0.0);
        assert_eq!(sentiment("not good", &lex), -1.0);
        // negation reaches exactly one token back
        assert_eq!(sentiment("not very good", &lex), 1.0);
    }

    #[test]
    fn subjectivity_cases() {
        let lex = tiny_lexicon();
        assert_eq!(subjectivity("no hits", &lex), 0.0);
        let mut single = SentimentLexicon::new();
        single.insert("wow", 0.1, 0.8).unwrap();
        assert_eq!(subjectivity("wow", &single), 0.8);
        let mean = subjectivity("good bad awful", &lex);
        assert!((mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lexicon_rejects_out_of_range() {
        let mut lex = SentimentLexicon::new();
        assert!(lex.insert("x", 1.5, 0.5).is_err());
        assert!(lex.insert("x", 0.5, -0.1).is_err());
    }

    #[test]
    fn style_feature_cases() {
        let lex = SentimentLexicon::new();
        let f = style_features("Two words. Three more words.", &lex);
        assert_eq!((f.n_sen, f.n_word), (2, 5));
        assert_eq!(f.avg_sentence_len, 2.5);
        assert_eq!(f.n_char, 24);

        assert_eq!(style_features("", &lex), StyleFeatures::default());

        let f = style_features("hi", &lex);
        assert_eq!((f.n_sen, f.n_word, f.n_char), (1, 1, 2));
        assert_eq!(f.avg_word_len, 2.0);
        assert_eq!(f.to_vec().len(), StyleFeatures::NAMES.len());
    }

    #[test]
    fn builtin_lexicon_loads() {
        let lex = SentimentLexicon::builtin();
        assert!(lex.len() > 30);
        assert!(sentiment("a great day", &lex) > 0.0);
        assert!(sentiment("not great", &lex) < 0.0);
        let _ = vec![0];
    }
}
