//! Entity vocabulary and party-conditioned TF-IDF weights.
//!
//! TF is computed at party level: occurrences of an entity across all speeches
//! of a party divided by the total vocabulary-entity occurrences in those
//! speeches. IDF treats every speech as a document over the combined corpus,
//! smoothed as `ln((1 + N) / (1 + df)) + 1`.
//!
//! Speeches have no reliable capitalization signal, so an entity occurs in a
//! speech whenever a preprocessed token matches it; hashtag entities match
//! with or without the leading `#`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Forum, Party, Post, Speech};
use crate::error::{Error, Result};
use crate::textproc::{EntityExtractor, Stopwords};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityVocab {
    ids: BTreeMap<String, usize>,
    forum_counts: BTreeMap<(String, Forum), usize>,
}

impl EntityVocab {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, entity: &str) -> Option<usize> {
        self.ids.get(entity).copied()
    }

    pub fn contains(&self, entity: &str) -> bool {
        self.ids.contains_key(entity)
    }

    /// Entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.ids.keys().map(String::as_str)
    }

    /// Raw occurrence count of a retained entity within a forum.
    pub fn count(&self, entity: &str, forum: &Forum) -> usize {
        // BTreeMap lookup with a borrowed tuple key needs an owned key
        self.forum_counts.get(&(String::from(entity), forum.clone())).copied().unwrap_or(0)
    }

    pub fn from_entities<I, S>(entities: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = entities.into_iter().map(Into::into).collect();
        EntityVocab {
            ids: set.into_iter().enumerate().map(|(i, e)| (e, i)).collect(),
            forum_counts: BTreeMap::new(),
        }
    }
}

/// Keeps entities occurring at least `min_forum_freq` times in at least one
/// forum. Counts are per occurrence, not per post.
pub fn build_vocab(posts: &[Post], extractor: &EntityExtractor, min_forum_freq: usize) -> Result<EntityVocab> {
    if min_forum_freq == 0 {
        return Err(Error::InvalidConfig("min_forum_freq must be at least 1".into()));
    }
    let mut counts: BTreeMap<(String, Forum), usize> = BTreeMap::new();
    for post in posts {
        for entity in extractor.occurrences(&post.text) {
            *counts.entry((entity, post.forum.clone())).or_insert(0) += 1;
        }
    }
    let retained: BTreeSet<String> = counts
        .iter()
        .filter(|(_, &c)| c >= min_forum_freq)
        .map(|((e, _), _)| e.clone())
        .collect();
    counts.retain(|(e, _), _| retained.contains(e));
    Ok(EntityVocab {
        ids: retained.into_iter().enumerate().map(|(i, e)| (e, i)).collect(),
        forum_counts: counts,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartyTfidf {
    /// TF-IDF weight in the democrat context.
    pub tf_d: BTreeMap<String, f64>,
    /// TF-IDF weight in the republican context.
    pub tf_r: BTreeMap<String, f64>,
    pub idf: BTreeMap<String, f64>,
    pub doc_count_d: usize,
    pub doc_count_r: usize,
}

impl PartyTfidf {
    /// `(tf_d, tf_r)` for an entity; `None` when it is not in the vocabulary.
    pub fn weights(&self, entity: &str) -> Option<(f64, f64)> {
        Some((*self.tf_d.get(entity)?, *self.tf_r.get(entity)?))
    }

    /// Builds weights directly, e.g. for synthetic experiments. IDF is set to 1.
    pub fn from_weights<I, S>(weights: I) -> Self
    where
        I: IntoIterator<Item = (S, f64, f64)>,
        S: Into<String>,
    {
        let mut out = PartyTfidf::default();
        for (e, d, r) in weights {
            let e = e.into();
            out.tf_d.insert(e.clone(), d);
            out.tf_r.insert(e.clone(), r);
            out.idf.insert(e, 1.0);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }
}

fn match_key(token: &str) -> &str {
    token.strip_prefix('#').unwrap_or(token)
}

pub fn compute_party_tfidf(speeches: &[Speech], vocab: &EntityVocab, stopwords: &Stopwords) -> Result<PartyTfidf> {
    let doc_count_d = speeches.iter().filter(|s| s.party == Party::Democrat).count();
    let doc_count_r = speeches.len() - doc_count_d;
    if doc_count_d == 0 {
        return Err(Error::EmptyPartyCorpus("democrat"));
    }
    if doc_count_r == 0 {
        return Err(Error::EmptyPartyCorpus("republican"));
    }

    let entities: Vec<&str> = vocab.entities().collect();
    let mut by_key: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in entities.iter().enumerate() {
        by_key.entry(match_key(e)).or_default().push(i);
    }

    let mut occ_d = alloc::vec![0usize; entities.len()];
    let mut occ_r = alloc::vec![0usize; entities.len()];
    let mut df = alloc::vec![0usize; entities.len()];
    for speech in speeches {
        let mut key_counts: BTreeMap<&str, usize> = BTreeMap::new();
        let tokens = crate::textproc::preprocess(&speech.text, stopwords);
        for tok in &tokens {
            if let Some((k, _)) = by_key.get_key_value(match_key(tok)) {
                *key_counts.entry(k).or_insert(0) += 1;
            }
        }
        let occ = match speech.party {
            Party::Democrat => &mut occ_d,
            Party::Republican => &mut occ_r,
        };
        for (k, c) in key_counts {
            for &i in &by_key[k] {
                occ[i] += c;
                df[i] += 1;
            }
        }
    }

    let total_d: usize = occ_d.iter().sum();
    let total_r: usize = occ_r.iter().sum();
    let n_docs = speeches.len() as f64;
    let mut out = PartyTfidf {
        doc_count_d,
        doc_count_r,
        ..PartyTfidf::default()
    };
    for (i, e) in entities.iter().enumerate() {
        let idf = crate::math::ln((1.0 + n_docs) / (1.0 + df[i] as f64)) + 1.0;
        let tf_d = crate::math::ratio(occ_d[i] as f64, total_d as f64);
        let tf_r = crate::math::ratio(occ_r[i] as f64, total_r as f64);
        out.tf_d.insert(String::from(*e), tf_d * idf);
        out.tf_r.insert(String::from(*e), tf_r * idf);
        out.idf.insert(String::from(*e), idf);
    }
    Ok(out)
}
