//! Line-delimited corpus files and the small text resources (stopwords,
//! lexicon, gazetteer, media-bias table).

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use biasline_core::corpus::{Date, Forum, MediaBiasTable, MediaBucket, Party, Post, Speech};
use biasline_core::textproc::{SentimentLexicon, Stopwords};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadMode {
    /// First bad record aborts the load.
    #[default]
    Strict,
    /// Bad records are skipped and reported as warnings.
    Lenient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub warnings: Vec<String>,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub id: String,
    pub party: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
}

impl SpeechRecord {
    pub fn into_speech(self) -> std::result::Result<Speech, String> {
        let party: Party = self.party.parse().map_err(|_| format!("unknown party {:?}", self.party))?;
        let date = match self.date {
            Some(d) => Some(d.parse::<Date>().map_err(|_| format!("field date: invalid date {d:?}"))?),
            None => None,
        };
        Speech::new(self.id, party, self.text, date).map_err(|e| e.to_string())
    }

    pub fn from_speech(s: &Speech) -> Self {
        SpeechRecord {
            id: s.id.clone(),
            party: s.party.code().to_string(),
            text: s.text.clone(),
            date: s.date.map(|d| d.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub id: String,
    pub forum: String,
    pub author: String,
    pub timestamp: i64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub followers: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reshares: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub urls: Vec<String>,
}

impl PostRecord {
    pub fn into_post(self) -> std::result::Result<Post, String> {
        let post = Post {
            id: self.id,
            forum: Forum::from(self.forum.as_str()),
            author: self.author,
            timestamp: self.timestamp,
            text: self.text,
            parent_id: self.parent_id,
            author_follower_count: self.followers,
            reshare_count: self.reshares,
            urls: self.urls,
        };
        post.validate().map_err(|e| e.to_string())?;
        Ok(post)
    }

    pub fn from_post(p: &Post) -> Self {
        PostRecord {
            id: p.id.clone(),
            forum: p.forum.name().to_string(),
            author: p.author.clone(),
            timestamp: p.timestamp,
            text: p.text.clone(),
            parent_id: p.parent_id.clone(),
            followers: p.author_follower_count,
            reshares: p.reshare_count,
            urls: p.urls.clone(),
        }
    }
}

struct LineError {
    message: String,
    /// Aborts the load even in lenient mode.
    fatal: bool,
}

impl From<String> for LineError {
    fn from(message: String) -> Self {
        LineError { message, fatal: false }
    }
}

/// Parses JSON lines; blank lines are skipped. `convert` turns a decoded
/// record into the domain type or explains why it is invalid.
fn parse_lines<R, T>(
    text: &str,
    path: &Path,
    mode: LoadMode,
    mut convert: impl FnMut(R, usize) -> std::result::Result<T, LineError>,
) -> Result<Loaded<T>>
where
    R: for<'de> Deserialize<'de>,
{
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let outcome = serde_json::from_str::<R>(line)
            .map_err(|e| LineError::from(e.to_string()))
            .and_then(|r| convert(r, line_no));
        match outcome {
            Ok(v) => records.push(v),
            Err(e) if e.fatal || mode == LoadMode::Strict => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: e.message,
                })
            }
            Err(e) => warnings.push(format!("{}:{line_no}: {}", path.display(), e.message)),
        }
    }
    Ok(Loaded { records, warnings })
}

pub fn parse_speeches(text: &str, path: &Path, mode: LoadMode) -> Result<Loaded<Speech>> {
    parse_lines(text, path, mode, |r: SpeechRecord, _| Ok(r.into_speech()?))
}

pub fn load_speeches(path: &Path, mode: LoadMode) -> Result<Loaded<Speech>> {
    parse_speeches(&read_text(path)?, path, mode)
}

/// Parses posts. A duplicate id is an error in either mode and names both
/// lines.
pub fn parse_posts(text: &str, path: &Path, mode: LoadMode) -> Result<Loaded<Post>> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    parse_lines(text, path, mode, |r: PostRecord, line| {
        let post = r.into_post()?;
        if let Some(&first) = seen.get(&post.id) {
            return Err(LineError {
                message: format!("duplicate post id {:?} (first seen at line {first})", post.id),
                fatal: true,
            });
        }
        seen.insert(post.id.clone(), line);
        Ok(post)
    })
}

pub fn load_posts(path: &Path, mode: LoadMode) -> Result<Loaded<Post>> {
    parse_posts(&read_text(path)?, path, mode)
}

fn to_jsonl<T: Serialize>(items: impl Iterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn speeches_to_jsonl(speeches: &[Speech]) -> String {
    to_jsonl(speeches.iter().map(SpeechRecord::from_speech))
}

pub fn posts_to_jsonl(posts: &[Post]) -> String {
    to_jsonl(posts.iter().map(PostRecord::from_post))
}

/// Non-empty, non-comment lines (`#` starts a comment only at column 0 when
/// followed by a space).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with("# "))
}

pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    Ok(content_lines(&read_text(path)?).map(|(_, l)| l.trim().to_lowercase()).collect())
}

pub fn load_stopwords(path: &Path) -> Result<Stopwords> {
    Ok(Stopwords::new(read_word_list(path)?))
}

/// `token<TAB>polarity<TAB>subjectivity` lines plus an optional negator list.
pub fn load_lexicon(path: &Path, negators: Option<&Path>) -> Result<SentimentLexicon> {
    let mut lex = SentimentLexicon::new();
    for (line, l) in content_lines(&read_text(path)?) {
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let num = |s: &str, name: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("field {name}: not a number: {s:?}")));
        let polarity = num(fields[1], "polarity")?;
        let subjectivity = num(fields[2], "subjectivity")?;
        lex.insert(&fields[0].trim().to_lowercase(), polarity, subjectivity)
            .map_err(|e| bad(e.to_string()))?;
    }
    match negators {
        Some(p) => {
            for w in read_word_list(p)? {
                lex.add_negator(&w);
            }
        }
        None => lex = lex.with_default_negators(),
    }
    Ok(lex)
}

/// `domain<TAB>bucket` lines.
pub fn load_media_bias(path: &Path) -> Result<MediaBiasTable> {
    let mut table = MediaBiasTable::new();
    for (line, l) in content_lines(&read_text(path)?) {
        let (domain, bucket) = l.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: "expected domain<TAB>bucket".into(),
        })?;
        let bucket: MediaBucket = bucket.trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("unknown bucket {:?}", bucket.trim()),
        })?;
        table.insert(domain.trim(), bucket);
    }
    Ok(table)
}

/// Resolves `p` against `base` unless it is absolute.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
