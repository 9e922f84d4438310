//! Corpus record types and the descriptive reports computed over them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Party {
    Democrat,
    Republican,
}

impl Party {
    /// Short code used in files: `D` or `R`.
    pub fn code(self) -> &'static str {
        match self {
            Party::Democrat => "D",
            Party::Republican => "R",
        }
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "Democrat" => Ok(Party::Democrat),
            "R" | "Republican" => Ok(Party::Republican),
            other => Err(Error::InvalidRecord(format!("unknown party {other:?}"))),
        }
    }
}

/// Calendar date in the proleptic Gregorian calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(Error::InvalidRecord(format!("invalid date {year}-{month}-{day}")));
        }
        Ok(Date { year, month, day })
    }

    /// UTC calendar day containing `secs` seconds since the Unix epoch.
    pub fn from_epoch_seconds(secs: i64) -> Self {
        civil_from_days(secs.div_euclid(86_400))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl FromStr for Date {
    type Err = Error;

    /// Accepts `YYYY-MM-DD`, optionally followed by a `T...` time part.
    fn from_str(s: &str) -> Result<Self> {
        let day_part = s.split('T').next().unwrap_or(s);
        let bad = || Error::InvalidRecord(format!("invalid ISO-8601 date {s:?}"));
        let mut it = day_part.splitn(3, '-');
        let year = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let month = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let day = it.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        Date::new(year, month, day).map_err(|_| bad())
    }
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        _ => 28,
    }
}

// Howard Hinnant's days-to-civil algorithm.
fn civil_from_days(days: i64) -> Date {
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = (doy - (153 * mp + 2) / 5 + 1) as u8;
    let month = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
    let year = (yoe + era * 400 + i64::from(month <= 2)) as i32;
    Date { year, month, day }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Speech {
    pub id: String,
    pub party: Party,
    pub text: String,
    pub date: Option<Date>,
}

impl Speech {
    pub fn new(id: impl Into<String>, party: Party, text: impl Into<String>, date: Option<Date>) -> Result<Self> {
        let speech = Speech {
            id: id.into(),
            party,
            text: text.into(),
            date,
        };
        speech.validate()?;
        Ok(speech)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidRecord("empty speech id".into()));
        }
        if self.text.trim().is_empty() {
            return Err(Error::InvalidRecord(format!("speech {} has empty text", self.id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Forum {
    Twitter,
    Gab,
    Other(String),
}

impl Forum {
    pub fn name(&self) -> &str {
        match self {
            Forum::Twitter => "twitter",
            Forum::Gab => "gab",
            Forum::Other(name) => name,
        }
    }
}

impl From<&str> for Forum {
    fn from(s: &str) -> Self {
        match s.to_ascii_lowercase().as_str() {
            "twitter" => Forum::Twitter,
            "gab" => Forum::Gab,
            _ => Forum::Other(s.to_string()),
        }
    }
}

impl fmt::Display for Forum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Post {
    pub id: String,
    pub forum: Forum,
    pub author: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub text: String,
    pub parent_id: Option<String>,
    pub author_follower_count: Option<u64>,
    pub reshare_count: Option<u64>,
    pub urls: Vec<String>,
}

impl Post {
    /// Minimal constructor; optional fields default to absent.
    pub fn new(id: impl Into<String>, forum: Forum, author: impl Into<String>, timestamp: i64, text: impl Into<String>) -> Self {
        Post {
            id: id.into(),
            forum,
            author: author.into(),
            timestamp,
            text: text.into(),
            parent_id: None,
            author_follower_count: None,
            reshare_count: None,
            urls: Vec::new(),
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent_id = Some(parent.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidRecord("empty post id".into()));
        }
        if self.parent_id.as_deref() == Some(self.id.as_str()) {
            return Err(Error::InvalidRecord(format!("post {} is its own parent", self.id)));
        }
        if self.timestamp < 0 {
            return Err(Error::InvalidRecord(format!("post {} has negative timestamp", self.id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MediaBucket {
    FarLeft,
    Left,
    Center,
    Right,
    FarRight,
    /// URL domain absent from the ratings table.
    Unknown,
}

impl MediaBucket {
    pub fn name(self) -> &'static str {
        match self {
            MediaBucket::FarLeft => "far-left",
            MediaBucket::Left => "left",
            MediaBucket::Center => "center",
            MediaBucket::Right => "right",
            MediaBucket::FarRight => "far-right",
            MediaBucket::Unknown => "unknown",
        }
    }
}

impl FromStr for MediaBucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "far-left" => MediaBucket::FarLeft,
            "left" => MediaBucket::Left,
            "center" => MediaBucket::Center,
            "right" => MediaBucket::Right,
            "far-right" => MediaBucket::FarRight,
            other => return Err(Error::InvalidRecord(format!("unknown media bias bucket {other:?}"))),
        })
    }
}

/// Lower-cases a URL or bare host and strips scheme, credentials, port,
/// path and a leading `www.`.
pub fn normalize_domain(url: &str) -> String {
    let s = url.trim();
    let s = match s.find("://") {
        Some(i) => &s[i + 3..],
        None => s,
    };
    let host = s.split(['/', '?', '#']).next().unwrap_or("");
    let host = host.rsplit('@').next().unwrap_or(host);
    let host = host.split(':').next().unwrap_or(host);
    let host = host.to_lowercase();
    match host.strip_prefix("www.") {
        Some(rest) => rest.to_string(),
        None => host,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MediaBiasTable {
    ratings: BTreeMap<String, MediaBucket>,
}

impl MediaBiasTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, domain: &str, bucket: MediaBucket) {
        self.ratings.insert(normalize_domain(domain), bucket);
    }

    pub fn lookup(&self, url: &str) -> MediaBucket {
        self.ratings
            .get(&normalize_domain(url))
            .copied()
            .unwrap_or(MediaBucket::Unknown)
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, MediaBucket)> {
        self.ratings.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn posts_per_day(posts: &[Post]) -> BTreeMap<Date, usize> {
    let mut counts = BTreeMap::new();
    for post in posts {
        *counts.entry(Date::from_epoch_seconds(post.timestamp)).or_insert(0) += 1;
    }
    counts
}

/// Counts shared URLs by the media-bias bucket of their domain. A post
/// contributes once per URL.
pub fn media_bias_histogram(posts: &[Post], table: &MediaBiasTable) -> BTreeMap<MediaBucket, usize> {
    let mut counts = BTreeMap::new();
    for url in posts.iter().flat_map(|p| p.urls.iter()) {
        *counts.entry(table.lookup(url)).or_insert(0) += 1;
    }
    counts
}
