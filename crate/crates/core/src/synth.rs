//! Seeded synthetic speeches and reply cascades with a planted shift rule.
//!
//! Democrat speeches use `#leftK` hashtags and republican speeches `#rightK`,
//! so a post carrying only one side's hashtags scores exactly -1 or +1. In
//! each cascade only the root carries hashtags inside the training prefix.
//! Every post at the label level carries the root side's hashtags, or the
//! opposite side's when the cascade is planted to shift. A cascade shifts iff
//! its root influence (direct replies over root followers) exceeds
//! `threshold`, with the outcome flipped at rate `label_noise`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::corpus::{Forum, Party, Post, Speech};
use crate::error::{Error, Result};
use crate::rng::{self, ChaCha8Rng};

const FILLER: &[&str] = &[
    "policy", "vote", "people", "country", "plan", "bill", "state", "city", "family", "work", "jobs", "school",
    "health", "market", "tax", "budget", "court", "border", "energy", "water", "road", "farm", "price", "wage",
    "news", "story", "report", "debate", "speech", "rally", "office", "leader", "district", "council", "program",
    "member", "question", "answer", "issue", "today", "week", "year", "local", "public", "reform", "support",
    "change", "choice", "record", "future",
];

const MOOD: &[&str] = &["good", "great", "bad", "terrible", "happy", "sad", "strong", "weak", "fair", "wrong"];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthConfig {
    pub cascades: usize,
    pub seed: u64,
    pub min_levels: usize,
    pub max_levels: usize,
    /// Zero-indexed level whose posts decide the label.
    pub label_level: usize,
    pub threshold: f64,
    pub label_noise: f64,
    pub tags_per_side: usize,
    pub max_direct_replies: usize,
    pub max_level_width: usize,
    pub speeches_per_party: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            cascades: 2000,
            seed: 7,
            min_levels: 5,
            max_levels: 7,
            label_level: 4,
            threshold: 0.15,
            label_noise: 0.05,
            tags_per_side: 12,
            max_direct_replies: 8,
            max_level_width: 6,
            speeches_per_party: 40,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cascades == 0 || self.tags_per_side == 0 || self.speeches_per_party == 0 {
            return Err(Error::InvalidConfig("synthetic corpus sizes must be positive".into()));
        }
        if self.min_levels < 2 || self.min_levels > self.max_levels || self.label_level >= self.min_levels || self.label_level == 0 {
            return Err(Error::InvalidConfig(
                "synthetic levels need 2 <= min_levels <= max_levels and 1 <= label_level < min_levels".into(),
            ));
        }
        if self.max_direct_replies < 2 || self.max_level_width == 0 {
            return Err(Error::InvalidConfig("max_direct_replies must be >= 2 and max_level_width >= 1".into()));
        }
        if !(0.0..=0.5).contains(&self.label_noise) || !(self.threshold > 0.0) {
            return Err(Error::InvalidConfig("label_noise must be in [0, 0.5] and threshold positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCascade {
    pub root_id: String,
    pub root_influence: f64,
    /// The rule's answer before noise.
    pub rule: bool,
    pub shift: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub speeches: Vec<Speech>,
    pub posts: Vec<Post>,
    pub planted: Vec<PlantedCascade>,
}

fn tag(side: bool, k: usize) -> String {
    if side {
        format!("#right{k}")
    } else {
        format!("#left{k}")
    }
}

fn sentence(r: &mut ChaCha8Rng, words: usize, tags: &[String]) -> String {
    let mut parts: Vec<String> = (0..words).map(|_| String::from(FILLER[r.gen_range(0..FILLER.len())])).collect();
    if r.gen_bool(0.6) {
        parts.push(String::from(MOOD[r.gen_range(0..MOOD.len())]));
    }
    parts.extend(tags.iter().cloned());
    // every token is lowercase, so hashtags are the only entities
    parts.join(" ")
}

fn side_tags(r: &mut ChaCha8Rng, side: bool, n: usize, tags_per_side: usize) -> Vec<String> {
    (0..n).map(|_| tag(side, r.gen_range(0..tags_per_side))).collect()
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticCorpus> {
    config.validate()?;
    let mut r = rng::seeded(config.seed);
    let mut speeches = Vec::new();
    for (party, side) in [(Party::Democrat, false), (Party::Republican, true)] {
        for i in 0..config.speeches_per_party {
            let tags = side_tags(&mut r, side, 4, config.tags_per_side);
            let text = format!("{}. {}.", sentence(&mut r, 8, &tags[..2]), sentence(&mut r, 8, &tags[2..]));
            speeches.push(Speech::new(format!("{}-{i}", party.code()), party, text, None)?);
        }
    }

    let mut posts = Vec::new();
    let mut planted = Vec::new();
    let mut clock: i64 = 1_600_000_000;
    for c in 0..config.cascades {
        let root_id = format!("c{c}-0");
        let direct = r.gen_range(2..=config.max_direct_replies);
        let target: f64 = r.gen_range(0.01..0.35);
        let followers = libm::round(direct as f64 / target).max(1.0) as u64;
        let influence = direct as f64 / followers as f64;
        let rule = influence > config.threshold;
        let shift = rule ^ r.gen_bool(config.label_noise);
        let side: bool = r.gen();
        let levels = r.gen_range(config.min_levels..=config.max_levels);
        let root_author = format!("u{}", r.gen_range(0..500));

        clock += r.gen_range(600..7200);
        let root_tags = side_tags(&mut r, side, 2, config.tags_per_side);
        let mut root = Post::new(root_id.clone(), Forum::Gab, root_author.clone(), clock, sentence(&mut r, 6, &root_tags));
        root.author_follower_count = Some(followers);
        root.reshare_count = Some(r.gen_range(0..20));
        posts.push(root);

        // (id, timestamp) of the previous level
        let mut previous: Vec<(String, i64)> = vec![(root_id.clone(), clock)];
        let mut serial = 1;
        for level in 1..levels {
            let width = if level == 1 {
                direct
            } else {
                r.gen_range(1..=config.max_level_width)
            };
            let mut current = Vec::with_capacity(width);
            for k in 0..width {
                // the first level hangs off the root; later nodes pick a random parent
                let (parent_id, parent_ts) = if level == 1 {
                    previous[0].clone()
                } else {
                    previous[if k == 0 { 0 } else { r.gen_range(0..previous.len()) }].clone()
                };
                let ts = parent_ts + r.gen_range(30..3600);
                let tags = if level == config.label_level {
                    side_tags(&mut r, side ^ shift, 2, config.tags_per_side)
                } else if level > config.label_level {
                    let any_side: bool = r.gen();
                    side_tags(&mut r, any_side, 1, config.tags_per_side)
                } else {
                    Vec::new()
                };
                let id = format!("c{c}-{serial}");
                serial += 1;
                let author = if r.gen_bool(0.1) {
                    root_author.clone()
                } else {
                    format!("u{}", r.gen_range(0..500))
                };
                let mut post = Post::new(id.clone(), Forum::Gab, author, ts, sentence(&mut r, 5, &tags)).with_parent(parent_id);
                post.author_follower_count = Some(r.gen_range(0..300));
                post.reshare_count = Some(r.gen_range(0..10));
                posts.push(post);
                current.push((id, ts));
            }
            previous = current;
        }
        planted.push(PlantedCascade {
            root_id,
            root_influence: influence,
            rule,
            shift,
        });
    }
    Ok(SyntheticCorpus {
        speeches,
        posts,
        planted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let cfg = SynthConfig {
            cascades: 30,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        assert_eq!(a.planted.len(), 30);
        assert_eq!(a.speeches.len(), 80);
        assert_eq!(a, generate(&cfg).unwrap());
        let other = generate(&SynthConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.posts, other.posts);
    }

    #[test]
    fn noise_rate_is_roughly_respected() {
        let c = generate(&SynthConfig {
            cascades: 2000,
            ..SynthConfig::default()
        })
        .unwrap();
        let flipped = c.planted.iter().filter(|p| p.rule != p.shift).count() as f64 / 2000.0;
        assert!((flipped - 0.05).abs() < 0.02, "{flipped}");
        let positives = c.planted.iter().filter(|p| p.shift).count() as f64 / 2000.0;
        assert!((0.3..0.7).contains(&positives), "{positives}");
    }

    #[test]
    fn rejects_bad_levels() {
        let cfg = SynthConfig {
            label_level: 5,
            ..SynthConfig::default()
        };
        assert!(generate(&cfg).is_err());
    }
}
