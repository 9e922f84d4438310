//! Allocation-only core of the biasline pipeline.
//!
//! Everything here is pure computation over in-memory data: text
//! preprocessing and entity extraction, party-conditioned TF-IDF, post bias
//! scoring, a subword skip-gram embedding trainer, from-scratch classifiers
//! with evaluation metrics, and reply-cascade construction and feature
//! extraction. File formats, loaders and the command-line driver live in the
//! `biasline` crate.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bias;
pub mod cascade;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod math;
pub mod ml;
pub mod rng;
pub mod synth;
pub mod textproc;
pub mod tfidf;

pub use error::{Error, Result};
