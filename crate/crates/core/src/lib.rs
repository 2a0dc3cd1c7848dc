//! Core algorithms for ranking negative product reviews against a seller's
//! attribute query.
//!
//! Everything here is pure computation over in-memory data and builds
//! without `std` (only `alloc` is required). File formats, the command-line
//! front end and anything touching the file system live in the `revrank`
//! companion crate.
//!
//! The ranking pipeline is:
//!
//! 1. [`text`] cleans and tokenizes raw review text.
//! 2. [`lexicon`] induces positive/negative emotion word sets from seeds and
//!    turns a token list into an emotion polarity in `[-1, 1]`.
//! 3. [`embedding`] measures how close a review is to the attribute.
//! 4. [`reward`] maps polarity to a multiplicative emotion reward.
//! 5. [`rank`] multiplies similarity by reward (or uses [`bm25`]) and sorts.
//! 6. [`metrics`] compares rankings against expert judgements.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bm25;
pub mod embedding;
pub mod error;
pub mod lexicon;
pub mod metrics;
pub mod rank;
pub mod review;
pub mod reward;
pub mod text;
pub mod trainer;

pub use error::{Error, Result};
