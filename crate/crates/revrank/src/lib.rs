//! File formats, pipeline stages and the `revrank` command line on top of
//! [`revrank_core`].

pub mod annotations;
pub mod cli;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod index_io;
pub mod interactive;
pub mod lexicon_io;
pub mod synthetic;
pub mod vectors;

pub use error::{Error, Result};
