//! Corpus model, file-format readers and the metric battery used to contrast
//! annotated text corpora.
//!
//! Everything here is `no_std` with `alloc`. IO, archive ingest, the
//! completion client and the command line live in the `textcontrast` crate.

#![no_std]

extern crate alloc;

pub mod bracketed;
pub mod conllu;
pub mod constituency;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod lexical;
pub mod mla;
pub mod morpho;
pub mod semantic;
pub mod stats;
pub mod table;
pub mod validate;
