//! IO side of the corpus contrast toolkit: news-archive ingest, the
//! completion-endpoint client, file loaders, comparison reports and their
//! rendering. The metrics themselves live in [`textcontrast_core`].

pub mod archive;
pub mod client;
pub mod config;
pub mod formats;
pub mod render;
pub mod report;

pub use textcontrast_core as core;
