//! Reading PDFs and source trees, link files, corpus evaluation, the
//! command-line interface and the HTTP service.

pub mod cli;
pub mod config;
pub mod evaluate;
pub mod extract;
pub mod formats;
pub mod repo;
pub mod service;
pub mod synth;
