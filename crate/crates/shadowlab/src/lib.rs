//! File formats, run manifests, parallel drivers and the command line for
//! [`shadowlab_core`].

pub mod cli;
pub mod io;
pub mod manifest;
pub mod parallel;

pub use shadowlab_core as core;
