//! File formats, experiment drivers and reports for the `hofj` command-line
//! tool. The numerical work lives in [`hofj_core`].

pub mod harness;
pub mod io;
pub mod report;

pub use hofj_core;
