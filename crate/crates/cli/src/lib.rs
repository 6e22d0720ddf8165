//! Document formats and conversions for the `glsq` command-line tool.

pub mod docs;
