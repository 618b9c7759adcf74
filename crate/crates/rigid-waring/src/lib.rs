//! Experiment harness for certified homotopy continuation of homogeneous
//! polynomial systems in Waring form.
//!
//! The solver math lives in `rigid-core`; this crate wraps it in a CLI with
//! five experiment families (summary tables, a Waring-length gamma sweep,
//! heuristic-vs-certified comparison, per-step traces, and Monte Carlo bound
//! validation), each writing a deterministic CSV plus a JSON metadata
//! sidecar.

pub mod config;
pub mod experiments;
pub mod formats;
