//! Certification suite: configuration, execution and on-disk output.

mod config;
mod output;
mod suite;

pub use config::{SuiteConfig, KEYS};
pub use output::{summary, to_pretty, write_json, write_observations, write_suite, JSON_SCHEMA};
pub use suite::{euck_certify, run_suite, run_suite_only, seeded_riesz_spec, SuiteRun, CLAIMS, FAMILIES};
