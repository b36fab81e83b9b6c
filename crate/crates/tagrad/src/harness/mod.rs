//! Benchmark harness: experiment configuration, multi-seed campaign
//! execution, and CSV/JSON artifact emission. The `tagrad` CLI binary is a
//! thin wrapper over this module.

pub mod campaign;
pub mod config;
pub mod report;

pub use campaign::{
    run_campaign, run_campaign_with_seeds, AggregateCurve, CampaignResult, MethodResult,
};
pub use config::{ConfigError, ExperimentConfig, MethodSpec};
pub use report::{
    curve_to_csv, emit_campaign, emit_csv, emit_summary, fmt17, parse_curve_csv, summary_json,
    ReportError,
};
