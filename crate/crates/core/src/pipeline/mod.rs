//! End-to-end orchestration: configuration, the `segment` run with its
//! output files, batch evaluation and the projection-dimension sweep.

mod config;
mod evaluate;
mod run;
mod sweep;

pub use config::{PipelineConfig, CONFIG_KEYS};
pub use evaluate::{evaluate_paths, EvaluationRow, EvaluationSummary, MetricAverages};
pub use run::{
    run_segment, segment, write_outputs, SegmentRun, StageTiming, CONFIG_FILE, CONSENSUS_FILE,
    MANIFEST_FILE, MEMBERS_DIR, TIMING_FILE, TRACE_FILE,
};
pub use sweep::{sweep_csv, sweep_k, LabeledVideo, SweepRow};
