use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::labelmap::SegmentationMap;
use crate::metrics::pr_index;
use crate::video::VideoCube;

use super::{segment, PipelineConfig};

/// A video with its ground truth.
#[derive(Debug, Clone)]
pub struct LabeledVideo {
    pub name: String,
    pub cube: VideoCube,
    pub ground_truth: SegmentationMap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub avg_pr: f64,
    /// Pipeline wall time summed over all videos.
    pub wall_seconds: f64,
}

/// Runs the full pipeline on every video for each projection dimension.
pub fn sweep_k(videos: &[LabeledVideo], base: &PipelineConfig, ks: &[usize]) -> Result<Vec<SweepRow>> {
    if ks.is_empty() {
        return Err(Error::InvalidParameter("k list is empty".into()));
    }
    if videos.is_empty() {
        return Err(Error::InvalidParameter("no videos to sweep over".into()));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut config = base.clone();
        config.ensemble.projection_dim = k;
        let mut pr_sum = 0.0;
        let start = Instant::now();
        for video in videos {
            let run = segment(&video.cube, &config)
                .map_err(|e| Error::InvalidParameter(format!("{} (k = {k}): {e}", video.name)))?;
            pr_sum += pr_index(&run.consensus, &video.ground_truth)?;
        }
        rows.push(SweepRow {
            k,
            avg_pr: pr_sum / videos.len() as f64,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// `k,avg_pr,wall_time_s` CSV with a header line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,avg_pr,wall_time_s\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6},{:.6}", r.k, r.avg_pr, r.wall_seconds);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = [SweepRow { k: 20, avg_pr: 0.5, wall_seconds: 1.25 }];
        assert_eq!(sweep_csv(&rows), "k,avg_pr,wall_time_s\n20,0.500000,1.250000\n");
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(sweep_k(&[], &PipelineConfig::default(), &[20]).is_err());
    }
}
