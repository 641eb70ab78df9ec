use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::labelmap::read_labelmap;
use crate::metrics::{evaluate, MetricsReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationRow {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Per-metric means over the rows that evaluated successfully.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricAverages {
    pub pr: f64,
    pub gce: f64,
    pub voi: f64,
    pub pri: f64,
    pub f_measure: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationSummary {
    pub rows: Vec<EvaluationRow>,
    pub average: Option<MetricAverages>,
    pub failures: usize,
}

impl EvaluationSummary {
    pub fn from_rows(rows: Vec<EvaluationRow>) -> Self {
        let reports: Vec<&MetricsReport> = rows.iter().filter_map(|r| r.report.as_ref()).collect();
        let n = reports.len();
        let mean = |f: fn(&MetricsReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n as f64;
        let average = (n > 0).then(|| MetricAverages {
            pr: mean(|r| r.pr),
            gce: mean(|r| r.gce),
            voi: mean(|r| r.voi),
            pri: mean(|r| r.pri),
            f_measure: mean(|r| r.f_measure),
            count: n,
        });
        EvaluationSummary {
            failures: rows.len() - n,
            rows,
            average,
        }
    }
}

fn evaluate_pair(name: String, pred: &Path, gt: &Path) -> EvaluationRow {
    let result = read_labelmap(pred)
        .and_then(|p| read_labelmap(gt).map(|g| (p, g)))
        .and_then(|(p, g)| evaluate(&p, &g));
    match result {
        Ok(report) => EvaluationRow { name, report: Some(report), error: None },
        Err(e) => EvaluationRow { name, report: None, error: Some(e.to_string()) },
    }
}

fn label_maps_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("pgm" | "png")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Compares a prediction with a ground truth. Two files give one row; two
/// directories give one row per prediction, paired with the ground truth
/// of the same file name. Failures become error rows.
pub fn evaluate_paths(pred: &Path, gt: &Path) -> Result<EvaluationSummary> {
    let rows = match (pred.is_dir(), gt.is_dir()) {
        (false, false) => {
            let name = pred.file_name().map_or_else(
                || pred.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            vec![evaluate_pair(name, pred, gt)]
        }
        (true, true) => label_maps_in(pred)?
            .into_iter()
            .map(|p| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                let g = gt.join(&name);
                if g.exists() {
                    evaluate_pair(name, &p, &g)
                } else {
                    EvaluationRow {
                        error: Some(format!("no ground truth {}", g.display())),
                        name,
                        report: None,
                    }
                }
            })
            .collect(),
        _ => {
            return Err(Error::InvalidParameter(
                "prediction and ground truth must both be files or both be directories".into(),
            ))
        }
    };
    Ok(EvaluationSummary::from_rows(rows))
}
