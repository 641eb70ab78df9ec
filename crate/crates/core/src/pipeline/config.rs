use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleConfig, ProjectionKind};
use crate::error::{Error, Result};
use crate::features::{FeatureParams, LbpParams};
use crate::fusion::IcmParams;
use crate::rng::derive_seed;
use crate::video::CubeFormat;

/// Every tunable of a segmentation run.
///
/// Serialized as a flat `key = value` text file (see [`CONFIG_KEYS`]);
/// blank lines and `#` comments are ignored. Keys set later win, which is
/// how command-line flags override a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub lbp: LbpParams,
    pub features: FeatureParams,
    pub ensemble: EnsembleConfig,
    /// Consensus label count; `None` uses the ensemble's modal label count.
    pub fusion_labels: Option<usize>,
    pub max_sweeps: usize,
    /// ICM scan-order seed; `None` derives it from the master seed.
    pub fusion_seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub input_format: Option<CubeFormat>,
    pub output_dir: Option<PathBuf>,
    pub dump_ensemble: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            lbp: LbpParams::default(),
            features: FeatureParams::default(),
            ensemble: EnsembleConfig::default(),
            fusion_labels: None,
            max_sweeps: IcmParams::default().max_sweeps,
            fusion_seed: None,
            input: None,
            input_format: None,
            output_dir: None,
            dump_ensemble: false,
        }
    }
}

/// Recognized config keys with a one-line description each.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("lbp_p", "LBP neighbor count P (default 8)"),
    ("lbp_r", "LBP radius R in pixels (default 1)"),
    ("bins", "requantization bin count Q (default 16)"),
    ("window", "odd histogram window side Nw (default 7)"),
    ("stride_t", "temporal stride s_t of the histogram blocks (default 1)"),
    ("k", "random projection dimension (default 100)"),
    ("projection", "projection matrix entries: gaussian | achlioptas (default gaussian)"),
    ("replicates", "projection seeds per plane family K; ensemble size is 3K (default 4)"),
    ("labels", "cluster count C; also fixes the consensus label count (default 2)"),
    ("fusion_labels", "consensus label count overriding labels, or auto for the modal member count"),
    ("kmeans_max_iter", "k-means iteration cap (default 100)"),
    ("kmeans_tol", "k-means relative inertia tolerance (default 1e-4)"),
    ("max_sweeps", "ICM sweep cap (default 20)"),
    ("seed", "master seed (default 1)"),
    ("fusion_seed", "ICM scan-order seed (default: derived from seed)"),
    ("input", "input video: raw cube file or frame directory"),
    ("input_format", "raw | frames (default: directories are frames)"),
    ("output_dir", "directory for the consensus map, trace and manifests"),
    ("dump_ensemble", "true to also write every ensemble member"),
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("bad boolean {value:?} for {key}"))),
    }
}

impl PipelineConfig {
    /// Sets one key. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "lbp_p" => self.lbp.neighbors = parse(key, value)?,
            "lbp_r" => self.lbp.radius = parse(key, value)?,
            "bins" => self.lbp.bins = parse(key, value)?,
            "window" => self.features.window = parse(key, value)?,
            "stride_t" => self.features.stride_t = parse(key, value)?,
            "k" => self.ensemble.projection_dim = parse(key, value)?,
            "projection" => {
                self.ensemble.projection_kind = match value {
                    "gaussian" => ProjectionKind::Gaussian,
                    "achlioptas" => ProjectionKind::Achlioptas,
                    _ => return Err(Error::InvalidParameter(format!("bad projection {value:?}"))),
                }
            }
            "replicates" => self.ensemble.replicates = parse(key, value)?,
            "labels" => {
                let c = parse(key, value)?;
                self.ensemble.clusters = c;
                self.fusion_labels = Some(c);
            }
            "fusion_labels" => {
                self.fusion_labels = match value {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "kmeans_max_iter" => self.ensemble.kmeans_max_iter = parse(key, value)?,
            "kmeans_tol" => self.ensemble.kmeans_tol = parse(key, value)?,
            "max_sweeps" => self.max_sweeps = parse(key, value)?,
            "seed" => self.ensemble.seed = parse(key, value)?,
            "fusion_seed" => self.fusion_seed = Some(parse(key, value)?),
            "input" => self.input = Some(PathBuf::from(value)),
            "input_format" => self.input_format = Some(value.parse()?),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "dump_ensemble" => self.dump_ensemble = parse_bool(key, value)?,
            other => {
                return Err(Error::InvalidParameter(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("config line {}: expected key = value", n + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| Error::InvalidParameter(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::from_text(&text)
    }

    /// Renders the config in the key-value format. Parsing the result gives
    /// back an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("lbp_p", self.lbp.neighbors.to_string());
        line("lbp_r", self.lbp.radius.to_string());
        line("bins", self.lbp.bins.to_string());
        line("window", self.features.window.to_string());
        line("stride_t", self.features.stride_t.to_string());
        line("k", self.ensemble.projection_dim.to_string());
        let kind = match self.ensemble.projection_kind {
            ProjectionKind::Gaussian => "gaussian",
            ProjectionKind::Achlioptas => "achlioptas",
        };
        line("projection", kind.to_string());
        line("replicates", self.ensemble.replicates.to_string());
        line("labels", self.ensemble.clusters.to_string());
        line("kmeans_max_iter", self.ensemble.kmeans_max_iter.to_string());
        line("kmeans_tol", format!("{:?}", self.ensemble.kmeans_tol));
        line("max_sweeps", self.max_sweeps.to_string());
        line("seed", self.ensemble.seed.to_string());
        line("dump_ensemble", self.dump_ensemble.to_string());
        line(
            "fusion_labels",
            self.fusion_labels.map_or("auto".to_string(), |c| c.to_string()),
        );
        if let Some(s) = self.fusion_seed {
            line("fusion_seed", s.to_string());
        }
        if let Some(p) = &self.input {
            line("input", p.display().to_string());
        }
        if let Some(f) = self.input_format {
            let name = match f {
                CubeFormat::Raw => "raw",
                CubeFormat::FrameDirectory => "frames",
            };
            line("input_format", name.to_string());
        }
        if let Some(p) = &self.output_dir {
            line("output_dir", p.display().to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.lbp.validate()?;
        self.features.validate()?;
        self.ensemble.validate()?;
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_sweeps must be at least 1".into()));
        }
        if let Some(c) = self.fusion_labels {
            if c < 2 {
                return Err(Error::InvalidParameter(format!(
                    "consensus label count must be at least 2, got {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn master_seed(&self) -> u64 {
        self.ensemble.seed
    }

    pub fn effective_fusion_seed(&self) -> u64 {
        self.fusion_seed
            .unwrap_or_else(|| derive_seed(self.ensemble.seed, &[u64::from(u32::MAX)]))
    }

    pub fn icm_params(&self) -> IcmParams {
        IcmParams {
            labels: self.fusion_labels,
            max_sweeps: self.max_sweeps,
            seed: self.effective_fusion_seed(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_module_defaults() {
        let c = PipelineConfig::default();
        assert_eq!(c.lbp, LbpParams::default());
        assert_eq!((c.features.window, c.features.stride_t), (7, 1));
        assert_eq!(c.ensemble.projection_dim, 100);
        assert_eq!(c.ensemble.replicates, 4);
        assert_eq!(c.ensemble.ensemble_size(), 12);
        assert_eq!(c.max_sweeps, 20);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn text_round_trip() {
        let mut c = PipelineConfig::default();
        c.set("labels", "3").unwrap();
        c.set("k", "80").unwrap();
        c.set("kmeans_tol", "0.001").unwrap();
        c.set("fusion_seed", "9").unwrap();
        c.set("input", "/tmp/video.dtc").unwrap();
        c.set("input_format", "raw").unwrap();
        c.set("projection", "achlioptas").unwrap();
        c.set("dump_ensemble", "true").unwrap();
        assert_eq!(PipelineConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn default_text_round_trip() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_overrides() {
        let mut c = PipelineConfig::from_text("# run\nk = 40 # small\n\nseed=7\n").unwrap();
        assert_eq!(c.ensemble.projection_dim, 40);
        assert_eq!(c.master_seed(), 7);
        c.set("k", "120").unwrap();
        assert_eq!(c.ensemble.projection_dim, 120);
    }

    #[test]
    fn bad_lines_are_reported() {
        assert!(PipelineConfig::from_text("k 40").is_err());
        assert!(PipelineConfig::from_text("nope = 1").is_err());
        assert!(PipelineConfig::from_text("k = many").is_err());
        let err = PipelineConfig::from_text("seed = 1\nbins = x").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let values = [
            ("projection", "gaussian"),
            ("input_format", "frames"),
            ("dump_ensemble", "false"),
            ("kmeans_tol", "0.01"),
            ("input", "x"),
            ("output_dir", "y"),
        ];
        for (key, _) in CONFIG_KEYS {
            let v = values.iter().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or("3");
            let mut c = PipelineConfig::default();
            c.set(key, v).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }
}
