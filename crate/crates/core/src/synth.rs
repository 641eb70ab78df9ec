//! Synthetic dynamic-texture videos with known ground truth.
//!
//! Every region is filled with a drifting sinusoidal grating of the same
//! amplitude around the same mid-gray level, so regions share their
//! first and second intensity moments and differ only in orientation
//! and motion.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelmap::{write_labelmap, SegmentationMap};
use crate::rng::{derive_seed, seeded};
use crate::video::{write_file, VideoCube};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Left and right halves.
    #[default]
    VerticalSplit,
    /// Top, middle and bottom thirds.
    HorizontalThirds,
    /// Four quadrants.
    Quadrant,
}

impl Layout {
    pub fn regions(self) -> usize {
        match self {
            Layout::VerticalSplit => 2,
            Layout::HorizontalThirds => 3,
            Layout::Quadrant => 4,
        }
    }

    /// Region id of pixel `(y, x)`.
    pub fn region(self, y: usize, x: usize, height: usize, width: usize) -> u32 {
        match self {
            Layout::VerticalSplit => u32::from(2 * x >= width),
            Layout::HorizontalThirds => ((3 * y) / height) as u32,
            Layout::Quadrant => 2 * u32::from(2 * y >= height) + u32::from(2 * x >= width),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::VerticalSplit => "vertical-split",
            Layout::HorizontalThirds => "horizontal-thirds",
            Layout::Quadrant => "quadrant",
        })
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical-split" => Ok(Layout::VerticalSplit),
            "horizontal-thirds" => Ok(Layout::HorizontalThirds),
            "quadrant" => Ok(Layout::Quadrant),
            other => Err(Error::InvalidParameter(format!(
                "unknown layout {other:?} (expected vertical-split, horizontal-thirds or quadrant)"
            ))),
        }
    }
}

/// A drifting sinusoid `sin(2 pi f (x cos a + y sin a - v t) + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grating {
    /// Cycles per pixel along the wave normal.
    pub frequency: f64,
    /// Wave normal angle in radians, measured from the x axis.
    pub orientation: f64,
    /// Drift along the wave normal in pixels per frame.
    pub speed: f64,
}

impl Grating {
    /// Default textures for regions 0..4: distinct orientations and speeds.
    pub const PALETTE: [Grating; 4] = [
        Grating { frequency: 0.125, orientation: 0.0, speed: 1.0 },
        Grating { frequency: 0.125, orientation: PI / 2.0, speed: -1.0 },
        Grating { frequency: 0.125, orientation: PI / 4.0, speed: 2.0 },
        Grating { frequency: 0.125, orientation: 3.0 * PI / 4.0, speed: -0.5 },
    ];

    fn value(&self, y: f64, x: f64, t: f64, phase: f64) -> f64 {
        let along = x * self.orientation.cos() + y * self.orientation.sin();
        (2.0 * PI * self.frequency * (along - self.speed * t) + phase).sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub height: usize,
    pub width: usize,
    pub frames: usize,
    pub layout: Layout,
    /// One grating per region; empty means the default palette.
    pub textures: Vec<Grating>,
    /// Grating amplitude in gray levels around 128.
    pub amplitude: f64,
    /// Standard deviation of additive Gaussian noise, in gray levels.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            height: 64,
            width: 64,
            frames: 16,
            layout: Layout::VerticalSplit,
            textures: Vec::new(),
            amplitude: 60.0,
            noise_sigma: 10.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn textures(&self) -> Vec<Grating> {
        if self.textures.is_empty() {
            Grating::PALETTE[..self.layout.regions()].to_vec()
        } else {
            self.textures.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let regions = self.layout.regions();
        if self.textures().len() != regions {
            return Err(Error::InvalidParameter(format!(
                "{} layout needs {regions} textures, got {}",
                self.layout,
                self.textures.len()
            )));
        }
        if [self.noise_sigma, self.amplitude].iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "amplitude and noise sigma must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthFixture {
    pub cube: VideoCube,
    pub ground_truth: SegmentationMap,
    /// Non-fatal problems with the spec, e.g. regions that cannot be told apart.
    pub warnings: Vec<String>,
}

pub fn generate(spec: &SynthSpec) -> Result<SynthFixture> {
    spec.validate()?;
    let textures = spec.textures();
    let mut warnings = Vec::new();
    let identical = textures.windows(2).all(|w| w[0] == w[1]);
    if identical {
        warnings.push(if spec.noise_sigma == 0.0 {
            "all regions share one texture and there is no noise: the fixture is unsegmentable by construction".to_string()
        } else {
            "all regions share one texture: only noise differs between regions".to_string()
        });
    }

    let mut phase_rng = seeded(derive_seed(spec.seed, &[0]));
    let phases: Vec<f64> = textures
        .iter()
        .map(|_| phase_rng.random::<f64>() * 2.0 * PI)
        .collect();
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut noise_rng = seeded(derive_seed(spec.seed, &[1]));
    let (h, w) = (spec.height, spec.width);
    let cube = VideoCube::from_fn(h, w, spec.frames, |y, x, t| {
        let region = spec.layout.region(y, x, h, w) as usize;
        let signal = textures[region].value(y as f64, x as f64, t as f64, phases[region]);
        let n = if spec.noise_sigma > 0.0 {
            noise.sample(&mut noise_rng)
        } else {
            0.0
        };
        (128.0 + spec.amplitude * signal + n).round().clamp(0.0, 255.0) as u8
    })?;

    let labels: Vec<u32> = (0..h * w)
        .map(|i| spec.layout.region(i / w, i % w, h, w))
        .collect();
    let ground_truth = SegmentationMap::new(h, w, labels)?;
    Ok(SynthFixture {
        cube,
        ground_truth,
        warnings,
    })
}

pub const CUBE_FILE: &str = "cube.dtc";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.pgm";
pub const SPEC_FILE: &str = "synth.json";

/// Writes `cube.dtc`, `ground_truth.pgm` (+ sidecar) and `synth.json` into `dir`.
pub fn write_fixture(fixture: &SynthFixture, spec: &SynthSpec, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    write_file(&dir.join(CUBE_FILE), &fixture.cube.to_raw_bytes())?;
    write_labelmap(&fixture.ground_truth, dir.join(GROUND_TRUTH_FILE))?;
    let json = serde_json::to_vec_pretty(spec).expect("synth spec serializes");
    write_file(&dir.join(SPEC_FILE), &json)
}

/// Mean intensity of each ground-truth region over the whole video.
pub fn region_means(fixture: &SynthFixture) -> Vec<f64> {
    let gt = &fixture.ground_truth;
    let cube = &fixture.cube;
    let mut sums = vec![0f64; gt.num_labels()];
    let mut counts = vec![0usize; gt.num_labels()];
    for t in 0..cube.frames() {
        for y in 0..cube.height() {
            for x in 0..cube.width() {
                let r = gt.get(y, x) as usize;
                sums[r] += f64::from(cube.get(y, x, t));
                counts[r] += 1;
            }
        }
    }
    sums.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_split_ground_truth() {
        let spec = SynthSpec {
            textures: vec![Grating::PALETTE[0]; 2],
            ..Default::default()
        };
        let f = generate(&spec).unwrap();
        assert_eq!(f.ground_truth.num_labels(), 2);
        assert_eq!(f.ground_truth.get(10, 0), 0);
        assert_eq!(f.ground_truth.get(10, 63), 1);
        assert_eq!(f.ground_truth.histogram(), vec![64 * 32, 64 * 32]);
        assert_eq!(f.warnings.len(), 1);
    }

    #[test]
    fn degenerate_fixture_is_flagged() {
        let spec = SynthSpec {
            textures: vec![Grating::PALETTE[1]; 2],
            noise_sigma: 0.0,
            ..Default::default()
        };
        let f = generate(&spec).unwrap();
        assert!(f.warnings[0].contains("unsegmentable"));
        assert!(generate(&SynthSpec::default()).unwrap().warnings.is_empty());
    }

    #[test]
    fn default_fixture_regions_have_matched_means() {
        for seed in 0..5 {
            let f = generate(&SynthSpec { seed, ..Default::default() }).unwrap();
            let m = region_means(&f);
            assert!((m[0] - m[1]).abs() < 2.0, "seed {seed}: {m:?}");
        }
    }

    #[test]
    fn layouts_have_expected_region_counts() {
        for layout in [Layout::VerticalSplit, Layout::HorizontalThirds, Layout::Quadrant] {
            let f = generate(&SynthSpec { layout, ..Default::default() }).unwrap();
            assert_eq!(f.ground_truth.num_labels(), layout.regions());
            assert_eq!(layout.to_string().parse::<Layout>().unwrap(), layout);
        }
    }

    #[test]
    fn wrong_texture_count_rejected() {
        let spec = SynthSpec {
            textures: vec![Grating::PALETTE[0]; 3],
            ..Default::default()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn seed_determines_cube() {
        let a = generate(&SynthSpec { seed: 4, ..Default::default() }).unwrap();
        let b = generate(&SynthSpec { seed: 4, ..Default::default() }).unwrap();
        let c = generate(&SynthSpec { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(a.cube, b.cube);
        assert_ne!(a.cube, c.cube);
    }
}
