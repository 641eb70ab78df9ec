//! Unsupervised segmentation of dynamic-texture videos.
//!
//! A grayscale video cube is cut into its three families of orthogonal
//! slices (`xy`, `xt`, `yt`). Each slice is encoded with a local binary
//! pattern operator, and every spatial pixel is described by the
//! concatenation over time of requantized LBP histograms taken in a small
//! window. For every plane family the resulting high-dimensional features
//! are compressed several times with differently seeded random projections
//! and clustered with k-means, giving an ensemble of weak segmentations.
//! The ensemble is fused into a single consensus map by minimizing the mean
//! global consistency error (GCE*) against all members with iterated
//! conditional modes.
//!
//! The crate also ships partition-comparison metrics (PR index, VoI, PRI,
//! pair F-measure, GCE*) and a generator for synthetic moving-grating
//! videos with known ground truth.
//!
//! ```no_run
//! use dtseg::pipeline::{segment, PipelineConfig};
//! use dtseg::synth::{generate, SynthSpec};
//!
//! let fixture = generate(&SynthSpec::default()).unwrap();
//! let config = PipelineConfig::default();
//! let run = segment(&fixture.cube, &config).unwrap();
//! let report = dtseg::metrics::evaluate(&run.consensus, &fixture.ground_truth).unwrap();
//! println!("PR = {:.3}", report.pr);
//! ```

pub mod ensemble;
pub mod error;
pub mod features;
pub mod fusion;
pub mod labelmap;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod video;

pub use error::{Error, Result};
pub use labelmap::SegmentationMap;
pub use video::{PlaneFamily, Slice, VideoCube};
