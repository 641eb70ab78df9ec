use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::{write_file, PlaneFamily};

use super::LbpVolume;

pub const FEATURE_MAGIC: &[u8; 4] = b"DTF1";

/// Local histogram window and temporal subsampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureParams {
    /// Odd side length of the square histogram window.
    pub window: usize,
    /// Keep every `stride_t`-th time step.
    pub stride_t: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            window: 7,
            stride_t: 1,
        }
    }
}

impl FeatureParams {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "histogram window must be odd and positive, got {}",
                self.window
            )));
        }
        if self.stride_t == 0 {
            return Err(Error::InvalidParameter("temporal stride must be positive".into()));
        }
        Ok(())
    }

    /// Number of retained time steps for a video of `frames` frames.
    pub fn retained_frames(&self, frames: usize) -> usize {
        frames.div_ceil(self.stride_t)
    }
}

/// Dense row-major `rows x dim` matrix of non-negative feature values,
/// one row per spatial pixel in `(y, x)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub dim: usize,
    pub values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, dim: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != rows * dim {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{dim} matrix needs {} values, got {}",
                rows * dim,
                values.len()
            )));
        }
        Ok(FeatureMatrix { rows, dim, values })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        FeatureMatrix {
            rows,
            dim,
            values: vec![0.0; rows * dim],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 4 * self.values.len());
        out.extend_from_slice(FEATURE_MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != FEATURE_MAGIC {
            return Err(Error::format(path, "not a DTF1 feature file"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let (rows, dim) = (word(4), word(8));
        let body = &bytes[12..];
        if body.len() != 4 * rows * dim {
            return Err(Error::format(
                path,
                format!(
                    "{rows}x{dim} feature matrix needs {} bytes, found {}",
                    4 * rows * dim,
                    body.len()
                ),
            ));
        }
        let values = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        FeatureMatrix::new(rows, dim, values)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.to_bytes())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        FeatureMatrix::from_bytes(&bytes, path)
    }
}

/// Builds the per-pixel feature matrix of one plane family.
///
/// For spatial pixel `(y, x)` and every retained time `t`, the window is
/// centered on the pixel's position in the family's slice: `(y, x)` of
/// frame `t` for xy, `(t, x)` of slice `y` for xt, `(t, y)` of slice `x`
/// for yt. Windows are clipped at slice borders. One `levels`-bin block
/// per retained `t`, in increasing `t`.
pub fn feature_matrix(volume: &LbpVolume, params: &FeatureParams) -> Result<FeatureMatrix> {
    params.validate()?;
    let (height, width, frames) = volume.cube_dims();
    let q = volume.levels;
    let kept = params.retained_frames(frames);
    let dim = kept * q;
    let half = params.window / 2;
    let mut values = vec![0f32; height * width * dim];

    values
        .par_chunks_mut(dim)
        .enumerate()
        .for_each(|(pixel, row)| {
            let (y, x) = (pixel / width, pixel % width);
            for (block, t) in (0..frames).step_by(params.stride_t).enumerate() {
                let (slice, r, c) = match volume.plane {
                    PlaneFamily::Xy => (t, y, x),
                    PlaneFamily::Xt => (y, t, x),
                    PlaneFamily::Yt => (x, t, y),
                };
                let hist = &mut row[block * q..(block + 1) * q];
                let codes = volume.slice_codes(slice);
                let r_end = (r + half + 1).min(volume.rows);
                let c_lo = c.saturating_sub(half);
                let c_end = (c + half + 1).min(volume.cols);
                for rr in r.saturating_sub(half)..r_end {
                    for &code in &codes[rr * volume.cols + c_lo..rr * volume.cols + c_end] {
                        hist[code as usize] += 1.0;
                    }
                }
            }
        });

    FeatureMatrix::new(height * width, dim, values)
}
