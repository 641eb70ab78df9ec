use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::Slice;

use super::TextureOperator;

/// Local binary pattern configuration: `neighbors` samples on a circle of
/// `radius` pixels, codes requantized into `bins` levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LbpParams {
    pub neighbors: u32,
    pub radius: u32,
    pub bins: u32,
}

impl Default for LbpParams {
    fn default() -> Self {
        LbpParams {
            neighbors: 8,
            radius: 1,
            bins: 16,
        }
    }
}

impl LbpParams {
    pub const MAX_NEIGHBORS: u32 = 16;

    pub fn validate(&self) -> Result<()> {
        if !(4..=Self::MAX_NEIGHBORS).contains(&self.neighbors) {
            return Err(Error::InvalidParameter(format!(
                "LBP neighbor count must be in [4, {}], got {}",
                Self::MAX_NEIGHBORS,
                self.neighbors
            )));
        }
        if self.radius < 1 {
            return Err(Error::InvalidParameter("LBP radius must be at least 1".into()));
        }
        if self.bins < 2 || self.bins > self.code_count() {
            return Err(Error::InvalidParameter(format!(
                "requantization bins must be in [2, {}], got {}",
                self.code_count(),
                self.bins
            )));
        }
        Ok(())
    }

    /// Number of distinct raw codes, `2^P`.
    pub fn code_count(&self) -> u32 {
        1 << self.neighbors
    }
}

/// Maps a raw code in `[0, 2^neighbors)` to one of `bins` uniform bins.
#[inline]
pub fn requantize(code: u32, neighbors: u32, bins: u32) -> u32 {
    ((u64::from(code) * u64::from(bins)) >> neighbors) as u32
}

/// Grid the circular sampling offsets are snapped to. Mirror-image
/// neighbors then get bit-identical offset magnitudes, and on-grid
/// neighbors land exactly on pixels.
const OFFSET_GRID: f64 = (1u64 << 32) as f64;

/// Samples this close to the center count as equal to it. Integer pixels
/// with fixed interpolation weights are either exactly equal or much
/// further apart, so ties are decided as in exact arithmetic instead of
/// by interpolation rounding.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Sampling position of one neighbor relative to the center, split per
/// axis into the near integer step, the direction and the fractional
/// weight toward the next pixel outward.
#[derive(Debug, Clone, Copy)]
struct AxisStep {
    whole: isize,
    sign: isize,
    frac: f64,
}

impl AxisStep {
    fn new(offset: f64) -> Self {
        let offset = (offset * OFFSET_GRID).round() / OFFSET_GRID;
        let magnitude = offset.abs();
        let whole = magnitude.floor();
        AxisStep {
            whole: whole as isize,
            sign: if offset < 0.0 { -1 } else { 1 },
            frac: magnitude - whole,
        }
    }

    #[inline]
    fn near(&self, center: usize) -> usize {
        (center as isize + self.sign * self.whole) as usize
    }

    #[inline]
    fn far(&self, center: usize) -> usize {
        (center as isize + self.sign * (self.whole + 1)) as usize
    }
}

/// Precomputed LBP sampler.
#[derive(Debug, Clone)]
pub struct LbpOperator {
    params: LbpParams,
    steps: Vec<(AxisStep, AxisStep)>,
}

impl LbpOperator {
    pub fn new(params: LbpParams) -> Result<Self> {
        params.validate()?;
        let p_count = f64::from(params.neighbors);
        let r = f64::from(params.radius);
        let steps = (0..params.neighbors)
            .map(|p| {
                let angle = 2.0 * PI * f64::from(p) / p_count;
                (AxisStep::new(r * angle.sin()), AxisStep::new(r * angle.cos()))
            })
            .collect();
        Ok(LbpOperator { params, steps })
    }

    pub fn params(&self) -> LbpParams {
        self.params
    }

    /// Whether the sampling disc around `(row, col)` fits in `slice`.
    pub fn fits(&self, slice: &Slice, row: usize, col: usize) -> bool {
        let r = self.params.radius as usize;
        row >= r && col >= r && row + r < slice.rows && col + r < slice.cols
    }

    /// Bilinear sample of neighbor `p` around `(row, col)`. Interpolation
    /// runs from the pixel nearest the center outward along each axis.
    #[inline]
    fn sample(&self, slice: &Slice, row: usize, col: usize, p: usize) -> f64 {
        let (dr, dc) = self.steps[p];
        let along_cols = |r: usize| -> f64 {
            let near = f64::from(slice.get(r, dc.near(col)));
            if dc.frac == 0.0 {
                near
            } else {
                near + dc.frac * (f64::from(slice.get(r, dc.far(col))) - near)
            }
        };
        let first = along_cols(dr.near(row));
        if dr.frac == 0.0 {
            first
        } else {
            first + dr.frac * (along_cols(dr.far(row)) - first)
        }
    }

    /// Raw code at an interior pixel, without bounds checks.
    #[inline]
    pub(crate) fn code_unchecked(&self, slice: &Slice, row: usize, col: usize) -> u32 {
        let center = f64::from(slice.get(row, col));
        (0..self.steps.len()).fold(0u32, |code, p| {
            if self.sample(slice, row, col, p) >= center - TIE_TOLERANCE {
                code | (1 << p)
            } else {
                code
            }
        })
    }

    /// Raw code in `[0, 2^P)` at `(row, col)`.
    pub fn code(&self, slice: &Slice, row: usize, col: usize) -> Result<u32> {
        if !self.fits(slice, row, col) {
            return Err(Error::OutOfRange {
                what: "LBP window center",
                index: row.max(col),
                limit: slice.rows.min(slice.cols),
            });
        }
        Ok(self.code_unchecked(slice, row, col))
    }
}

/// Raw LBP code of `slice` at `(row, col)`.
pub fn lbp_code(slice: &Slice, row: usize, col: usize, params: &LbpParams) -> Result<u32> {
    LbpOperator::new(*params)?.code(slice, row, col)
}

impl TextureOperator for LbpOperator {
    fn levels(&self) -> usize {
        self.params.bins as usize
    }

    fn min_extent(&self) -> usize {
        2 * self.params.radius as usize + 1
    }

    fn code_map(&self, slice: &Slice) -> Result<Vec<u16>> {
        let r = self.params.radius as usize;
        if slice.rows < self.min_extent() || slice.cols < self.min_extent() {
            return Err(Error::InvalidParameter(format!(
                "{}x{} slice is too small for LBP radius {r}",
                slice.rows, slice.cols
            )));
        }
        let (p, q) = (self.params.neighbors, self.params.bins);
        let inner_rows = slice.rows - 2 * r;
        let inner_cols = slice.cols - 2 * r;
        let mut inner = Vec::with_capacity(inner_rows * inner_cols);
        for row in r..slice.rows - r {
            for col in r..slice.cols - r {
                inner.push(requantize(self.code_unchecked(slice, row, col), p, q) as u16);
            }
        }
        // Border pixels copy the nearest interior code.
        let mut out = Vec::with_capacity(slice.rows * slice.cols);
        for row in 0..slice.rows {
            let ir = row.clamp(r, slice.rows - 1 - r) - r;
            for col in 0..slice.cols {
                let ic = col.clamp(r, slice.cols - 1 - r) - r;
                out.push(inner[ir * inner_cols + ic]);
            }
        }
        Ok(out)
    }
}
