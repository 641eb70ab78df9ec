use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::video::{PlaneFamily, VideoCube};

use super::{LbpOperator, LbpParams, TextureOperator};

/// Requantized codes for every slice of one plane family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbpVolume {
    pub plane: PlaneFamily,
    /// Slice shape, as in [`VideoCube::slice_shape`].
    pub rows: usize,
    pub cols: usize,
    pub slices: usize,
    /// Codes lie in `[0, levels)`.
    pub levels: usize,
    codes: Vec<u16>,
}

impl LbpVolume {
    #[inline]
    pub fn code(&self, slice: usize, row: usize, col: usize) -> u16 {
        self.codes[(slice * self.rows + row) * self.cols + col]
    }

    /// Codes of one slice, row-major.
    pub fn slice_codes(&self, slice: usize) -> &[u16] {
        let n = self.rows * self.cols;
        &self.codes[slice * n..(slice + 1) * n]
    }

    /// The `(H, W, T)` of the cube this volume was computed from.
    pub fn cube_dims(&self) -> (usize, usize, usize) {
        match self.plane {
            PlaneFamily::Xy => (self.rows, self.cols, self.slices),
            PlaneFamily::Xt => (self.slices, self.cols, self.rows),
            PlaneFamily::Yt => (self.cols, self.slices, self.rows),
        }
    }
}

/// Applies `op` to every slice of `plane`.
pub fn code_volume(
    cube: &VideoCube,
    plane: PlaneFamily,
    op: &dyn TextureOperator,
) -> Result<LbpVolume> {
    let (rows, cols) = cube.slice_shape(plane);
    if rows < op.min_extent() || cols < op.min_extent() {
        return Err(Error::InvalidParameter(format!(
            "{plane} slices are {rows}x{cols}, operator needs at least {0}x{0}",
            op.min_extent()
        )));
    }
    let slices = cube.slice_count(plane);
    let per_slice: Vec<Vec<u16>> = (0..slices)
        .into_par_iter()
        .map(|i| op.code_map(&cube.slice(plane, i)?))
        .collect::<Result<_>>()?;
    Ok(LbpVolume {
        plane,
        rows,
        cols,
        slices,
        levels: op.levels(),
        codes: per_slice.concat(),
    })
}

/// Requantized LBP codes of every slice in `plane`'s family.
pub fn lbp_volume(cube: &VideoCube, plane: PlaneFamily, params: &LbpParams) -> Result<LbpVolume> {
    code_volume(cube, plane, &LbpOperator::new(*params)?)
}
