//! Per-slice texture codes and the per-pixel concatenated histogram features.

mod lbp;
mod matrix;
mod volume;

pub use lbp::{lbp_code, requantize, LbpOperator, LbpParams, TIE_TOLERANCE};
pub use matrix::{feature_matrix, FeatureMatrix, FeatureParams, FEATURE_MAGIC};
pub use volume::{code_volume, lbp_volume, LbpVolume};

use crate::error::Result;
use crate::video::{PlaneFamily, Slice, VideoCube};

/// A per-pixel texture coder: turns a slice into a map of small integer
/// codes in `[0, levels())`. Base LBP is the only implementation shipped.
pub trait TextureOperator: Sync {
    fn levels(&self) -> usize;

    /// Smallest slice side the operator can encode.
    fn min_extent(&self) -> usize;

    /// Codes for every slice pixel, row-major, same shape as the slice.
    fn code_map(&self, slice: &Slice) -> Result<Vec<u16>>;
}

/// LBP volume and feature matrix for one plane family.
pub fn extract_features(
    cube: &VideoCube,
    plane: PlaneFamily,
    lbp: &LbpParams,
    params: &FeatureParams,
) -> Result<FeatureMatrix> {
    let volume = lbp_volume(cube, plane, lbp)?;
    feature_matrix(&volume, params)
}
