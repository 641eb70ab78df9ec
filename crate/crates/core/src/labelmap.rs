//! Label maps over the spatial grid, and their PGM/JSON serialization.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use image::DynamicImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::write_file;

/// A labeling of an `H x W` grid with ids in `[0, C)`, every id used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMap {
    height: usize,
    width: usize,
    num_labels: usize,
    labels: Vec<u32>,
}

impl SegmentationMap {
    /// Wraps labels that are already dense (`[0, C)` with every id present).
    pub fn new(height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        check_len(height, width, labels.len())?;
        let num_labels = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; num_labels];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!(
                "label map is not compact: label {missing} of {num_labels} is unused"
            )));
        }
        Ok(SegmentationMap {
            height,
            width,
            num_labels,
            labels,
        })
    }

    /// Relabels arbitrary ids into `[0, C)` ordered by decreasing segment
    /// size (ties keep the smaller original id first).
    pub fn compacted(height: usize, width: usize, labels: &[u32]) -> Result<Self> {
        check_len(height, width, labels.len())?;
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_default() += 1;
        }
        let mut order: Vec<(u32, usize)> = counts.into_iter().collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let remap: BTreeMap<u32, u32> = order
            .iter()
            .enumerate()
            .map(|(new, &(old, _))| (old, new as u32))
            .collect();
        Ok(SegmentationMap {
            height,
            width,
            num_labels: order.len(),
            labels: labels.iter().map(|l| remap[l]).collect(),
        })
    }

    /// Single-segment map.
    pub fn uniform(height: usize, width: usize) -> Self {
        SegmentationMap {
            height,
            width,
            num_labels: usize::from(height * width > 0),
            labels: vec![0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Pixel count.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Labels in `(y, x)` row-major order.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, y: usize, x: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count per label.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.num_labels];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    pub fn same_shape(&self, other: &SegmentationMap) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub(crate) fn check_same_shape(&self, other: &SegmentationMap) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} map vs {}x{} map",
                self.height, self.width, other.height, other.width
            )))
        }
    }
}

fn check_len(height: usize, width: usize, len: usize) -> Result<()> {
    if height * width != len {
        return Err(Error::DimensionMismatch(format!(
            "{height}x{width} map needs {} labels, got {len}",
            height * width
        )));
    }
    Ok(())
}

/// Summary written next to every label map PGM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMapSidecar {
    #[serde(rename = "H")]
    pub height: usize,
    #[serde(rename = "W")]
    pub width: usize,
    #[serde(rename = "C")]
    pub num_labels: usize,
    /// Pixel count per label id.
    pub label_histogram: BTreeMap<u32, usize>,
}

impl LabelMapSidecar {
    pub fn for_map(map: &SegmentationMap) -> Self {
        LabelMapSidecar {
            height: map.height,
            width: map.width,
            num_labels: map.num_labels,
            label_histogram: map
                .histogram()
                .into_iter()
                .enumerate()
                .map(|(l, n)| (l as u32, n))
                .collect(),
        }
    }
}

/// Path of the JSON sidecar belonging to a label map PGM.
pub fn sidecar_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("json")
}

/// Writes `seg` as a binary PGM whose pixel values are label ids, plus a
/// `.json` sidecar with the map's shape and label histogram.
pub fn write_labelmap(seg: &SegmentationMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if seg.num_labels > 255 {
        return Err(Error::InvalidParameter(format!(
            "{} labels do not fit an 8-bit label map (max 255)",
            seg.num_labels
        )));
    }
    let pixels: Vec<u8> = seg.labels.iter().map(|&l| l as u8).collect();
    write_pgm(path, seg.width, seg.height, &pixels)?;
    let sidecar = serde_json::to_vec_pretty(&LabelMapSidecar::for_map(seg))
        .expect("sidecar serializes");
    write_file(&sidecar_path(path), &sidecar)
}

/// Reads an 8-bit grayscale image as a label map. Pixel values are taken
/// as label ids and compacted.
pub fn read_labelmap(path: impl AsRef<Path>) -> Result<SegmentationMap> {
    let path = path.as_ref();
    let (w, h, pixels) = read_gray8(path)?;
    let labels: Vec<u32> = pixels.into_iter().map(u32::from).collect();
    SegmentationMap::compacted(h, w, &labels)
}

/// Writes a binary (P5) PGM with maxval 255.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    debug_assert_eq!(pixels.len(), width * height);
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(pixels);
    write_file(path, &bytes)
}

/// Decodes an 8-bit grayscale PGM or PNG, returning `(width, height, pixels)`.
/// Color, alpha and 16-bit images are rejected.
pub fn read_gray8(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory(&bytes).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    match img {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            Ok((w as usize, h as usize, buf.into_raw()))
        }
        other => Err(Error::format(
            path,
            format!(
                "only 8-bit grayscale images are supported, found {:?}",
                other.color()
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compacted_orders_by_size() {
        let m = SegmentationMap::compacted(1, 6, &[7, 3, 3, 9, 3, 7]).unwrap();
        assert_eq!(m.labels(), &[1, 0, 0, 2, 0, 1]);
        assert_eq!(m.num_labels(), 3);
        assert_eq!(m.histogram(), vec![3, 2, 1]);
    }

    #[test]
    fn new_rejects_gaps() {
        assert!(SegmentationMap::new(1, 3, vec![0, 2, 2]).is_err());
        assert!(SegmentationMap::new(1, 3, vec![0, 1, 1]).is_ok());
        assert!(SegmentationMap::new(2, 3, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn two_label_map_round_trips_through_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        let labels: Vec<u32> = (0..16).map(|i| u32::from(i % 4 >= 2)).collect();
        let m = SegmentationMap::new(4, 4, labels).unwrap();
        write_labelmap(&m, &path).unwrap();

        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n4 4\n255\n"));
        let body = &bytes[bytes.len() - 16..];
        assert!(body.iter().all(|&v| v <= 1));
        assert!(body.contains(&0) && body.contains(&1));

        assert_eq!(read_labelmap(&path).unwrap().labels(), m.labels());
        let side: LabelMapSidecar =
            serde_json::from_slice(&fs::read(sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(side.num_labels, 2);
        assert_eq!(side.label_histogram[&0], 8);
    }

    #[test]
    fn all_zero_map_histogram() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.pgm");
        let m = SegmentationMap::uniform(3, 5);
        write_labelmap(&m, &path).unwrap();
        let side: LabelMapSidecar =
            serde_json::from_slice(&fs::read(sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(side.label_histogram, BTreeMap::from([(0, 15)]));
        let bytes = fs::read(&path).unwrap();
        assert!(bytes[bytes.len() - 15..].iter().all(|&v| v == 0));
    }

    #[test]
    fn too_many_labels_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let labels: Vec<u32> = (0..256).collect();
        let m = SegmentationMap::new(16, 16, labels).unwrap();
        assert!(write_labelmap(&m, dir.path().join("m.pgm")).is_err());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let m = SegmentationMap::uniform(2, 2);
        assert!(write_labelmap(&m, blocker.join("m.pgm")).is_err());
    }
}
