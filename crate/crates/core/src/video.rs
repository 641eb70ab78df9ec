//! Grayscale video cubes and their three orthogonal slice families.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted extent along every axis.
pub const MIN_EXTENT: usize = 9;

pub const RAW_MAGIC: &[u8; 4] = b"DTC1";
const RAW_HEADER_LEN: usize = 16;

/// An `H x W x T` volume of 8-bit intensities, stored frame by frame in
/// `(t, y, x)` row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct VideoCube {
    height: usize,
    width: usize,
    frames: usize,
    data: Vec<u8>,
}

impl fmt::Debug for VideoCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VideoCube")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("frames", &self.frames)
            .finish_non_exhaustive()
    }
}

impl VideoCube {
    /// Builds a cube from `(t, y, x)` ordered data.
    pub fn new(height: usize, width: usize, frames: usize, data: Vec<u8>) -> Result<Self> {
        if height < MIN_EXTENT || width < MIN_EXTENT || frames < MIN_EXTENT {
            return Err(Error::InvalidParameter(format!(
                "cube {height}x{width}x{frames} is below the {MIN_EXTENT}x{MIN_EXTENT}x{MIN_EXTENT} minimum"
            )));
        }
        let expected = height * width * frames;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "cube {height}x{width}x{frames} needs {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(VideoCube {
            height,
            width,
            frames,
            data,
        })
    }

    /// Builds a cube by evaluating `f(y, x, t)` at every voxel.
    pub fn from_fn(
        height: usize,
        width: usize,
        frames: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * frames);
        for t in 0..frames {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(y, x, t));
                }
            }
        }
        VideoCube::new(height, width, frames, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Raw samples in `(t, y, x)` order.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, t: usize) -> u8 {
        self.data[(t * self.height + y) * self.width + x]
    }

    /// Extent of `plane`'s slices as `(rows, cols)`.
    pub fn slice_shape(&self, plane: PlaneFamily) -> (usize, usize) {
        match plane {
            PlaneFamily::Xy => (self.height, self.width),
            PlaneFamily::Xt => (self.frames, self.width),
            PlaneFamily::Yt => (self.frames, self.height),
        }
    }

    /// Number of slices in `plane`'s family.
    pub fn slice_count(&self, plane: PlaneFamily) -> usize {
        match plane {
            PlaneFamily::Xy => self.frames,
            PlaneFamily::Xt => self.height,
            PlaneFamily::Yt => self.width,
        }
    }

    /// Extracts slice `index` of `plane`.
    pub fn slice(&self, plane: PlaneFamily, index: usize) -> Result<Slice> {
        let limit = self.slice_count(plane);
        if index >= limit {
            return Err(Error::OutOfRange {
                what: plane.index_name(),
                index,
                limit,
            });
        }
        let (rows, cols) = self.slice_shape(plane);
        let data = match plane {
            PlaneFamily::Xy => {
                let frame = self.height * self.width;
                self.data[index * frame..(index + 1) * frame].to_vec()
            }
            PlaneFamily::Xt => {
                let mut out = Vec::with_capacity(rows * cols);
                for t in 0..self.frames {
                    let start = (t * self.height + index) * self.width;
                    out.extend_from_slice(&self.data[start..start + self.width]);
                }
                out
            }
            PlaneFamily::Yt => {
                let mut out = Vec::with_capacity(rows * cols);
                for t in 0..self.frames {
                    for y in 0..self.height {
                        out.push(self.get(y, index, t));
                    }
                }
                out
            }
        };
        Ok(Slice {
            plane,
            fixed_index: index,
            rows,
            cols,
            data,
        })
    }

    /// Every `stride`-th slice of `plane`, starting from index 0.
    pub fn slices(&self, plane: PlaneFamily, stride: usize) -> Result<Vec<Slice>> {
        if stride == 0 {
            return Err(Error::InvalidParameter("slice stride must be positive".into()));
        }
        (0..self.slice_count(plane))
            .step_by(stride)
            .map(|i| self.slice(plane, i))
            .collect()
    }

    /// Serializes the cube in the `DTC1` raw format.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(RAW_HEADER_LEN + self.data.len());
        out.extend_from_slice(RAW_MAGIC);
        for dim in [self.height, self.width, self.frames] {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.data);
        out
    }

    /// Parses a `DTC1` raw cube. `path` is only used in error messages.
    pub fn from_raw_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        if bytes.len() < RAW_HEADER_LEN {
            return Err(Error::format(path, "truncated raw cube header"));
        }
        if &bytes[..4] != RAW_MAGIC {
            return Err(Error::format(path, "bad magic, expected DTC1"));
        }
        let dim = |i: usize| {
            let b = &bytes[4 + 4 * i..8 + 4 * i];
            u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize
        };
        let (height, width, frames) = (dim(0), dim(1), dim(2));
        let expected = height
            .checked_mul(width)
            .and_then(|v| v.checked_mul(frames))
            .ok_or_else(|| Error::format(path, "cube dimensions overflow"))?;
        let payload = &bytes[RAW_HEADER_LEN..];
        if payload.len() < expected {
            return Err(Error::format(
                path,
                format!(
                    "truncated raw cube: header {height}x{width}x{frames} needs {expected} bytes, found {}",
                    payload.len()
                ),
            ));
        }
        if payload.len() > expected {
            return Err(Error::format(
                path,
                format!("{} trailing bytes after cube data", payload.len() - expected),
            ));
        }
        VideoCube::new(height, width, frames, payload.to_vec())
    }

    pub fn write_raw(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_raw_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Writes every frame as `frame_NNNNN.pgm` into `dir`.
    pub fn write_frames(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let frame = self.height * self.width;
        for t in 0..self.frames {
            let path = dir.join(format!("frame_{t:05}.pgm"));
            crate::labelmap::write_pgm(
                &path,
                self.width,
                self.height,
                &self.data[t * frame..(t + 1) * frame],
            )?;
        }
        Ok(())
    }
}

/// One of the three orthogonal slicing directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneFamily {
    /// Spatial frames, one per `t`; axes `(y, x)`.
    Xy,
    /// One per `y`; axes `(t, x)`.
    Xt,
    /// One per `x`; axes `(t, y)`.
    Yt,
}

impl PlaneFamily {
    pub const ALL: [PlaneFamily; 3] = [PlaneFamily::Xy, PlaneFamily::Xt, PlaneFamily::Yt];

    pub fn name(self) -> &'static str {
        match self {
            PlaneFamily::Xy => "xy",
            PlaneFamily::Xt => "xt",
            PlaneFamily::Yt => "yt",
        }
    }

    fn index_name(self) -> &'static str {
        match self {
            PlaneFamily::Xy => "xy slice index (t)",
            PlaneFamily::Xt => "xt slice index (y)",
            PlaneFamily::Yt => "yt slice index (x)",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            PlaneFamily::Xy => 0,
            PlaneFamily::Xt => 1,
            PlaneFamily::Yt => 2,
        }
    }
}

impl fmt::Display for PlaneFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlaneFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" => Ok(PlaneFamily::Xy),
            "xt" => Ok(PlaneFamily::Xt),
            "yt" => Ok(PlaneFamily::Yt),
            other => Err(Error::InvalidParameter(format!(
                "unknown plane family {other:?} (expected xy, xt or yt)"
            ))),
        }
    }
}

/// A 2D cut through a cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub plane: PlaneFamily,
    /// The held coordinate: `t` for xy, `y` for xt, `x` for yt.
    pub fixed_index: usize,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl Slice {
    /// A free-standing slice, mostly useful for tests and single images.
    pub fn from_image(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} image needs {} samples, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Slice {
            plane: PlaneFamily::Xy,
            fixed_index: 0,
            rows,
            cols,
            data,
        })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }
}

/// On-disk layouts accepted by [`load_cube`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CubeFormat {
    /// A directory of 8-bit grayscale PGM or PNG frames, read in
    /// lexicographic filename order.
    FrameDirectory,
    /// A `DTC1` raw cube file.
    Raw,
}

impl CubeFormat {
    /// Directories are frame stacks; everything else is a raw cube.
    pub fn detect(path: &Path) -> CubeFormat {
        if path.is_dir() {
            CubeFormat::FrameDirectory
        } else {
            CubeFormat::Raw
        }
    }
}

impl FromStr for CubeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frames" | "frame-directory" => Ok(CubeFormat::FrameDirectory),
            "raw" => Ok(CubeFormat::Raw),
            other => Err(Error::InvalidParameter(format!(
                "unknown cube format {other:?} (expected frames or raw)"
            ))),
        }
    }
}

pub fn load_cube(path: impl AsRef<Path>, format: CubeFormat) -> Result<VideoCube> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        ));
    }
    match format {
        CubeFormat::Raw => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            VideoCube::from_raw_bytes(&bytes, path)
        }
        CubeFormat::FrameDirectory => load_frames(path),
    }
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_frame = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "png"))
            .unwrap_or(false);
        if is_frame && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

fn load_frames(dir: &Path) -> Result<VideoCube> {
    let paths = frame_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::format(dir, "no .pgm or .png frames found"));
    }
    let mut dims = None;
    let mut data = Vec::new();
    for path in &paths {
        let (w, h, pixels) = crate::labelmap::read_gray8(path)?;
        match dims {
            None => dims = Some((h, w)),
            Some((h0, w0)) if (h0, w0) != (h, w) => {
                return Err(Error::format(
                    path,
                    format!("frame is {w}x{h} but earlier frames are {w0}x{h0}"),
                ));
            }
            Some(_) => {}
        }
        data.extend_from_slice(&pixels);
    }
    let (height, width) = dims.expect("at least one frame");
    VideoCube::new(height, width, paths.len(), data)
}

/// Writes `bytes` to `path`, creating parent directories.
pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(bytes).map_err(|e| Error::io(path, e))
}
