//! Luma video containers, readers and resampling.
//!
//! Samples are kept on their native 8-bit scale (0..=255) as real values.

mod raw;
mod resample;
mod y4m;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use raw::{load_raw_yuv, read_raw, RawGeometry};
pub use resample::{
    resample_indices, spatial_downsample, temporal_downsample_drop, temporal_upsample_duplicate,
};
pub use y4m::{parse_y4m, read_y4m, Y4mHeader, Y4mReader};

/// Frames per second as an exact positive rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameRate(Ratio<u64>);

impl FrameRate {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidFrameRate(format!("{num}/{den} is not positive")));
        }
        Ok(Self(Ratio::new(num, den)))
    }

    pub fn integer(fps: u64) -> Result<Self> {
        Self::new(fps, 1)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for FrameRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Accepts `120`, `30000/1001`, `30000:1001` or a decimal such as `59.94`.
impl FromStr for FrameRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFrameRate(format!("cannot parse `{s}`"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once(['/', ':']) {
            let n = n.trim().parse::<u64>().map_err(|_| bad())?;
            let d = d.trim().parse::<u64>().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        if let Ok(n) = s.parse::<u64>() {
            return Self::new(n, 1);
        }
        let (int, frac) = s.split_once('.').ok_or_else(bad)?;
        if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int = if int.is_empty() { 0 } else { int.parse::<u64>().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac.parse::<u64>().ok()?))
            .ok_or_else(bad)?;
        Self::new(num, den)
    }
}

impl Serialize for FrameRate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Pixel layouts accepted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PixelFormat {
    Yuv420p,
    Gray8,
}

impl PixelFormat {
    /// Bytes occupied by one frame of the given geometry.
    pub fn frame_bytes(self, width: usize, height: usize) -> usize {
        let luma = width * height;
        match self {
            PixelFormat::Gray8 => luma,
            PixelFormat::Yuv420p => luma + 2 * width.div_ceil(2) * height.div_ceil(2),
        }
    }
}

impl FromStr for PixelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yuv420p" | "420" | "i420" => Ok(PixelFormat::Yuv420p),
            "gray" | "gray8" | "mono" | "y8" => Ok(PixelFormat::Gray8),
            "yuv420p10le" | "yuv420p10" | "gray10le" | "gray16le" => Err(
                Error::UnsupportedColorspace(format!("{s} (only 8-bit input is supported)")),
            ),
            _ => Err(Error::UnsupportedColorspace(s.to_string())),
        }
    }
}

/// Container-level description of a loaded video.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VideoMeta {
    pub width: usize,
    pub height: usize,
    pub fps: FrameRate,
    pub frame_count: usize,
    pub pixel_format: PixelFormat,
}

/// A single-channel image stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Plane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {width}x{height} plane",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[T] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Plane<U> {
        Plane { width: self.width, height: self.height, data: self.data.iter().copied().map(f).collect() }
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }
}

/// A frame-rate-annotated sequence of luma planes of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaVideo<T> {
    frames: Vec<Plane<T>>,
    width: usize,
    height: usize,
    fps: FrameRate,
    source_bit_depth: u8,
}

impl<T: Scalar> LumaVideo<T> {
    pub fn new(frames: Vec<Plane<T>>, fps: FrameRate) -> Result<Self> {
        Self::with_bit_depth(frames, fps, 8)
    }

    pub fn with_bit_depth(frames: Vec<Plane<T>>, fps: FrameRate, source_bit_depth: u8) -> Result<Self> {
        let first = frames.first().ok_or(Error::Empty("video has no frames"))?;
        let (width, height) = (first.width(), first.height());
        if let Some((i, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.width() != width || f.height() != height)
        {
            return Err(Error::DimensionMismatch(format!(
                "frame {i} is {}x{}, expected {width}x{height}",
                f.width(),
                f.height()
            )));
        }
        Ok(Self { frames, width, height, fps, source_bit_depth })
    }

    pub fn frames(&self) -> &[Plane<T>] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    pub fn source_bit_depth(&self) -> u8 {
        self.source_bit_depth
    }

    /// Same frames, relabelled with a different rate.
    pub fn with_fps(mut self, fps: FrameRate) -> Self {
        self.fps = fps;
        self
    }

    pub fn into_frames(self) -> Vec<Plane<T>> {
        self.frames
    }
}

/// Reads a Y4M file, or a raw planar file when `raw` geometry is supplied,
/// averaging every `downsample`×`downsample` block while streaming so that
/// full-resolution frames are never held all at once.
pub fn load_video<T: Scalar>(
    path: impl AsRef<Path>,
    raw: Option<RawGeometry>,
    downsample: usize,
) -> Result<(VideoMeta, LumaVideo<T>)> {
    let path = path.as_ref();
    match raw {
        Some(geometry) => {
            let file = std::fs::File::open(path)?;
            let size = file.metadata()?.len();
            let frame_bytes = geometry.frame_bytes() as u64;
            if frame_bytes == 0 || size % frame_bytes != 0 {
                return Err(Error::SizeMismatch { size, frame_bytes });
            }
            read_raw(std::io::BufReader::new(file), geometry, downsample)
        }
        None => {
            let file = std::fs::File::open(path)?;
            read_y4m(std::io::BufReader::new(file), downsample)
        }
    }
}

/// Block-mean of `factor`×`factor` tiles of an 8-bit plane, discarding
/// trailing partial rows and columns.
pub(crate) fn pool_u8<T: Scalar>(src: &[u8], width: usize, height: usize, factor: usize) -> Plane<T> {
    let (ow, oh) = (width / factor, height / factor);
    if factor == 1 {
        return Plane { width, height, data: src.iter().map(|&v| T::from_f64_lossy(v as f64)).collect() };
    }
    let mut sums = vec![0u64; ow];
    let mut data = Vec::with_capacity(ow * oh);
    let area = (factor * factor) as f64;
    for by in 0..oh {
        sums.iter_mut().for_each(|s| *s = 0);
        for y in by * factor..(by + 1) * factor {
            let row = &src[y * width..y * width + ow * factor];
            for (sum, chunk) in sums.iter_mut().zip(row.chunks_exact(factor)) {
                *sum += chunk.iter().map(|&v| v as u64).sum::<u64>();
            }
        }
        data.extend(sums.iter().map(|&s| T::from_f64_lossy(s as f64 / area)));
    }
    Plane { width: ow, height: oh, data }
}

pub(crate) fn check_factor(width: usize, height: usize, factor: usize) -> Result<()> {
    if factor == 0 {
        return Err(Error::InvalidParameter("downsample factor must be at least 1".into()));
    }
    if factor > width || factor > height {
        return Err(Error::DegenerateOutput(format!(
            "factor {factor} exceeds frame size {width}x{height}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_rate_parsing() {
        assert_eq!("120".parse::<FrameRate>().unwrap(), FrameRate::new(120, 1).unwrap());
        assert_eq!("30000/1001".parse::<FrameRate>().unwrap(), FrameRate::new(30000, 1001).unwrap());
        assert_eq!("60:2".parse::<FrameRate>().unwrap(), FrameRate::new(30, 1).unwrap());
        assert_eq!("59.94".parse::<FrameRate>().unwrap(), FrameRate::new(2997, 50).unwrap());
        assert!("0".parse::<FrameRate>().is_err());
        assert!("-30".parse::<FrameRate>().is_err());
        assert!("abc".parse::<FrameRate>().is_err());
        assert!(FrameRate::new(30, 0).is_err());
    }

    #[test]
    fn frame_bytes() {
        assert_eq!(PixelFormat::Yuv420p.frame_bytes(4, 4), 24);
        assert_eq!(PixelFormat::Yuv420p.frame_bytes(5, 3), 15 + 2 * 3 * 2);
        assert_eq!(PixelFormat::Gray8.frame_bytes(4, 4), 16);
        assert!("yuv420p10le".parse::<PixelFormat>().is_err());
    }

    #[test]
    fn video_rejects_mixed_sizes() {
        let fps = FrameRate::integer(30).unwrap();
        let frames = vec![Plane::filled(4, 4, 0.0f64), Plane::filled(4, 5, 0.0)];
        assert!(matches!(LumaVideo::new(frames, fps), Err(Error::DimensionMismatch(_))));
        assert!(matches!(LumaVideo::<f64>::new(vec![], fps), Err(Error::Empty(_))));
    }
}
