//! Headerless planar `yuv420p` / `gray8` input.

use std::io::Read;
use std::path::Path;

use super::{check_factor, pool_u8, FrameRate, LumaVideo, PixelFormat, VideoMeta};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Geometry that a raw file cannot describe by itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawGeometry {
    pub width: usize,
    pub height: usize,
    pub fps: FrameRate,
    pub pixel_format: PixelFormat,
}

impl RawGeometry {
    pub fn frame_bytes(&self) -> usize {
        self.pixel_format.frame_bytes(self.width, self.height)
    }
}

/// Streams raw frames from `reader`, block-averaging luma by `downsample`.
/// A trailing partial frame is reported as a size mismatch.
pub fn read_raw<T: Scalar, R: Read>(
    mut reader: R,
    geometry: RawGeometry,
    downsample: usize,
) -> Result<(VideoMeta, LumaVideo<T>)> {
    let RawGeometry { width, height, fps, pixel_format } = geometry;
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!("raw geometry {width}x{height}")));
    }
    check_factor(width, height, downsample)?;
    let frame_bytes = geometry.frame_bytes();
    let luma_bytes = width * height;
    let mut buf = vec![0u8; frame_bytes];
    let mut frames = Vec::new();
    let mut total = 0u64;
    loop {
        let n = read_full(&mut reader, &mut buf)?;
        total += n as u64;
        if n == 0 {
            break;
        }
        if n < frame_bytes {
            return Err(Error::SizeMismatch { size: total, frame_bytes: frame_bytes as u64 });
        }
        frames.push(pool_u8(&buf[..luma_bytes], width, height, downsample));
    }
    if frames.is_empty() {
        return Err(Error::Empty("raw input contains no frames"));
    }
    let meta = VideoMeta { width, height, fps, frame_count: frames.len(), pixel_format };
    Ok((meta, LumaVideo::with_bit_depth(frames, fps, 8)?))
}

fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(filled)
}

/// Loads every frame of a raw planar file at native resolution.
pub fn load_raw_yuv<T: Scalar>(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    fps: FrameRate,
    pixel_format: PixelFormat,
) -> Result<LumaVideo<T>> {
    let geometry = RawGeometry { width, height, fps, pixel_format };
    super::load_video(path, Some(geometry), 1).map(|(_, v)| v)
}
