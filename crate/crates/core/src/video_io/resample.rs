//! Spatial block-mean pooling and frame-index temporal resampling.

use super::{check_factor, FrameRate, LumaVideo, Plane};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Average-pools every `factor`×`factor` tile. Trailing partial rows and
/// columns are dropped; the frame rate is unchanged.
pub fn spatial_downsample<T: Scalar>(video: &LumaVideo<T>, factor: usize) -> Result<LumaVideo<T>> {
    check_factor(video.width(), video.height(), factor)?;
    if factor == 1 {
        return Ok(video.clone());
    }
    let (ow, oh) = (video.width() / factor, video.height() / factor);
    let area = lit::<T>((factor * factor) as f64);
    let frames = video
        .frames()
        .iter()
        .map(|frame| {
            let mut sums = vec![T::zero(); ow];
            let mut out = Vec::with_capacity(ow * oh);
            for by in 0..oh {
                sums.iter_mut().for_each(|s| *s = T::zero());
                for y in by * factor..(by + 1) * factor {
                    for (sum, chunk) in sums.iter_mut().zip(frame.row(y).chunks_exact(factor)) {
                        for &v in chunk {
                            *sum = *sum + v;
                        }
                    }
                }
                out.extend(sums.iter().map(|&s| s / area));
            }
            Plane::new(ow, oh, out)
        })
        .collect::<Result<Vec<_>>>()?;
    LumaVideo::with_bit_depth(frames, video.fps(), video.source_bit_depth())
}

/// Source index for every output frame when `n_in` frames at `fps_in` are
/// re-timed to `fps_out`: output frame `n` is `floor(n * fps_in / fps_out)`,
/// for as long as that index stays inside the source.
pub fn resample_indices(n_in: usize, fps_in: FrameRate, fps_out: FrameRate) -> Vec<usize> {
    // n * (a/b) / (c/d) = n * a * d / (b * c)
    let num = fps_in.numer() as u128 * fps_out.denom() as u128;
    let den = fps_in.denom() as u128 * fps_out.numer() as u128;
    let count = (n_in as u128 * den).div_ceil(num);
    (0..count).map(|n| (n * num / den) as usize).collect()
}

fn pick_frames<T: Scalar>(video: &LumaVideo<T>, target: FrameRate) -> Result<LumaVideo<T>> {
    let frames = resample_indices(video.frame_count(), video.fps(), target)
        .into_iter()
        .map(|i| video.frames()[i].clone())
        .collect();
    LumaVideo::with_bit_depth(frames, target, video.source_bit_depth())
}

/// Lowers the frame rate by dropping frames. Applied to a reference this
/// yields the pseudo-reference at the distorted rate.
pub fn temporal_downsample_drop<T: Scalar>(video: &LumaVideo<T>, target: FrameRate) -> Result<LumaVideo<T>> {
    if target > video.fps() {
        return Err(Error::InvalidFrameRate(format!(
            "cannot drop frames from {} up to {target}",
            video.fps()
        )));
    }
    pick_frames(video, target)
}

/// Raises the frame rate by repeating frames.
pub fn temporal_upsample_duplicate<T: Scalar>(video: &LumaVideo<T>, target: FrameRate) -> Result<LumaVideo<T>> {
    if target < video.fps() {
        return Err(Error::InvalidFrameRate(format!(
            "cannot duplicate frames from {} down to {target}",
            video.fps()
        )));
    }
    pick_frames(video, target)
}
