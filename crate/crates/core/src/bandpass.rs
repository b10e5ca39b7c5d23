//! Temporal Haar wavelet-packet band-pass filtering and spatial
//! mean-subtracted (MS) coefficients.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::video_io::{LumaVideo, Plane};

pub const MAX_LEVELS: u32 = 6;

/// Half-width of the spatial Gaussian window.
pub const MS_HALF_WIDTH: usize = 7;

/// Equivalent filters of a full Haar wavelet-packet tree, low-pass excluded,
/// ordered by increasing centre frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFilterBank<T> {
    filters: Vec<Vec<T>>,
    levels: u32,
}

impl<T: Scalar> TemporalFilterBank<T> {
    pub fn filters(&self) -> &[Vec<T>] {
        &self.filters
    }

    /// Filter for subband `k`, counted from 1.
    pub fn filter(&self, k: usize) -> Option<&[T]> {
        k.checked_sub(1).and_then(|i| self.filters.get(i)).map(Vec::as_slice)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn support(&self) -> usize {
        1 << self.levels
    }
}

fn sign_changes(signs: &[i8]) -> usize {
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Every packet basis function of a `levels`-deep Haar tree, including the
/// low-pass member, sorted by sequency (number of sign changes).
///
/// Each leaf of the tree chooses low (`[1, 1]/√2`) or high (`[1, -1]/√2`) at
/// every level, so the equivalent filter is a Kronecker product of those
/// two-tap filters: tap `τ` has sign `(-1)^popcount(node & τ)` and magnitude
/// `2^(-levels/2)`.
pub fn haar_packet_basis<T: Scalar>(levels: u32) -> Result<Vec<Vec<T>>> {
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(Error::InvalidParameter(format!("levels must be in 1..={MAX_LEVELS}, got {levels}")));
    }
    let n = 1usize << levels;
    let magnitude = (1.0 / n as f64).sqrt();
    let mut rows: Vec<Vec<i8>> = (0..n)
        .map(|node| {
            (0..n)
                .map(|tap| if (node & tap).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect();
    rows.sort_by_key(|r| sign_changes(r));
    Ok(rows
        .into_iter()
        .map(|r| r.into_iter().map(|s| lit::<T>(s as f64 * magnitude)).collect())
        .collect())
}

/// Builds the `2^levels - 1` band-pass filters of the Haar packet tree.
pub fn build_haar_packet<T: Scalar>(levels: u32) -> Result<TemporalFilterBank<T>> {
    let mut filters = haar_packet_basis(levels)?;
    filters.remove(0);
    Ok(TemporalFilterBank { filters, levels })
}

/// Temporal band-pass response of one filter.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandVideo<T> {
    /// Subband index, counted from 1 (0 for an unlabelled filter).
    pub subband: usize,
    pub frames: Vec<Plane<T>>,
    /// Source frame indices at which a full filter window starts.
    pub valid_range: Range<usize>,
}

/// Valid-mode temporal filtering: output frame `t` is
/// `Σ_τ filter[τ] · frame[t + τ]`, computed for every `t` whose window fits
/// inside the source.
pub fn temporal_filter<T: Scalar>(video: &LumaVideo<T>, filter: &[T]) -> Result<SubbandVideo<T>> {
    temporal_filter_frames(video.frames(), filter).map(|(frames, valid_range)| SubbandVideo {
        subband: 0,
        frames,
        valid_range,
    })
}

/// Runs every filter of `bank`, returning subbands `1..=K` in order.
pub fn temporal_subbands<T: Scalar>(video: &LumaVideo<T>, bank: &TemporalFilterBank<T>) -> Result<Vec<SubbandVideo<T>>> {
    bank.filters()
        .iter()
        .enumerate()
        .map(|(i, f)| temporal_filter(video, f).map(|s| SubbandVideo { subband: i + 1, ..s }))
        .collect()
}

fn temporal_filter_frames<T: Scalar>(frames: &[Plane<T>], filter: &[T]) -> Result<(Vec<Plane<T>>, Range<usize>)> {
    if filter.is_empty() {
        return Err(Error::InvalidParameter("empty filter".into()));
    }
    if frames.len() < filter.len() {
        return Err(Error::TooFewFrames { needed: filter.len(), got: frames.len() });
    }
    let count = frames.len() - filter.len() + 1;
    let (w, h) = (frames[0].width(), frames[0].height());
    let out = (0..count)
        .into_par_iter()
        .map(|t| {
            // Positive and negative taps are summed apart so that a static
            // pixel cancels exactly under a zero-sum filter.
            let mut pos = vec![T::zero(); w * h];
            let mut neg = vec![T::zero(); w * h];
            for (&tap, frame) in filter.iter().zip(&frames[t..]) {
                let (acc, mag) = if tap < T::zero() { (&mut neg, -tap) } else { (&mut pos, tap) };
                for (a, &v) in acc.iter_mut().zip(frame.data()) {
                    *a = *a + mag * v;
                }
            }
            for (p, &n) in pos.iter_mut().zip(&neg) {
                *p = *p - n;
            }
            Plane::new(w, h, pos)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, 0..count))
}

/// Frame minus its Gaussian-weighted local mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MsFrame<T>(pub Plane<T>);

impl<T> MsFrame<T> {
    pub fn plane(&self) -> &Plane<T> {
        &self.0
    }
}

/// One axis of the separable window: unit-sum Gaussian with standard
/// deviation `half_width / 3` sampled on `-half_width..=half_width`.
pub fn gaussian_taps(half_width: usize) -> Vec<f64> {
    let sigma = half_width as f64 / 3.0;
    let raw: Vec<f64> = (-(half_width as i64)..=half_width as i64)
        .map(|g| (-((g * g) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Full 2-D weights `ω[g][h]`, row `g + half_width`, column `h + half_width`.
pub fn gaussian_window(half_width: usize) -> Vec<Vec<f64>> {
    let taps = gaussian_taps(half_width);
    taps.iter().map(|&a| taps.iter().map(|&b| a * b).collect()).collect()
}

/// Half-sample symmetric reflection (`… c b a | a b c …`), folded as many
/// times as needed so frames narrower than the window are still covered.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n { m } else { 2 * n - 1 - m }
}

/// Mean-subtracted coefficients with a 15×15 Gaussian window (σ = 7/3) and
/// reflected borders.
pub fn spatial_ms<T: Scalar>(frame: &Plane<T>) -> MsFrame<T> {
    spatial_ms_with(frame, MS_HALF_WIDTH)
}

pub fn spatial_ms_with<T: Scalar>(frame: &Plane<T>, half_width: usize) -> MsFrame<T> {
    let taps: Vec<T> = gaussian_taps(half_width).into_iter().map(lit).collect();
    let (w, h) = (frame.width(), frame.height());
    let r = half_width as isize;
    let xs: Vec<Vec<usize>> = (0..w as isize)
        .map(|x| (-r..=r).map(|d| reflect(x + d, w)).collect())
        .collect();
    let ys: Vec<Vec<usize>> = (0..h as isize)
        .map(|y| (-r..=r).map(|d| reflect(y + d, h)).collect())
        .collect();

    let data = frame.data();
    let mut horizontal = vec![T::zero(); w * h];
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = T::zero();
            for (&tap, &sx) in taps.iter().zip(&xs[x]) {
                acc = acc + tap * row[sx];
            }
            horizontal[y * w + x] = acc;
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut mean = T::zero();
            for (&tap, &sy) in taps.iter().zip(&ys[y]) {
                mean = mean + tap * horizontal[sy * w + x];
            }
            out.push(data[y * w + x] - mean);
        }
    }
    MsFrame(Plane::new(w, h, out).expect("same geometry as input"))
}
