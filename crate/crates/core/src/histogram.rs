//! Normalized histograms of temporal band-pass coefficients.

use std::fmt::Write;

use crate::bandpass::{build_haar_packet, temporal_filter};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::video_io::LumaVideo;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub centers: Vec<f64>,
    /// Fraction of samples per bin; sums to one.
    pub frequencies: Vec<f64>,
    pub bin_width: f64,
}

impl Histogram {
    /// Frequency of the bin that contains zero.
    pub fn central_mass(&self) -> f64 {
        let lo = self.centers[0] - self.bin_width / 2.0;
        let i = ((-lo / self.bin_width).floor() as usize).min(self.frequencies.len() - 1);
        self.frequencies[i]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,frequency\n");
        for (c, f) in self.centers.iter().zip(&self.frequencies) {
            writeln!(out, "{c},{f}").unwrap();
        }
        out
    }
}

/// Histogram over `[-range, range]` with `bins` equal bins. Samples outside
/// the range are counted in the outermost bins. An odd bin count centres a
/// bin on zero.
pub fn histogram<T: Scalar>(values: &[T], bins: usize, range: f64) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if !(range.is_finite() && range > 0.0) {
        return Err(Error::InvalidParameter(format!("histogram range {range} must be positive")));
    }
    if values.is_empty() {
        return Err(Error::Empty("no samples to histogram"));
    }
    let width = 2.0 * range / bins as f64;
    let mut counts = vec![0u64; bins];
    for v in values {
        let v = v.to_f64_lossy();
        let i = ((v + range) / width).floor();
        let i = if i.is_nan() || i < 0.0 { 0 } else { (i as usize).min(bins - 1) };
        counts[i] += 1;
    }
    let total = values.len() as f64;
    Ok(Histogram {
        centers: (0..bins).map(|i| -range + (i as f64 + 0.5) * width).collect(),
        frequencies: counts.iter().map(|&c| c as f64 / total).collect(),
        bin_width: width,
    })
}

/// All coefficients of temporal subband `k` (counted from 1).
pub fn subband_coefficients<T: Scalar>(video: &LumaVideo<T>, levels: u32, k: usize) -> Result<Vec<T>> {
    let bank = build_haar_packet::<T>(levels)?;
    let filter = bank
        .filter(k)
        .ok_or_else(|| Error::InvalidParameter(format!("subband {k} is outside 1..={}", bank.len())))?;
    let sb = temporal_filter(video, filter)?;
    Ok(sb.frames.into_iter().flat_map(|f| f.into_data()).collect())
}

/// Histogram of subband `k`; `range` defaults to the largest magnitude.
pub fn subband_histogram<T: Scalar>(
    video: &LumaVideo<T>,
    levels: u32,
    k: usize,
    bins: usize,
    range: Option<f64>,
) -> Result<Histogram> {
    let coeffs = subband_coefficients(video, levels, k)?;
    let range = range.unwrap_or_else(|| {
        let peak = coeffs.iter().fold(0.0f64, |m, v| m.max(v.to_f64_lossy().abs()));
        if peak > 0.0 { peak } else { 1.0 }
    });
    histogram(&coeffs, bins, range)
}
