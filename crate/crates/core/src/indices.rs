//! Block partitioning, entropy fields and the GTI / GSI / GSTI indices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ggd_stats::scaled_entropy;
use crate::scalar::{ordered_mean, Scalar};
use crate::video_io::{FrameRate, Plane};

/// Non-overlapping `side`×`side` blocks in raster order; trailing partial
/// blocks are discarded. Each block's samples are row-major.
pub fn partition_blocks<T: Scalar>(frame: &Plane<T>, side: usize) -> Result<Vec<Vec<T>>> {
    let (bw, bh) = block_grid(frame.width(), frame.height(), side)?;
    let mut blocks = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let mut block = Vec::with_capacity(side * side);
            for y in by * side..(by + 1) * side {
                block.extend_from_slice(&frame.row(y)[bx * side..(bx + 1) * side]);
            }
            blocks.push(block);
        }
    }
    Ok(blocks)
}

/// Blocks per row and per column.
pub fn block_grid(width: usize, height: usize, side: usize) -> Result<(usize, usize)> {
    if side == 0 {
        return Err(Error::InvalidParameter("block side must be at least 1".into()));
    }
    if width < side || height < side {
        return Err(Error::DimensionMismatch(format!(
            "{width}x{height} frame is smaller than one {side}x{side} block"
        )));
    }
    Ok((width / side, height / side))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// ε: entropies of temporal band-pass coefficients.
    Temporal,
    /// θ: entropies of spatial MS coefficients.
    Spatial,
}

/// Scaled entropies indexed by (subband, frame, block), stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyField<T> {
    kind: FieldKind,
    fps: FrameRate,
    subbands: usize,
    frames: usize,
    blocks: usize,
    values: Vec<T>,
}

impl<T: Scalar> EntropyField<T> {
    /// `values[k][t][p]`; every frame must carry the same block count.
    pub fn from_nested(kind: FieldKind, fps: FrameRate, values: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let subbands = values.len();
        let frames = values.first().map_or(0, Vec::len);
        let blocks = values.first().and_then(|s| s.first()).map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(subbands * frames * blocks);
        for sb in values {
            if sb.len() != frames {
                return Err(Error::LengthMismatch(sb.len(), frames));
            }
            for frame in sb {
                if frame.len() != blocks {
                    return Err(Error::BlockCountMismatch(frame.len(), blocks));
                }
                flat.extend(frame);
            }
        }
        Ok(Self { kind, fps, subbands, frames, blocks, values: flat })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    pub fn subbands(&self) -> usize {
        self.subbands
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Block values of subband `k` (0-based) at frame `t`.
    pub fn frame(&self, k: usize, t: usize) -> &[T] {
        assert!(k < self.subbands && t < self.frames, "field index ({k}, {t}) out of range");
        let start = (k * self.frames + t) * self.blocks;
        &self.values[start..start + self.blocks]
    }

    /// Keeps only the first `frames` frames of every subband.
    pub fn truncated(&self, frames: usize) -> Self {
        let frames = frames.min(self.frames);
        let mut values = Vec::with_capacity(self.subbands * frames * self.blocks);
        for k in 0..self.subbands {
            for t in 0..frames {
                values.extend_from_slice(self.frame(k, t));
            }
        }
        Self { frames, values, ..*self }
    }
}

/// Scaled entropies of every block, one row per plane.
pub(crate) fn entropy_rows<T: Scalar>(planes: &[Plane<T>], side: usize, noise_var: T) -> Result<Vec<Vec<T>>> {
    planes
        .par_iter()
        .map(|plane| {
            partition_blocks(plane, side)?
                .iter()
                .map(|b| scaled_entropy(b, noise_var).map(|s| s.epsilon))
                .collect::<Result<Vec<T>>>()
        })
        .collect()
}

/// Source frames averaged into output frame `t` when `n` frames at
/// `fps_ref` are grouped down to `fps_dist`: frame `i` (0-based) belongs to
/// group `floor(i · fps_dist / fps_ref)`. Only complete groups are emitted.
pub fn averaging_groups(n: usize, fps_ref: FrameRate, fps_dist: FrameRate) -> Vec<std::ops::Range<usize>> {
    // F = fps_ref / fps_dist = num / den
    let num = fps_ref.numer() as u128 * fps_dist.denom() as u128;
    let den = fps_ref.denom() as u128 * fps_dist.numer() as u128;
    let complete = (n as u128 * den / num) as usize;
    let start = |g: usize| (g as u128 * num).div_ceil(den) as usize;
    (0..complete).map(|g| start(g)..start(g + 1)).collect()
}

/// Temporally averages a reference entropy field onto the distorted frame
/// rate. With an integer ratio `F` output frame `t` is the mean of input
/// frames `tF .. tF+F-1`.
pub fn average_reference_entropies<T: Scalar>(
    field: &EntropyField<T>,
    fps_ref: FrameRate,
    fps_dist: FrameRate,
) -> Result<EntropyField<T>> {
    if fps_ref < fps_dist {
        return Err(Error::InvalidFrameRate(format!(
            "reference rate {fps_ref} is below distorted rate {fps_dist}"
        )));
    }
    let groups = averaging_groups(field.frames(), fps_ref, fps_dist);
    if groups.is_empty() {
        return Err(Error::DegenerateOutput(format!(
            "{} reference frames at {fps_ref} yield no complete group at {fps_dist}",
            field.frames()
        )));
    }
    let mut values = Vec::with_capacity(field.subbands() * groups.len() * field.blocks());
    for k in 0..field.subbands() {
        for g in &groups {
            for p in 0..field.blocks() {
                let members: Vec<T> = g.clone().map(|t| field.frame(k, t)[p]).collect();
                values.push(ordered_mean(&members));
            }
        }
    }
    Ok(EntropyField { frames: groups.len(), fps: fps_dist, values, ..*field })
}

/// The two factors of one block's GTI term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtiTerm<T> {
    /// `|ε_D − ε_PR|`.
    pub abs_diff: T,
    /// `(ε_R + 1) / (ε_PR + 1)`.
    pub ratio: T,
}

impl<T: Scalar> GtiTerm<T> {
    pub fn value(&self) -> T {
        ((T::one() + self.abs_diff) * self.ratio - T::one()).abs()
    }
}

/// Per-block absolute-difference and ratio terms.
pub fn gti_terms<T: Scalar>(eps_ref_avg: &[T], eps_dist: &[T], eps_pr: &[T]) -> Result<Vec<GtiTerm<T>>> {
    if eps_ref_avg.len() != eps_dist.len() {
        return Err(Error::BlockCountMismatch(eps_ref_avg.len(), eps_dist.len()));
    }
    if eps_pr.len() != eps_dist.len() {
        return Err(Error::BlockCountMismatch(eps_pr.len(), eps_dist.len()));
    }
    if eps_dist.is_empty() {
        return Err(Error::Empty("no blocks"));
    }
    Ok(eps_ref_avg
        .iter()
        .zip(eps_dist)
        .zip(eps_pr)
        .map(|((&r, &d), &pr)| GtiTerm {
            abs_diff: (d - pr).abs(),
            ratio: (r + T::one()) / (pr + T::one()),
        })
        .collect())
}

/// `(1/P) Σ_p |(1 + |ε_D − ε_PR|) · (ε_R + 1)/(ε_PR + 1) − 1|`.
pub fn gti_frame<T: Scalar>(eps_ref_avg: &[T], eps_dist: &[T], eps_pr: &[T]) -> Result<T> {
    let terms: Vec<T> = gti_terms(eps_ref_avg, eps_dist, eps_pr)?.iter().map(GtiTerm::value).collect();
    Ok(ordered_mean(&terms))
}

/// `(1/P) Σ_p |θ_D − θ_R|`.
pub fn gsi_frame<T: Scalar>(theta_ref_avg: &[T], theta_dist: &[T]) -> Result<T> {
    if theta_ref_avg.len() != theta_dist.len() {
        return Err(Error::BlockCountMismatch(theta_ref_avg.len(), theta_dist.len()));
    }
    if theta_dist.is_empty() {
        return Err(Error::Empty("no blocks"));
    }
    let diffs: Vec<T> = theta_ref_avg.iter().zip(theta_dist).map(|(&r, &d)| (d - r).abs()).collect();
    Ok(ordered_mean(&diffs))
}

pub fn gsti_frame<T: Scalar>(gti: T, gsi: T) -> T {
    gti * gsi
}

/// Arithmetic mean of a per-frame trace.
pub fn pool<T: Scalar>(trace: &[T]) -> Result<T> {
    if trace.is_empty() {
        return Err(Error::Empty("trace has no frames"));
    }
    Ok(ordered_mean(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fps(n: u64) -> FrameRate {
        FrameRate::integer(n).unwrap()
    }

    fn series(values: &[f64]) -> EntropyField<f64> {
        let frames = values.iter().map(|&v| vec![v]).collect();
        EntropyField::from_nested(FieldKind::Temporal, fps(120), vec![frames]).unwrap()
    }

    fn column(field: &EntropyField<f64>) -> Vec<f64> {
        (0..field.frames()).map(|t| field.frame(0, t)[0]).collect()
    }

    #[test]
    fn block_counts() {
        let f = Plane::filled(10, 10, 0.0f64);
        assert_eq!(partition_blocks(&f, 5).unwrap().len(), 4);
        let f = Plane::filled(12, 11, 0.0f64);
        assert_eq!(partition_blocks(&f, 5).unwrap().len(), 4);
        let f = Plane::from_fn(5, 5, |x, y| (x + 5 * y) as f64);
        let blocks = partition_blocks(&f, 5).unwrap();
        assert_eq!(blocks, vec![f.data().to_vec()]);
        assert!(partition_blocks(&Plane::filled(4, 9, 0.0f64), 5).is_err());
    }

    #[test]
    fn raster_order() {
        let f = Plane::from_fn(4, 4, |x, y| (x / 2 + 2 * (y / 2)) as f64);
        let blocks = partition_blocks(&f, 2).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            assert!(b.iter().all(|&v| v == i as f64));
        }
    }

    #[test]
    fn integer_ratio_averaging() {
        let field = series(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let avg = average_reference_entropies(&field, fps(120), fps(30)).unwrap();
        assert_eq!(column(&avg), vec![2.5, 6.5]);
        assert_eq!(avg.fps(), fps(30));
        let same = average_reference_entropies(&field, fps(120), fps(120)).unwrap();
        assert_eq!(same.values, field.values);
    }

    #[test]
    fn fractional_ratio_averaging() {
        let values: Vec<f64> = (1..=12).map(|v| v as f64 * v as f64).collect();
        let avg = average_reference_entropies(&series(&values), fps(120), fps(80)).unwrap();
        // oracle: g(t') = floor((t' - 1) / F) + 1 with F = 1.5, t' = 1..12
        let f = 1.5f64;
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for t in 1..=12usize {
            let g = ((t - 1) as f64 / f).floor() as usize + 1;
            if groups.len() < g {
                groups.push(Vec::new());
            }
            groups[g - 1].push(values[t - 1]);
        }
        let expected: Vec<f64> = groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
        assert_eq!(groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1, 2, 1, 2, 1, 2, 1]);
        let got = column(&avg);
        assert_eq!(got.len(), expected.len());
        for (a, b) in got.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn averaging_errors() {
        let field = series(&[1.0, 2.0, 3.0]);
        assert!(average_reference_entropies(&field, fps(30), fps(120)).is_err());
        assert!(matches!(
            average_reference_entropies(&field, fps(120), fps(30)),
            Err(Error::DegenerateOutput(_))
        ));
    }

    #[test]
    fn incomplete_trailing_group_dropped() {
        let field = series(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let avg = average_reference_entropies(&field, fps(60), fps(30)).unwrap();
        assert_eq!(column(&avg), vec![1.5, 3.5]);
    }

    #[test]
    fn gti_examples() {
        let e = [0.3, 1.7, 2.2];
        assert_eq!(gti_frame(&e, &e, &e).unwrap(), 0.0);
        assert_abs_diff_eq!(gti_frame(&[2.0], &[1.0], &[1.0]).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(gti_frame(&[1.0], &[2.0], &[1.0]).unwrap(), 1.0, epsilon = 1e-15);
        let terms = gti_terms(&e, &e, &e).unwrap();
        assert!(terms.iter().all(|t| t.ratio == 1.0 && t.abs_diff == 0.0));
        assert!(matches!(gti_frame(&[1.0], &[1.0, 2.0], &[1.0, 2.0]), Err(Error::BlockCountMismatch(1, 2))));
    }

    #[test]
    fn gsi_examples() {
        assert_eq!(gsi_frame(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(gsi_frame(&[0.0, 0.0], &[0.2, 0.4]).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(gsi_frame(&[0.0, 0.0], &[-0.2, 0.2]).unwrap(), 0.2, epsilon = 1e-15);
        assert!(gsi_frame(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn gsti_and_pool() {
        assert_eq!(gsti_frame(0.0, 0.7), 0.0);
        assert_abs_diff_eq!(gsti_frame(0.5, 0.2), 0.1, epsilon = 1e-15);
        assert_eq!(gsti_frame(0.9, 0.0), 0.0);
        assert_abs_diff_eq!(pool(&[0.1, 0.3]).unwrap(), 0.2, epsilon = 1e-15);
        assert_eq!(pool(&[0.25; 7]).unwrap(), 0.25);
        assert_eq!(pool(&[3.5]).unwrap(), 3.5);
        assert!(pool::<f64>(&[]).is_err());
    }

    #[test]
    fn truncation() {
        let field = series(&[1.0, 2.0, 3.0]);
        assert_eq!(column(&field.truncated(2)), vec![1.0, 2.0]);
        assert_eq!(field.truncated(10).frames(), 3);
    }
}
