//! End-to-end GSTI scoring of a reference/distorted pair.

use rayon::prelude::*;
use serde::Serialize;

use crate::bandpass::{build_haar_packet, spatial_ms, temporal_filter, TemporalFilterBank, MAX_LEVELS};
use crate::error::{Error, Result};
use crate::indices::{
    average_reference_entropies, block_grid, entropy_rows, gsi_frame, gsti_frame, gti_terms, pool,
    EntropyField, FieldKind, GtiTerm,
};
use crate::scalar::{lit, ordered_mean, Scalar};
use crate::video_io::{spatial_downsample, temporal_downsample_drop, FrameRate, LumaVideo};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Tunables of the metric. Defaults are the published operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreConfig {
    /// Depth of the temporal Haar packet tree (`2^levels - 1` subbands).
    pub levels: u32,
    /// Side of the square entropy blocks.
    pub block_side: usize,
    /// Variance of the additive Gaussian channel noise.
    pub noise_var: f64,
    /// Spatial average-pooling factor applied to both videos.
    pub downsample: usize,
    /// Subband reported as the headline score, counted from 1.
    pub primary_subband: usize,
    /// Emit per-frame traces in the report.
    #[serde(skip)]
    pub traces: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self { levels: 3, block_side: 5, noise_var: 0.1, downsample: 16, primary_subband: 1, traces: false }
    }
}

impl ScoreConfig {
    pub fn subband_count(&self) -> usize {
        (1 << self.levels) - 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LEVELS).contains(&self.levels) {
            return Err(Error::InvalidParameter(format!("levels must be in 1..={MAX_LEVELS}")));
        }
        if self.block_side == 0 {
            return Err(Error::InvalidParameter("block side must be at least 1".into()));
        }
        if !(self.noise_var.is_finite() && self.noise_var >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise variance {} is not a finite non-negative value", self.noise_var)));
        }
        if self.downsample == 0 {
            return Err(Error::InvalidParameter("downsample factor must be at least 1".into()));
        }
        if !(1..=self.subband_count()).contains(&self.primary_subband) {
            return Err(Error::InvalidParameter(format!(
                "subband {} is outside 1..={}",
                self.primary_subband,
                self.subband_count()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamSummary {
    pub fps: FrameRate,
    pub frames: usize,
    /// Resolution after spatial downsampling.
    pub analysed_width: usize,
    pub analysed_height: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubbandScore {
    pub k: usize,
    pub gsti: f64,
    pub gti: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubbandTrace {
    pub k: usize,
    pub gti: Vec<f64>,
    pub gsti: Vec<f64>,
    /// Block mean of `|ε_D − ε_PR|` per frame.
    pub abs_diff: Vec<f64>,
    /// Block mean of `(ε_R + 1)/(ε_PR + 1)` per frame.
    pub ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Traces {
    pub gsi: Vec<f64>,
    pub subbands: Vec<SubbandTrace>,
}

/// Result of scoring one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GstiReport {
    pub schema_version: u32,
    pub config: ScoreConfig,
    pub reference: StreamSummary,
    pub distorted: StreamSummary,
    pub frames_scored: usize,
    pub blocks_per_frame: usize,
    pub primary_subband: usize,
    pub primary_score: f64,
    /// Pooled spatial index.
    pub gsi: f64,
    pub subbands: Vec<SubbandScore>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Traces>,
}

impl GstiReport {
    pub fn subband(&self, k: usize) -> Option<&SubbandScore> {
        self.subbands.iter().find(|s| s.k == k)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report contains only finite numbers")
    }
}

/// Scores `dist` against `ref_video` at native resolution: both are
/// average-pooled by `config.downsample` first.
pub fn score_pipeline<T: Scalar>(ref_video: &LumaVideo<T>, dist: &LumaVideo<T>, config: &ScoreConfig) -> Result<GstiReport> {
    config.validate()?;
    check_pair(ref_video, dist)?;
    let r = spatial_downsample(ref_video, config.downsample)?;
    let d = spatial_downsample(dist, config.downsample)?;
    score_downsampled(&r, &d, config)
}

/// Scores a pair that has already been pooled by `config.downsample`
/// (e.g. by a streaming reader).
pub fn score_downsampled<T: Scalar>(ref_video: &LumaVideo<T>, dist: &LumaVideo<T>, config: &ScoreConfig) -> Result<GstiReport> {
    config.validate()?;
    check_pair(ref_video, dist)?;
    let bank = build_haar_packet::<T>(config.levels)?;
    let support = bank.support();
    for v in [ref_video, dist] {
        if v.frame_count() < support {
            return Err(Error::TooFewFrames { needed: support, got: v.frame_count() });
        }
    }
    block_grid(ref_video.width(), ref_video.height(), config.block_side)?;
    let noise_var = lit::<T>(config.noise_var);
    let side = config.block_side;

    let pseudo_ref = temporal_downsample_drop(ref_video, dist.fps())?;
    if pseudo_ref.frame_count() < support {
        return Err(Error::TooFewFrames { needed: support, got: pseudo_ref.frame_count() });
    }

    let eps_ref = temporal_field(ref_video, &bank, side, noise_var)?;
    let eps_dist = temporal_field(dist, &bank, side, noise_var)?;
    let eps_pr = if pseudo_ref.fps() == ref_video.fps() {
        eps_ref.clone()
    } else {
        temporal_field(&pseudo_ref, &bank, side, noise_var)?
    };
    let eps_ref_avg = average_reference_entropies(&eps_ref, ref_video.fps(), dist.fps())?;

    let theta_ref = spatial_field(ref_video, side, noise_var)?;
    let theta_dist = spatial_field(dist, side, noise_var)?;
    let theta_ref_avg = average_reference_entropies(&theta_ref, ref_video.fps(), dist.fps())?;

    // fields are aligned on their first frame and cut to the shortest
    let frames = [eps_ref_avg.frames(), eps_dist.frames(), eps_pr.frames(), theta_ref_avg.frames(), theta_dist.frames()]
        .into_iter()
        .min()
        .unwrap_or(0);
    if frames == 0 {
        return Err(Error::TooFewFrames { needed: support, got: 0 });
    }

    let gsi: Vec<T> = (0..frames)
        .map(|t| gsi_frame(theta_ref_avg.frame(0, t), theta_dist.frame(0, t)))
        .collect::<Result<_>>()?;

    let mut subbands = Vec::with_capacity(bank.len());
    let mut traces = Vec::with_capacity(bank.len());
    for k in 0..bank.len() {
        let mut gti = Vec::with_capacity(frames);
        let mut abs_diff = Vec::with_capacity(frames);
        let mut ratio = Vec::with_capacity(frames);
        for t in 0..frames {
            let terms = gti_terms(eps_ref_avg.frame(k, t), eps_dist.frame(k, t), eps_pr.frame(k, t))?;
            let values: Vec<T> = terms.iter().map(GtiTerm::value).collect();
            gti.push(ordered_mean(&values));
            if config.traces {
                abs_diff.push(ordered_mean(&terms.iter().map(|t| t.abs_diff).collect::<Vec<_>>()));
                ratio.push(ordered_mean(&terms.iter().map(|t| t.ratio).collect::<Vec<_>>()));
            }
        }
        let gsti: Vec<T> = gti.iter().zip(&gsi).map(|(&a, &b)| gsti_frame(a, b)).collect();
        subbands.push(SubbandScore { k: k + 1, gsti: finite(pool(&gsti)?, "GSTI")?, gti: finite(pool(&gti)?, "GTI")? });
        if config.traces {
            traces.push(SubbandTrace { k: k + 1, gti: to_f64(&gti), gsti: to_f64(&gsti), abs_diff: to_f64(&abs_diff), ratio: to_f64(&ratio) });
        }
    }

    let primary_score = subbands[config.primary_subband - 1].gsti;
    let summary = |v: &LumaVideo<T>| StreamSummary {
        fps: v.fps(),
        frames: v.frame_count(),
        analysed_width: v.width(),
        analysed_height: v.height(),
    };
    Ok(GstiReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        reference: summary(ref_video),
        distorted: summary(dist),
        frames_scored: frames,
        blocks_per_frame: eps_dist.blocks(),
        primary_subband: config.primary_subband,
        primary_score,
        gsi: finite(pool(&gsi)?, "GSI")?,
        subbands,
        traces: config.traces.then(|| Traces { gsi: to_f64(&gsi), subbands: traces }),
    })
}

fn check_pair<T: Scalar>(ref_video: &LumaVideo<T>, dist: &LumaVideo<T>) -> Result<()> {
    if (ref_video.width(), ref_video.height()) != (dist.width(), dist.height()) {
        return Err(Error::DimensionMismatch(format!(
            "reference is {}x{} but distorted is {}x{}",
            ref_video.width(),
            ref_video.height(),
            dist.width(),
            dist.height()
        )));
    }
    if dist.fps() > ref_video.fps() {
        return Err(Error::InvalidFrameRate(format!(
            "distorted rate {} exceeds reference rate {}",
            dist.fps(),
            ref_video.fps()
        )));
    }
    Ok(())
}

fn finite<T: Scalar>(v: T, what: &str) -> Result<f64> {
    let v = v.to_f64_lossy();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DegenerateOutput(format!("{what} is not finite")))
    }
}

fn to_f64<T: Scalar>(values: &[T]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64_lossy()).collect()
}

/// ε field of every subband of `video`.
pub fn temporal_field<T: Scalar>(
    video: &LumaVideo<T>,
    bank: &TemporalFilterBank<T>,
    side: usize,
    noise_var: T,
) -> Result<EntropyField<T>> {
    let rows = bank
        .filters()
        .par_iter()
        .map(|f| {
            let sb = temporal_filter(video, f)?;
            entropy_rows(&sb.frames, side, noise_var)
        })
        .collect::<Result<Vec<_>>>()?;
    EntropyField::from_nested(FieldKind::Temporal, video.fps(), rows)
}

/// θ field of `video` (a single pseudo-subband).
pub fn spatial_field<T: Scalar>(video: &LumaVideo<T>, side: usize, noise_var: T) -> Result<EntropyField<T>> {
    let ms: Vec<_> = video.frames().par_iter().map(|f| spatial_ms(f).0).collect();
    let rows = entropy_rows(&ms, side, noise_var)?;
    EntropyField::from_nested(FieldKind::Spatial, video.fps(), vec![rows])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video_io::Plane;

    fn clip(n: usize, fps: u64) -> LumaVideo<f64> {
        let frames = (0..n)
            .map(|t| Plane::from_fn(20, 15, |x, y| ((x * 13 + y * 7 + t * 5) % 29) as f64 * 4.0))
            .collect();
        LumaVideo::new(frames, FrameRate::integer(fps).unwrap()).unwrap()
    }

    fn cfg() -> ScoreConfig {
        ScoreConfig { downsample: 1, traces: true, ..ScoreConfig::default() }
    }

    #[test]
    fn defaults() {
        let c = ScoreConfig::default();
        assert_eq!((c.levels, c.block_side, c.noise_var, c.downsample, c.primary_subband), (3, 5, 0.1, 16, 1));
        assert_eq!(c.subband_count(), 7);
    }

    #[test]
    fn identical_inputs_score_zero() {
        let v = clip(12, 60);
        let report = score_downsampled(&v, &v, &cfg()).unwrap();
        assert_eq!(report.subbands.len(), 7);
        assert_eq!(report.frames_scored, 5);
        assert_eq!(report.blocks_per_frame, 12);
        assert_eq!(report.primary_score, 0.0);
        let traces = report.traces.unwrap();
        assert!(traces.gsi.iter().all(|&g| g == 0.0));
        for sb in &traces.subbands {
            assert!(sb.gti.iter().all(|&g| g == 0.0));
            assert!(sb.ratio.iter().all(|&r| r == 1.0));
        }
    }

    #[test]
    fn rejects_bad_pairs() {
        let v = clip(12, 60);
        let other = LumaVideo::new(vec![Plane::filled(21, 15, 0.0); 12], FrameRate::integer(60).unwrap()).unwrap();
        assert!(matches!(score_downsampled(&v, &other, &cfg()), Err(Error::DimensionMismatch(_))));
        let fast = clip(12, 120);
        assert!(matches!(score_downsampled(&v, &fast, &cfg()), Err(Error::InvalidFrameRate(_))));
        let short = clip(7, 60);
        assert!(score_downsampled(&short, &short, &cfg()).is_err());
        let bad = ScoreConfig { primary_subband: 8, ..cfg() };
        assert!(matches!(score_downsampled(&v, &v, &bad), Err(Error::InvalidParameter(_))));
        let bad = ScoreConfig { noise_var: -1.0, ..cfg() };
        assert!(score_downsampled(&v, &v, &bad).is_err());
    }

    #[test]
    fn half_rate_pseudo_reference_needs_enough_frames() {
        let r = clip(12, 60);
        let d = temporal_downsample_drop(&r, FrameRate::integer(30).unwrap()).unwrap();
        // 6 distorted frames cannot hold an 8-tap window
        assert!(score_downsampled(&r, &d, &cfg()).is_err());
    }

    #[test]
    fn json_shape() {
        let v = clip(10, 30);
        let report = score_downsampled(&v, &v, &ScoreConfig { traces: false, ..cfg() }).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["config"]["levels"], 3);
        assert_eq!(json["reference"]["fps"], "30/1");
        assert_eq!(json["subbands"].as_array().unwrap().len(), 7);
        assert!(json.get("traces").is_none());
    }
}
