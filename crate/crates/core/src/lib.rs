//! Full-reference video quality assessment by entropic differencing of
//! generalized Gaussian models fit to temporal and spatial band-pass
//! coefficients. Reference and distorted videos may differ in frame rate.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.
//!
//! ```
//! use gsti::{FrameRate, LumaVideo64, Plane, ScoreConfig, score_downsampled};
//!
//! let fps = FrameRate::integer(60).unwrap();
//! let frames = (0..16)
//!     .map(|t| Plane::from_fn(10, 10, |x, y| ((x + 2 * y + t) % 7) as f64 * 30.0))
//!     .collect();
//! let video = LumaVideo64::new(frames, fps).unwrap();
//! let config = ScoreConfig { downsample: 1, ..ScoreConfig::default() };
//! let report = score_downsampled(&video, &video, &config).unwrap();
//! assert_eq!(report.primary_score, 0.0);
//! ```

pub mod bandpass;
pub mod error;
pub mod eval;
pub mod ggd_stats;
pub mod histogram;
pub mod indices;
pub mod pipeline;
pub mod scalar;
pub mod video_io;

pub use bandpass::{build_haar_packet, spatial_ms, temporal_filter, MsFrame, SubbandVideo, TemporalFilterBank};
pub use error::{Error, Result};
pub use ggd_stats::{
    ggd_alpha, ggd_entropy, ggd_kurtosis, invert_kurtosis, latent_block_params, scaled_entropy, GgdParams,
    ScaledEntropy,
};
pub use indices::{average_reference_entropies, gsi_frame, gsti_frame, gti_frame, partition_blocks, pool, EntropyField};
pub use pipeline::{score_downsampled, score_pipeline, GstiReport, ScoreConfig};
pub use scalar::Scalar;
pub use video_io::{FrameRate, LumaVideo, PixelFormat, Plane, VideoMeta};

pub type LumaVideo64 = LumaVideo<f64>;
pub type LumaVideo32 = LumaVideo<f32>;
pub type Plane64 = Plane<f64>;
pub type Plane32 = Plane<f32>;
pub type GgdParams64 = GgdParams<f64>;
pub type GgdParams32 = GgdParams<f32>;
pub type EntropyField64 = EntropyField<f64>;
pub type EntropyField32 = EntropyField<f32>;
