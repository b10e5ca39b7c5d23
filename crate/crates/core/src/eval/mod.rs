//! Agreement between predicted quality scores and subjective opinion scores,
//! plus the PSNR baseline.

mod correlation;
mod dataset;
mod logistic;
mod psnr;

pub use correlation::{krocc, plcc, rank_average, rmse, srocc};
pub use dataset::{eval_report, read_records, EvalRecord, EvalReport, MetricRow};
pub use logistic::{logistic_fit, logistic_map, LogisticFit};
pub use psnr::{psnr_frame, psnr_video, PSNR_CAP_DB};
