use thiserror::Error;

/// Errors produced by the metric, its video readers and the evaluation tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed Y4M header: {0}")]
    MalformedHeader(String),

    #[error("unsupported colorspace `{0}` (only 8-bit 4:2:0 and mono are accepted)")]
    UnsupportedColorspace(String),

    #[error("truncated frame payload: {0}")]
    TruncatedFrame(String),

    #[error("file size {size} is not a multiple of the {frame_bytes}-byte frame size")]
    SizeMismatch { size: u64, frame_bytes: u64 },

    #[error("invalid frame rate: {0}")]
    InvalidFrameRate(String),

    #[error("degenerate output: {0}")]
    DegenerateOutput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too few frames: need at least {needed}, got {got}")]
    TooFewFrames { needed: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("block count mismatch: {0} vs {1}")]
    BlockCountMismatch(usize, usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("zero variance in {0}; correlation is undefined")]
    ZeroVariance(&'static str),

    #[error("degenerate spread: {0}")]
    DegenerateSpread(&'static str),

    #[error("NaN input")]
    NotANumber,

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
