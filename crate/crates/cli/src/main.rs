use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use gsti::eval::{eval_report, psnr_video, read_records};
use gsti::histogram::subband_histogram;
use gsti::video_io::{load_video, RawGeometry};
use gsti::{score_downsampled, FrameRate, LumaVideo64, PixelFormat, ScoreConfig};

#[derive(Parser, Debug)]
#[command(name = "gsti", version, about = "Full-reference video quality across frame rates")]
struct Cli {
    /// Worker threads (0 = one per core). Output does not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Progress and diagnostics on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a distorted video against its reference.
    Score(ScoreArgs),
    /// Frame-averaged luma PSNR with frame-duplication alignment.
    Psnr(PairArgs),
    /// Correlate predicted scores with subjective ratings from a CSV file.
    Eval(EvalArgs),
    /// Histogram of one temporal subband as `bin_center,frequency` CSV.
    Hist(HistArgs),
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Reference video (.y4m, otherwise raw planar)
    #[arg(long = "ref", value_name = "PATH")]
    reference: PathBuf,

    /// Distorted video (.y4m, otherwise raw planar)
    #[arg(long, value_name = "PATH")]
    dist: PathBuf,

    /// Reference frame rate; required for raw input, overrides the Y4M header
    #[arg(long, value_name = "FPS")]
    ref_fps: Option<FrameRate>,

    /// Distorted frame rate; required for raw input, overrides the Y4M header
    #[arg(long, value_name = "FPS")]
    dist_fps: Option<FrameRate>,

    #[command(flatten)]
    geometry: Geometry,

    /// Write the result as JSON to this file
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct Geometry {
    /// Frame width of raw input
    #[arg(long)]
    width: Option<usize>,

    /// Frame height of raw input
    #[arg(long)]
    height: Option<usize>,

    /// Pixel format of raw input (yuv420p or gray8)
    #[arg(long, default_value = "yuv420p")]
    pix_fmt: PixelFormat,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    pair: PairArgs,

    /// Wavelet packet depth; gives 2^levels - 1 band-pass subbands
    #[arg(long, default_value_t = 3)]
    levels: u32,

    /// Side of the square entropy blocks
    #[arg(long = "block", default_value_t = 5)]
    block_side: usize,

    /// Variance of the additive Gaussian noise in the perception model
    #[arg(long, default_value_t = 0.1)]
    noise_var: f64,

    /// Spatial average-pooling factor applied while reading
    #[arg(long, default_value_t = 16)]
    downsample: usize,

    /// Subband reported as the primary score
    #[arg(long, default_value_t = 1)]
    subband: usize,

    /// Include per-frame traces in the JSON report
    #[arg(long)]
    traces: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// CSV with columns video_id,fps,predicted,subjective[,content_id]
    csv: PathBuf,

    /// Write the JSON report to this file
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print JSON instead of the text table
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct HistArgs {
    /// Video to analyse (.y4m, otherwise raw planar)
    input: PathBuf,

    /// Frame rate; required for raw input, overrides the Y4M header
    #[arg(long, value_name = "FPS")]
    fps: Option<FrameRate>,

    #[command(flatten)]
    geometry: Geometry,

    #[arg(long, default_value_t = 3)]
    levels: u32,

    /// Subband index, 1 ..= 2^levels - 1
    #[arg(long, default_value_t = 1)]
    subband: usize,

    /// Number of bins (odd keeps a bin centred on zero)
    #[arg(long, default_value_t = 101)]
    bins: usize,

    /// Half-width of the binned interval; defaults to the largest magnitude
    #[arg(long)]
    range: Option<f64>,

    #[arg(long, default_value_t = 1)]
    downsample: usize,

    /// Write CSV to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn is_y4m(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("y4m"))
}

fn usage_error(kind: ErrorKind, msg: String) -> ! {
    Cli::command().error(kind, msg).exit()
}

/// Raw geometry for `path`, or `None` for Y4M. Exits with a usage error when
/// raw input lacks its geometry.
fn geometry_for(path: &Path, fps: Option<FrameRate>, geometry: Geometry, fps_flag: &str) -> Option<RawGeometry> {
    if is_y4m(path) {
        return None;
    }
    let missing: Vec<&str> = [
        geometry.width.is_none().then_some("--width"),
        geometry.height.is_none().then_some("--height"),
        fps.is_none().then_some(fps_flag),
    ]
    .into_iter()
    .flatten()
    .collect();
    if !missing.is_empty() {
        usage_error(
            ErrorKind::MissingRequiredArgument,
            format!("raw input {} needs {}", path.display(), missing.join(", ")),
        );
    }
    Some(RawGeometry {
        width: geometry.width?,
        height: geometry.height?,
        fps: fps?,
        pixel_format: geometry.pix_fmt,
    })
}

fn load(path: &Path, fps: Option<FrameRate>, geometry: Option<RawGeometry>, downsample: usize, verbose: bool) -> Result<LumaVideo64> {
    let (meta, video) =
        load_video::<f64>(path, geometry, downsample).with_context(|| format!("reading {}", path.display()))?;
    if verbose {
        eprintln!(
            "{}: {}x{} {} frames at {} fps, analysed at {}x{}",
            path.display(),
            meta.width,
            meta.height,
            meta.frame_count,
            meta.fps,
            video.width(),
            video.height()
        );
    }
    Ok(match fps {
        Some(f) => video.with_fps(f),
        None => video,
    })
}

fn load_pair(pair: &PairArgs, downsample: usize, verbose: bool) -> Result<(LumaVideo64, LumaVideo64)> {
    let ref_geo = geometry_for(&pair.reference, pair.ref_fps, pair.geometry, "--ref-fps");
    let dist_geo = geometry_for(&pair.dist, pair.dist_fps, pair.geometry, "--dist-fps");
    let reference = load(&pair.reference, pair.ref_fps, ref_geo, downsample, verbose)?;
    let dist = load(&pair.dist, pair.dist_fps, dist_geo, downsample, verbose)?;
    Ok((reference, dist))
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_score(args: &ScoreArgs, verbose: bool) -> Result<()> {
    let config = ScoreConfig {
        levels: args.levels,
        block_side: args.block_side,
        noise_var: args.noise_var,
        downsample: args.downsample,
        primary_subband: args.subband,
        traces: args.traces,
    };
    if let Err(e) = config.validate() {
        usage_error(ErrorKind::ValueValidation, e.to_string());
    }
    let (reference, dist) = load_pair(&args.pair, config.downsample, verbose)?;
    let report = score_downsampled(&reference, &dist, &config)?;
    if verbose {
        eprintln!("scored {} frames, {} blocks per frame", report.frames_scored, report.blocks_per_frame);
    }
    let json = report.to_json();
    match &args.pair.out {
        Some(path) => {
            write_out(path, &json)?;
            println!("{}", report.primary_score);
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_psnr(args: &PairArgs, verbose: bool) -> Result<()> {
    let (reference, dist) = load_pair(args, 1, verbose)?;
    let db = psnr_video(&reference, &dist)?;
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&serde_json::json!({ "psnr_db": db }))?;
        write_out(path, &json)?;
    }
    println!("{db}");
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let file = std::fs::File::open(&args.csv).with_context(|| format!("opening {}", args.csv.display()))?;
    let records = match read_records(file) {
        Err(e @ gsti::Error::MalformedCsv(_)) => usage_error(ErrorKind::InvalidValue, e.to_string()),
        r => r?,
    };
    let report = eval_report(&records)?;
    let json = report.to_json();
    if let Some(path) = &args.out {
        write_out(path, &json)?;
    }
    if args.json {
        println!("{json}");
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn cmd_hist(args: &HistArgs, verbose: bool) -> Result<()> {
    let geometry = geometry_for(&args.input, args.fps, args.geometry, "--fps");
    let video = load(&args.input, args.fps, geometry, args.downsample, verbose)?;
    let hist = subband_histogram(&video, args.levels, args.subband, args.bins, args.range)?;
    let csv = hist.to_csv();
    match &args.out {
        Some(path) => write_out(path, &csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    let result = match &cli.command {
        Command::Score(args) => cmd_score(args, cli.verbose),
        Command::Psnr(args) => cmd_psnr(args, cli.verbose),
        Command::Eval(args) => cmd_eval(args),
        Command::Hist(args) => cmd_hist(args, cli.verbose),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
