//! `lanehough` — detect lane lines in road images, dump pipeline artifacts,
//! and benchmark the voting strategies.
//!
//! Exit codes: 0 on success, 1 on I/O or file-format failures, 2 on bad
//! flags or arguments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lanehough::hough::TrigMode;
use lanehough::VoteStrategy;

#[derive(Parser)]
#[command(name = "lanehough", version, about = "Lane detection via Sobel + Hough voting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect lane lines in an image; writes an overlay PNG and peak/segment CSVs
    Detect(DetectArgs),
    /// Run the size/strategy scaling study and write a CSV of measurements
    Bench(BenchArgs),
    /// Run the pipeline through voting only and write the accumulator (HACC1)
    DumpAcc(DumpAccArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    Reference,
    Symmetric,
    AnglePartitioned,
    Atomic,
}

impl StrategyName {
    fn build(self, workers: usize, block: u32) -> VoteStrategy {
        match self {
            StrategyName::Reference => VoteStrategy::Reference,
            StrategyName::Symmetric => VoteStrategy::SymmetricHalfAngle,
            StrategyName::AnglePartitioned => VoteStrategy::AnglePartitioned { workers },
            StrategyName::Atomic => VoteStrategy::PixelParallelAtomic { workers, block },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrigArg {
    Float,
    Q15,
}

impl From<TrigArg> for TrigMode {
    fn from(arg: TrigArg) -> TrigMode {
        match arg {
            TrigArg::Float => TrigMode::Float64,
            TrigArg::Q15 => TrigMode::Q15,
        }
    }
}

/// `WxH` image size, e.g. `512x512`.
#[derive(Clone, Copy, Debug)]
struct SizeArg {
    width: u32,
    height: u32,
}

impl std::str::FromStr for SizeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
        let parse = |v: &str| -> Result<u32, String> {
            let n: u32 = v.parse().map_err(|_| format!("bad dimension {v:?} in {s:?}"))?;
            if n == 0 {
                return Err(format!("dimensions must be nonzero in {s:?}"));
            }
            Ok(n)
        };
        Ok(SizeArg {
            width: parse(w)?,
            height: parse(h)?,
        })
    }
}

impl std::fmt::Display for SizeArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

fn parse_positive_usize(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("not an integer: {s:?}"))?;
    if v == 0 {
        return Err("value must be at least 1".into());
    }
    Ok(v)
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("ratio must be in (0, 1]".into())
    }
}

fn parse_odd(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("not an integer: {s:?}"))?;
    if v % 2 == 1 {
        Ok(v)
    } else {
        Err("window size must be odd".into())
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Input image: binary PGM (P5) or 8-bit PNG
    input: PathBuf,

    /// Overlay PNG path [default: <input stem>_overlay.png]
    #[arg(long, short = 'o')]
    overlay: Option<PathBuf>,
    /// Peaks CSV path [default: <input stem>_peaks.csv]
    #[arg(long)]
    peaks_csv: Option<PathBuf>,
    /// Segments CSV path [default: <input stem>_segments.csv]
    #[arg(long)]
    segments_csv: Option<PathBuf>,

    /// Binarization threshold on the gradient magnitude
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u16).range(0..=256))]
    threshold: u16,
    /// Voting strategy
    #[arg(long, value_enum, default_value_t = StrategyName::Reference)]
    strategy: StrategyName,
    /// Worker threads for the parallel strategies
    #[arg(long, default_value_t = 1, value_parser = parse_positive_usize)]
    workers: usize,
    /// Trig table mode
    #[arg(long, value_enum, default_value_t = TrigArg::Float)]
    trig: TrigArg,
    /// Tile edge for the atomic strategy's pixel partitioning
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    block: u32,

    /// Maximum number of peaks (lane lines) to extract
    #[arg(long, default_value_t = 2)]
    max_peaks: usize,
    /// Fraction of the strongest peak a peak must reach
    #[arg(long, default_value_t = 0.5, value_parser = parse_ratio)]
    peak_ratio: f64,
    /// Suppression window in theta bins, odd [default: scaled to the accumulator]
    #[arg(long, value_parser = parse_odd)]
    nhood_theta: Option<usize>,
    /// Suppression window in rho bins, odd [default: scaled to the accumulator]
    #[arg(long, value_parser = parse_odd)]
    nhood_rho: Option<usize>,
    /// Largest gap (pixels) bridged within one segment
    #[arg(long, default_value_t = 20)]
    fill_gap: u32,
    /// Shortest segment (pixels) worth keeping
    #[arg(long, default_value_t = 40)]
    min_len: u32,

    /// Also write the gradient-magnitude image (PGM)
    #[arg(long)]
    dump_edge: Option<PathBuf>,
    /// Also write the binarized image (PGM)
    #[arg(long)]
    dump_binary: Option<PathBuf>,
    /// Also write the accumulator (HACC1)
    #[arg(long)]
    dump_acc: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Image sizes to sweep, comma separated WxH
    #[arg(long, value_delimiter = ',', default_values_t = [
        SizeArg { width: 128, height: 128 },
        SizeArg { width: 256, height: 256 },
        SizeArg { width: 512, height: 512 },
        SizeArg { width: 1024, height: 1024 },
    ])]
    sizes: Vec<SizeArg>,
    /// Strategies to sweep, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [
        StrategyName::Reference,
        StrategyName::Symmetric,
        StrategyName::AnglePartitioned,
        StrategyName::Atomic,
    ])]
    strategies: Vec<StrategyName>,
    /// Timed runs per combination (one warm-up run is added)
    #[arg(long, default_value_t = 3, value_parser = parse_positive_usize)]
    repeats: usize,
    /// Seed for the synthetic scenes
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(long, default_value = "scaling.csv")]
    csv: PathBuf,
    /// Worker threads for the parallel strategies
    #[arg(long, default_value_t = 4, value_parser = parse_positive_usize)]
    workers: usize,
    /// Tile edge for the atomic strategy
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    block: u32,
    /// Trig table mode
    #[arg(long, value_enum, default_value_t = TrigArg::Float)]
    trig: TrigArg,
    /// Binarization threshold
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u16).range(0..=256))]
    threshold: u16,
}

#[derive(Args)]
struct DumpAccArgs {
    /// Input image: binary PGM (P5) or 8-bit PNG
    input: PathBuf,
    /// Accumulator output path [default: <input stem>.hacc1]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Binarization threshold
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u16).range(0..=256))]
    threshold: u16,
    /// Voting strategy
    #[arg(long, value_enum, default_value_t = StrategyName::Reference)]
    strategy: StrategyName,
    /// Worker threads for the parallel strategies
    #[arg(long, default_value_t = 1, value_parser = parse_positive_usize)]
    workers: usize,
    /// Trig table mode
    #[arg(long, value_enum, default_value_t = TrigArg::Float)]
    trig: TrigArg,
    /// Tile edge for the atomic strategy
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    block: u32,
}

fn exit_code_for(err: &lanehough::Error) -> u8 {
    match err {
        lanehough::Error::Io { .. } | lanehough::Error::Format { .. } => 1,
        lanehough::Error::InvalidParameter(_)
        | lanehough::Error::DimensionMismatch(_)
        | lanehough::Error::Usage(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => commands::run_detect(args),
        Command::Bench(args) => commands::run_bench(args),
        Command::DumpAcc(args) => commands::run_dump_acc(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("lanehough: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
