use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lanehough::bench::{scaling_study, StudyConfig};
use lanehough::hough::{accumulate, dump_accumulator, HoughAccumulator, TrigTable};
use lanehough::lanes::LineSegment;
use lanehough::{
    binarize, extract_segments, find_peaks, load_gray, peak_to_line, render_overlay, save_image,
    sobel_magnitude, Error, Peak, PeakParams, Result, SaveFormat,
};

use crate::{BenchArgs, DetectArgs, DumpAccArgs};

const N_THETA: usize = 180;
const LANE_COLOR: [u8; 3] = [255, 0, 0];

/// `<input stem><suffix>` in the current directory.
fn derived_path(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    PathBuf::from(format!("{stem}{suffix}"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn peaks_csv(peaks: &[Peak], acc: &HoughAccumulator) -> String {
    let mut out = String::from("theta_deg,rho,votes\n");
    for p in peaks {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.theta_bin,
            acc.signed_rho(p.rho_bin),
            p.votes
        );
    }
    out
}

fn segments_csv(segments: &[LineSegment], acc: &HoughAccumulator) -> String {
    let mut out = String::from("x0,y0,x1,y1,theta_deg,rho\n");
    for s in segments {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.p0.0,
            s.p0.1,
            s.p1.0,
            s.p1.1,
            s.source_peak.theta_bin,
            acc.signed_rho(s.source_peak.rho_bin)
        );
    }
    out
}

pub fn run_detect(args: DetectArgs) -> Result<()> {
    let gray = load_gray(&args.input)?;
    let edges = sobel_magnitude(&gray);
    if let Some(path) = &args.dump_edge {
        save_image(&edges.to_gray(), path, SaveFormat::Pgm)?;
    }
    let bin = binarize(&edges, args.threshold);
    if let Some(path) = &args.dump_binary {
        save_image(&bin.to_gray(), path, SaveFormat::Pgm)?;
    }

    let table = TrigTable::build(N_THETA, args.trig.into())?;
    let strategy = args.strategy.build(args.workers, args.block);
    let acc = accumulate(&bin, &table, strategy)?;
    if let Some(path) = &args.dump_acc {
        dump_accumulator(&acc, path)?;
    }

    let mut params = PeakParams::for_accumulator(&acc);
    params.max_peaks = args.max_peaks;
    params.threshold_ratio = args.peak_ratio;
    if let Some(n) = args.nhood_theta {
        params.nhood_theta = n;
    }
    if let Some(n) = args.nhood_rho {
        params.nhood_rho = n;
    }
    let peaks = find_peaks(&acc, &params);

    let mut segments = Vec::new();
    for peak in &peaks {
        segments.extend(extract_segments(&bin, peak, &acc, args.fill_gap, args.min_len));
    }
    // Lines whose supporting pixels were too sparse for a segment still get
    // drawn full-span so the overlay always shows what was detected.
    let drawn: Vec<LineSegment> = if segments.is_empty() {
        peaks.iter().filter_map(|p| peak_to_line(p, &acc)).collect()
    } else {
        segments.clone()
    };

    let peaks_path = args
        .peaks_csv
        .unwrap_or_else(|| derived_path(&args.input, "_peaks.csv"));
    write_text(&peaks_path, &peaks_csv(&peaks, &acc))?;

    let segments_path = args
        .segments_csv
        .unwrap_or_else(|| derived_path(&args.input, "_segments.csv"));
    write_text(&segments_path, &segments_csv(&segments, &acc))?;

    let overlay_path = args
        .overlay
        .unwrap_or_else(|| derived_path(&args.input, "_overlay.png"));
    let overlay = render_overlay(&gray, &drawn, LANE_COLOR);
    save_image(&overlay, &overlay_path, SaveFormat::Png)?;

    println!(
        "{} peaks, {} segments; overlay {}, peaks {}, segments {}",
        peaks.len(),
        segments.len(),
        overlay_path.display(),
        peaks_path.display(),
        segments_path.display()
    );
    Ok(())
}

pub fn run_bench(args: BenchArgs) -> Result<()> {
    let config = StudyConfig {
        sizes: args.sizes.iter().map(|s| (s.width, s.height)).collect(),
        strategies: args
            .strategies
            .iter()
            .map(|s| s.build(args.workers, args.block))
            .collect(),
        repeats: args.repeats,
        seed: args.seed,
        threshold: args.threshold,
        trig_mode: args.trig.into(),
    };
    let rows = scaling_study(&config, &args.csv)?;
    for row in &rows {
        println!(
            "{:>10} {:<17} median {:>12.1} us  whites {:>8}",
            format!("{}x{}", row.width, row.height),
            row.strategy.name(),
            row.median_us,
            row.white_pixels
        );
    }
    println!("{} rows written to {}", rows.len(), args.csv.display());
    Ok(())
}

pub fn run_dump_acc(args: DumpAccArgs) -> Result<()> {
    let gray = load_gray(&args.input)?;
    let bin = binarize(&sobel_magnitude(&gray), args.threshold);
    let table = TrigTable::build(N_THETA, args.trig.into())?;
    let acc = accumulate(&bin, &table, args.strategy.build(args.workers, args.block))?;
    let out = args
        .out
        .unwrap_or_else(|| derived_path(&args.input, ".hacc1"));
    dump_accumulator(&acc, &out)?;
    println!(
        "accumulator {}x{} ({} votes) written to {}",
        acc.n_theta(),
        acc.n_rho(),
        acc.total_votes(),
        out.display()
    );
    Ok(())
}
