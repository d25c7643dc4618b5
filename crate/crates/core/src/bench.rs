//! Latency and memory measurement for the edge-to-accumulator span.
//!
//! Latency covers exactly the stretch from the start of Sobel filtering to
//! the completion of accumulator voting: image loading, trig-table
//! construction, and peak post-processing sit outside the timed span, so
//! numbers are comparable in kind across strategies and sizes. Timing never
//! changes results: the accumulator from a timed run is bit-identical to an
//! untimed one.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::edge::{binarize, sobel_magnitude};
use crate::error::{Error, Result};
use crate::hough::{accumulate, rho_max, HoughAccumulator, TrigMode, TrigTable, VoteStrategy};
use crate::imgio::GrayImage;
use crate::synth::lane_scene;

/// Wall-clock samples for one image/strategy combination.
#[derive(Debug, Clone)]
pub struct LatencyReport {
    pub strategy: VoteStrategy,
    pub width: u32,
    pub height: u32,
    pub repeats: usize,
    /// One duration per timed run, in microseconds.
    pub samples_us: Vec<f64>,
    pub median_us: f64,
    pub min_us: f64,
    pub max_us: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Runs Sobel -> binarize -> accumulate `repeats` times on a monotonic
/// clock, after one untimed warm-up, and returns the samples together with
/// the accumulator of the final run.
pub fn time_pipeline(
    img: &GrayImage,
    threshold: u16,
    strategy: VoteStrategy,
    table: &TrigTable,
    repeats: usize,
) -> Result<(LatencyReport, HoughAccumulator)> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let run = || -> Result<HoughAccumulator> {
        let edges = sobel_magnitude(img);
        let bin = binarize(&edges, threshold);
        accumulate(&bin, table, strategy)
    };
    let mut acc = run()?; // warm-up, untimed
    let mut samples_us = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        acc = run()?;
        samples_us.push(start.elapsed().as_secs_f64() * 1e6);
    }
    let mut sorted = samples_us.clone();
    sorted.sort_by(f64::total_cmp);
    let report = LatencyReport {
        strategy,
        width: img.width(),
        height: img.height(),
        repeats,
        median_us: median(&sorted),
        min_us: sorted[0],
        max_us: sorted[sorted.len() - 1],
        samples_us,
    };
    Ok((report, acc))
}

/// Closed-form buffer sizes for one pipeline configuration.
///
/// `accumulator_bytes` is `n_theta * (2 * ceil(sqrt(w^2 + h^2)) + 1) *
/// counter_bytes`; `pipeline_bytes` adds every other stage buffer the
/// software pipeline materializes: the input gray plane, the zero-padded
/// plane, two 4-byte signed gradient planes, the magnitude plane, and the
/// binary plane.
///
/// These model *this* software pipeline. Published figures from hardware
/// accelerators of the same algorithm (for example 2.88 MB of FPGA block
/// RAM or 6.5 MB of GPU shared memory for 512x512 input) are measurements
/// of device-specific storage and are not targets for, or comparable to,
/// the byte counts reported here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryReport {
    pub width: u32,
    pub height: u32,
    pub n_theta: usize,
    /// Bytes per accumulator cell.
    pub counter_bytes: u64,
    pub accumulator_bytes: u64,
    pub pipeline_bytes: u64,
}

/// Computes a [`MemoryReport`] without allocating any of the buffers.
pub fn memory_footprint(
    width: u32,
    height: u32,
    n_theta: usize,
    counter_bytes: u64,
) -> Result<MemoryReport> {
    if width == 0 || height == 0 || n_theta == 0 || counter_bytes == 0 {
        return Err(Error::InvalidParameter(
            "memory_footprint arguments must all be at least 1".into(),
        ));
    }
    let n_rho = 2 * rho_max(width, height) as u64 + 1;
    let accumulator_bytes = (n_theta as u64)
        .checked_mul(n_rho)
        .and_then(|cells| cells.checked_mul(counter_bytes))
        .ok_or_else(|| Error::InvalidParameter("accumulator byte count overflows".into()))?;
    let (w, h) = (width as u64, height as u64);
    let plane = w.checked_mul(h)
        .ok_or_else(|| Error::InvalidParameter("plane byte count overflows".into()))?;
    let padded = (w + 2)
        .checked_mul(h + 2)
        .ok_or_else(|| Error::InvalidParameter("padded plane byte count overflows".into()))?;
    // gray + padded + gx(i32) + gy(i32) + magnitude + binary + accumulator
    let pipeline_bytes = [plane, padded, 4 * plane, 4 * plane, plane, plane, accumulator_bytes]
        .iter()
        .try_fold(0u64, |acc, &b| acc.checked_add(b))
        .ok_or_else(|| Error::InvalidParameter("pipeline byte count overflows".into()))?;
    Ok(MemoryReport {
        width,
        height,
        n_theta,
        counter_bytes,
        accumulator_bytes,
        pipeline_bytes,
    })
}

/// Configuration for [`scaling_study`].
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub sizes: Vec<(u32, u32)>,
    pub strategies: Vec<VoteStrategy>,
    pub repeats: usize,
    pub seed: u64,
    pub threshold: u16,
    pub trig_mode: TrigMode,
}

impl Default for StudyConfig {
    /// The built-in ladder: square sizes from 128 to 1024 across all four
    /// strategies (parallel ones at 4 workers).
    fn default() -> Self {
        StudyConfig {
            sizes: vec![(128, 128), (256, 256), (512, 512), (1024, 1024)],
            strategies: vec![
                VoteStrategy::Reference,
                VoteStrategy::SymmetricHalfAngle,
                VoteStrategy::AnglePartitioned { workers: 4 },
                VoteStrategy::PixelParallelAtomic { workers: 4, block: 16 },
            ],
            repeats: 3,
            seed: 42,
            threshold: 128,
            trig_mode: TrigMode::Float64,
        }
    }
}

/// Angle bins used by the study (1 degree resolution).
pub const STUDY_N_THETA: usize = 180;

/// Column layout of the study CSV.
pub const SCALING_CSV_HEADER: &str = "width,height,strategy,workers,trig_mode,median_us,min_us,max_us,accumulator_bytes,pipeline_bytes,white_pixels";

/// One CSV row of [`scaling_study`] output.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub width: u32,
    pub height: u32,
    pub strategy: VoteStrategy,
    pub trig_mode: TrigMode,
    pub median_us: f64,
    pub min_us: f64,
    pub max_us: f64,
    pub accumulator_bytes: u64,
    pub pipeline_bytes: u64,
    pub white_pixels: u64,
}

impl StudyRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{:.3},{:.3},{},{},{}",
            self.width,
            self.height,
            self.strategy.name(),
            self.strategy.workers(),
            self.trig_mode.name(),
            self.median_us,
            self.min_us,
            self.max_us,
            self.accumulator_bytes,
            self.pipeline_bytes,
            self.white_pixels
        )
    }
}

/// Times every size x strategy combination on seeded synthetic lane scenes
/// and writes one CSV row each to `out`.
///
/// The scene generator is seeded, so rerunning with the same configuration
/// reproduces every column except the timing ones.
pub fn scaling_study(config: &StudyConfig, out: impl AsRef<Path>) -> Result<Vec<StudyRow>> {
    if config.sizes.is_empty() || config.strategies.is_empty() {
        return Err(Error::InvalidParameter(
            "scaling study needs at least one size and one strategy".into(),
        ));
    }
    let out = out.as_ref();
    let table = TrigTable::build(STUDY_N_THETA, config.trig_mode)?;
    let mut rows = Vec::new();
    for &(width, height) in &config.sizes {
        let scene = lane_scene(width, height, config.seed);
        let memory = memory_footprint(width, height, STUDY_N_THETA, 4)?;
        for &strategy in &config.strategies {
            let (latency, acc) =
                time_pipeline(&scene.image, config.threshold, strategy, &table, config.repeats)?;
            rows.push(StudyRow {
                width,
                height,
                strategy,
                trig_mode: config.trig_mode,
                median_us: latency.median_us,
                min_us: latency.min_us,
                max_us: latency.max_us,
                accumulator_bytes: memory.accumulator_bytes,
                pipeline_bytes: memory.pipeline_bytes,
                white_pixels: acc.total_votes() / STUDY_N_THETA as u64,
            });
        }
    }
    let mut csv = String::from(SCALING_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        let _ = writeln!(csv, "{}", row.csv_line());
    }
    std::fs::write(out, csv).map_err(|e| Error::io(out, e))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_scene() -> GrayImage {
        lane_scene(48, 48, 11).image
    }

    #[test]
    fn latency_report_orders_statistics() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let (report, _) =
            time_pipeline(&small_scene(), 128, VoteStrategy::Reference, &table, 5).unwrap();
        assert_eq!(report.samples_us.len(), 5);
        assert!(report.min_us <= report.median_us);
        assert!(report.median_us <= report.max_us);
        assert!(report.min_us > 0.0);
    }

    #[test]
    fn timing_does_not_change_the_accumulator() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = small_scene();
        let (_, once) = time_pipeline(&img, 128, VoteStrategy::Reference, &table, 1).unwrap();
        let (_, nine) = time_pipeline(&img, 128, VoteStrategy::Reference, &table, 9).unwrap();
        assert_eq!(once, nine);
        let direct = accumulate(
            &binarize(&sobel_magnitude(&img), 128),
            &table,
            VoteStrategy::Reference,
        )
        .unwrap();
        assert_eq!(once, direct);
    }

    #[test]
    fn zero_repeats_is_rejected() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        assert!(time_pipeline(&small_scene(), 128, VoteStrategy::Reference, &table, 0).is_err());
    }

    #[test]
    fn memory_formula_matches_hand_computation() {
        // rho_max(512, 512) = ceil(724.077) = 725 -> n_rho = 1451.
        let report = memory_footprint(512, 512, 180, 4).unwrap();
        assert_eq!(report.accumulator_bytes, 180 * 1451 * 4);
        assert_eq!(report.accumulator_bytes, 1_044_720);
        // Single pixel: rho_max = ceil(sqrt(2)) = 2 -> n_rho = 5.
        let tiny = memory_footprint(1, 1, 180, 4).unwrap();
        assert_eq!(tiny.accumulator_bytes, 3600);
    }

    #[test]
    fn memory_footprint_validates_arguments() {
        assert!(memory_footprint(512, 512, 180, 0).is_err());
        assert!(memory_footprint(0, 512, 180, 4).is_err());
        assert!(memory_footprint(512, 512, 0, 4).is_err());
    }

    #[test]
    fn pipeline_bytes_counts_every_stage_buffer() {
        let r = memory_footprint(10, 20, 180, 4).unwrap();
        let plane = 10u64 * 20;
        let padded = 12u64 * 22;
        assert_eq!(
            r.pipeline_bytes,
            plane + padded + 4 * plane + 4 * plane + plane + plane + r.accumulator_bytes
        );
    }

    #[test]
    fn study_emits_one_row_per_combination() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("rows.csv");
        let config = StudyConfig {
            sizes: vec![(32, 32), (64, 64)],
            strategies: vec![VoteStrategy::Reference],
            repeats: 1,
            seed: 9,
            threshold: 128,
            trig_mode: TrigMode::Float64,
        };
        let rows = scaling_study(&config, &csv).unwrap();
        assert_eq!(rows.len(), 2);
        let text = std::fs::read_to_string(&csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SCALING_CSV_HEADER));
        assert_eq!(lines.count(), 2);
        // Accumulator bytes grow with the diagonal.
        assert!(rows[1].accumulator_bytes > rows[0].accumulator_bytes);
    }

    #[test]
    fn study_non_timing_columns_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let config = StudyConfig {
            sizes: vec![(48, 48)],
            strategies: vec![
                VoteStrategy::Reference,
                VoteStrategy::PixelParallelAtomic { workers: 2, block: 16 },
            ],
            repeats: 1,
            seed: 3,
            threshold: 128,
            trig_mode: TrigMode::Float64,
        };
        let strip_timing = |row: &StudyRow| {
            (
                row.width,
                row.height,
                row.strategy.name(),
                row.accumulator_bytes,
                row.pipeline_bytes,
                row.white_pixels,
            )
        };
        let a = scaling_study(&config, dir.path().join("a.csv")).unwrap();
        let b = scaling_study(&config, dir.path().join("b.csv")).unwrap();
        let a: Vec<_> = a.iter().map(strip_timing).collect();
        let b: Vec<_> = b.iter().map(strip_timing).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_study_config_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = StudyConfig::default();
        config.sizes.clear();
        assert!(scaling_study(&config, dir.path().join("x.csv")).is_err());
    }
}
