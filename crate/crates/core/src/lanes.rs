//! Post-processing of the Hough accumulator: peak picking with neighborhood
//! suppression, reconstruction of peak lines as pixel segments, extraction
//! of the white runs that supported a peak, and overlay rendering.

use crate::edge::BinaryImage;
use crate::geom;
use crate::hough::HoughAccumulator;
use crate::imgio::{GrayImage, RgbImage};

/// One selected accumulator cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Peak {
    pub theta_bin: usize,
    pub rho_bin: usize,
    pub votes: u32,
}

/// Knobs for [`find_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    /// Maximum number of peaks returned.
    pub max_peaks: usize,
    /// A peak must reach this fraction of the global maximum.
    pub threshold_ratio: f64,
    /// Suppression window along theta, in bins; odd.
    pub nhood_theta: usize,
    /// Suppression window along rho, in bins; odd.
    pub nhood_rho: usize,
}

/// Smallest odd integer >= `x`, but never less than 1.
fn smallest_odd_at_least(x: f64) -> usize {
    let mut n = (x.ceil() as usize).max(1);
    if n % 2 == 0 {
        n += 1;
    }
    n
}

impl PeakParams {
    /// Defaults for an accumulator's geometry: two peaks (one per lane
    /// boundary), half-of-max threshold, and suppression windows spanning
    /// roughly 1/50th of each axis.
    pub fn for_accumulator(acc: &HoughAccumulator) -> Self {
        PeakParams {
            max_peaks: 2,
            threshold_ratio: 0.5,
            nhood_theta: smallest_odd_at_least(acc.n_theta() as f64 / 50.0),
            nhood_rho: smallest_odd_at_least(acc.n_rho() as f64 / 50.0),
        }
    }

    fn validate(&self) {
        assert!(
            self.nhood_theta % 2 == 1 && self.nhood_rho % 2 == 1,
            "suppression windows must be odd"
        );
        assert!(
            self.threshold_ratio > 0.0 && self.threshold_ratio <= 1.0,
            "threshold_ratio must be in (0, 1]"
        );
    }
}

/// A straight pixel segment attributed to the accumulator peak it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineSegment {
    pub p0: (u32, u32),
    pub p1: (u32, u32),
    pub source_peak: Peak,
}

impl LineSegment {
    /// Euclidean endpoint distance.
    pub fn length(&self) -> f64 {
        let dx = self.p1.0 as f64 - self.p0.0 as f64;
        let dy = self.p1.1 as f64 - self.p0.1 as f64;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Picks up to `params.max_peaks` accumulator maxima in descending vote
/// order.
///
/// Each accepted peak zeroes its `nhood_theta x nhood_rho` neighborhood
/// (clamped at the edges, no theta wraparound) before the next pick, and a
/// peak must carry at least `threshold_ratio` of the global maximum. Ties
/// go to the lower theta bin, then the lower rho bin. An all-zero
/// accumulator yields an empty list.
pub fn find_peaks(acc: &HoughAccumulator, params: &PeakParams) -> Vec<Peak> {
    params.validate();
    let n_theta = acc.n_theta();
    let n_rho = acc.n_rho();
    let mut work = acc.counts().to_vec();
    let global_max = match work.iter().max() {
        Some(&m) if m > 0 => m,
        _ => return Vec::new(),
    };
    let min_votes = params.threshold_ratio * global_max as f64;

    let mut peaks = Vec::new();
    while peaks.len() < params.max_peaks {
        let mut best: Option<(usize, usize, u32)> = None;
        for t in 0..n_theta {
            for r in 0..n_rho {
                let v = work[t * n_rho + r];
                if v > 0 && best.map_or(true, |(_, _, bv)| v > bv) {
                    best = Some((t, r, v));
                }
            }
        }
        let Some((theta_bin, rho_bin, votes)) = best else {
            break;
        };
        if (votes as f64) < min_votes {
            break;
        }
        peaks.push(Peak {
            theta_bin,
            rho_bin,
            votes,
        });
        let ht = params.nhood_theta / 2;
        let hr = params.nhood_rho / 2;
        let t_lo = theta_bin.saturating_sub(ht);
        let t_hi = (theta_bin + ht).min(n_theta - 1);
        let r_lo = rho_bin.saturating_sub(hr);
        let r_hi = (rho_bin + hr).min(n_rho - 1);
        for t in t_lo..=t_hi {
            for r in r_lo..=r_hi {
                work[t * n_rho + r] = 0;
            }
        }
    }
    peaks
}

fn peak_line_params(peak: &Peak, acc: &HoughAccumulator) -> (f64, f64, f64) {
    let (cos_t, sin_t) = geom::bin_cos_sin(peak.theta_bin, acc.n_theta());
    (cos_t, sin_t, acc.signed_rho(peak.rho_bin) as f64)
}

/// Clips the peak's infinite line to the accumulator's source image and
/// returns it as a pixel segment, or `None` if the line misses the image
/// entirely. Endpoints are within half a pixel of the true line.
pub fn peak_to_line(peak: &Peak, acc: &HoughAccumulator) -> Option<LineSegment> {
    let (width, height) = acc.source_dims();
    let (cos_t, sin_t, r) = peak_line_params(peak, acc);
    let path = geom::walk_polar_line(cos_t, sin_t, r, width, height);
    let (&p0, &p1) = (path.first()?, path.last()?);
    Some(LineSegment {
        p0,
        p1,
        source_peak: *peak,
    })
}

/// Walks the peak's rasterized line across `bin_img` and groups the white
/// pixels on it into segments.
///
/// Consecutive white pixels at most `fill_gap` apart (Euclidean) belong to
/// one run; runs at least `min_len` long become segments, in walk order.
/// `acc` supplies the geometry the peak indexes into and must come from an
/// image with `bin_img`'s dimensions.
pub fn extract_segments(
    bin_img: &BinaryImage,
    peak: &Peak,
    acc: &HoughAccumulator,
    fill_gap: u32,
    min_len: u32,
) -> Vec<LineSegment> {
    debug_assert_eq!(acc.source_dims(), (bin_img.width(), bin_img.height()));
    let (cos_t, sin_t, r) = peak_line_params(peak, acc);
    let path = geom::walk_polar_line(cos_t, sin_t, r, bin_img.width(), bin_img.height());

    let dist = |a: (u32, u32), b: (u32, u32)| {
        let dx = a.0 as f64 - b.0 as f64;
        let dy = a.1 as f64 - b.1 as f64;
        (dx * dx + dy * dy).sqrt()
    };

    let mut segments = Vec::new();
    let mut run: Option<((u32, u32), (u32, u32))> = None;
    let mut close_run = |run: &mut Option<((u32, u32), (u32, u32))>| {
        if let Some((start, end)) = run.take() {
            if dist(start, end) >= min_len as f64 {
                segments.push(LineSegment {
                    p0: start,
                    p1: end,
                    source_peak: *peak,
                });
            }
        }
    };

    for px in path {
        if !bin_img.is_white(px.0, px.1) {
            continue;
        }
        match run {
            Some((start, last)) if dist(last, px) <= fill_gap as f64 => {
                run = Some((start, px));
            }
            Some(_) => {
                close_run(&mut run);
                run = Some((px, px));
            }
            None => run = Some((px, px)),
        }
    }
    close_run(&mut run);
    segments
}

/// Promotes `gray` to RGB and draws each segment over it, one pixel wide.
/// Repainting the same pixel is idempotent.
pub fn render_overlay(gray: &GrayImage, segments: &[LineSegment], color: [u8; 3]) -> RgbImage {
    let mut out = RgbImage::from_gray(gray);
    for seg in segments {
        for (x, y) in geom::rasterize_segment(seg.p0, seg.p1) {
            out.put(x, y, color);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::BinaryImage;
    use crate::hough::{accumulate, HoughAccumulator, TrigMode, TrigTable, VoteStrategy};

    fn acc_with_cells(w: u32, h: u32, cells: &[(usize, usize, u32)]) -> HoughAccumulator {
        let acc = HoughAccumulator::new(w, h, 180);
        let n_rho = acc.n_rho();
        let mut counts = vec![0u32; 180 * n_rho];
        for &(t, r, v) in cells {
            counts[t * n_rho + r] = v;
        }
        HoughAccumulator::from_counts(w, h, 180, counts)
    }

    fn default_params(acc: &HoughAccumulator) -> PeakParams {
        PeakParams::for_accumulator(acc)
    }

    #[test]
    fn single_cell_is_the_single_peak() {
        let acc = acc_with_cells(64, 64, &[(90, 91 + 5, 3)]);
        let peaks = find_peaks(&acc, &default_params(&acc));
        assert_eq!(
            peaks,
            vec![Peak { theta_bin: 90, rho_bin: 96, votes: 3 }]
        );
    }

    #[test]
    fn equal_maxima_tie_breaks_on_theta() {
        let acc = acc_with_cells(64, 64, &[(120, 30, 9), (40, 30, 9)]);
        let peaks = find_peaks(&acc, &default_params(&acc));
        assert_eq!(peaks.len(), 2);
        assert_eq!(peaks[0].theta_bin, 40);
        assert_eq!(peaks[1].theta_bin, 120);
    }

    #[test]
    fn all_zero_accumulator_gives_no_peaks() {
        let acc = HoughAccumulator::new(32, 32, 180);
        assert!(find_peaks(&acc, &default_params(&acc)).is_empty());
    }

    #[test]
    fn suppression_removes_nearby_cells() {
        // Second-largest cell sits inside the first peak's neighborhood.
        let acc = acc_with_cells(64, 64, &[(90, 50, 10), (91, 51, 9), (20, 50, 8)]);
        let peaks = find_peaks(&acc, &default_params(&acc));
        assert_eq!(peaks.len(), 2);
        assert_eq!((peaks[0].theta_bin, peaks[0].rho_bin), (90, 50));
        assert_eq!((peaks[1].theta_bin, peaks[1].rho_bin), (20, 50));
    }

    #[test]
    fn threshold_ratio_filters_weak_peaks() {
        let acc = acc_with_cells(64, 64, &[(90, 50, 10), (20, 120, 4)]);
        let peaks = find_peaks(&acc, &default_params(&acc));
        assert_eq!(peaks.len(), 1);
    }

    #[test]
    fn peak_votes_are_non_increasing() {
        let acc = acc_with_cells(
            128,
            128,
            &[(10, 40, 7), (60, 200, 9), (120, 300, 8), (170, 80, 7)],
        );
        let mut params = default_params(&acc);
        params.max_peaks = 4;
        let peaks = find_peaks(&acc, &params);
        assert_eq!(peaks.len(), 4);
        for pair in peaks.windows(2) {
            assert!(pair[0].votes >= pair[1].votes);
        }
    }

    #[test]
    fn horizontal_peak_spans_the_image() {
        let acc = HoughAccumulator::new(512, 512, 180);
        let peak = Peak { theta_bin: 90, rho_bin: acc.rho_offset() + 100, votes: 1 };
        let seg = peak_to_line(&peak, &acc).unwrap();
        assert_eq!(seg.p0, (0, 100));
        assert_eq!(seg.p1, (511, 100));
    }

    #[test]
    fn vertical_peak_spans_the_image() {
        let acc = HoughAccumulator::new(512, 512, 180);
        let peak = Peak { theta_bin: 0, rho_bin: acc.rho_offset() + 100, votes: 1 };
        let seg = peak_to_line(&peak, &acc).unwrap();
        assert_eq!(seg.p0, (100, 0));
        assert_eq!(seg.p1, (100, 511));
    }

    #[test]
    fn diagonal_zero_rho_touches_origin_only() {
        let acc = HoughAccumulator::new(512, 512, 180);
        let peak = Peak { theta_bin: 45, rho_bin: acc.rho_offset(), votes: 1 };
        let seg = peak_to_line(&peak, &acc).unwrap();
        assert_eq!(seg.p0, (0, 0));
        assert_eq!(seg.p1, (0, 0));
    }

    #[test]
    fn missing_line_yields_none() {
        let acc = HoughAccumulator::new(64, 64, 180);
        // r = -40 at 45 degrees lies entirely outside the first quadrant.
        let peak = Peak { theta_bin: 45, rho_bin: acc.rho_offset() - 40, votes: 1 };
        assert!(peak_to_line(&peak, &acc).is_none());
    }

    fn white_row_image(w: u32, h: u32, y: u32, gaps: &[std::ops::Range<u32>]) -> BinaryImage {
        let mut data = vec![0u8; (w * h) as usize];
        for x in 0..w {
            if gaps.iter().any(|g| g.contains(&x)) {
                continue;
            }
            data[(y * w + x) as usize] = 255;
        }
        BinaryImage::new(w, h, data).unwrap()
    }

    fn row_peak(acc: &HoughAccumulator, y: u32) -> Peak {
        Peak { theta_bin: 90, rho_bin: acc.rho_offset() + y as usize, votes: 1 }
    }

    #[test]
    fn full_row_becomes_one_segment() {
        let img = white_row_image(100, 100, 5, &[]);
        let acc = HoughAccumulator::new(100, 100, 180);
        let segs = extract_segments(&img, &row_peak(&acc, 5), &acc, 20, 40);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].p0, segs[0].p1), ((0, 5), (99, 5)));
    }

    #[test]
    fn small_gap_is_bridged() {
        let img = white_row_image(100, 100, 5, &[40..50]);
        let acc = HoughAccumulator::new(100, 100, 180);
        let segs = extract_segments(&img, &row_peak(&acc, 5), &acc, 20, 40);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].p0, segs[0].p1), ((0, 5), (99, 5)));
    }

    #[test]
    fn wide_gap_splits_runs() {
        let img = white_row_image(100, 100, 5, &[40..70]);
        let acc = HoughAccumulator::new(100, 100, 180);
        let segs = extract_segments(&img, &row_peak(&acc, 5), &acc, 20, 10);
        assert_eq!(segs.len(), 2);
        assert_eq!((segs[0].p0, segs[0].p1), ((0, 5), (39, 5)));
        assert_eq!((segs[1].p0, segs[1].p1), ((70, 5), (99, 5)));
    }

    #[test]
    fn short_runs_are_dropped() {
        let mut data = vec![0u8; 100 * 100];
        for x in 20..30 {
            data[5 * 100 + x] = 255;
        }
        let img = BinaryImage::new(100, 100, data).unwrap();
        let acc = HoughAccumulator::new(100, 100, 180);
        assert!(extract_segments(&img, &row_peak(&acc, 5), &acc, 20, 40).is_empty());
    }

    #[test]
    fn segments_lie_on_their_peak_line() {
        // Vote a real diagonal and check extracted pixels against the line.
        let mut data = vec![0u8; 64 * 64];
        for i in 0..64u32 {
            data[(i * 64 + i) as usize] = 255;
        }
        let img = BinaryImage::new(64, 64, data).unwrap();
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let acc = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
        let peaks = find_peaks(&acc, &PeakParams::for_accumulator(&acc));
        assert!(!peaks.is_empty());
        let peak = peaks[0];
        let (c, s) = geom::bin_cos_sin(peak.theta_bin, 180);
        let r = acc.signed_rho(peak.rho_bin) as f64;
        for seg in extract_segments(&img, &peak, &acc, 20, 10) {
            for p in [seg.p0, seg.p1] {
                let d = (p.0 as f64 * c + p.1 as f64 * s - r).abs();
                assert!(d <= 0.5 + 1e-9, "endpoint {p:?} is {d} from the line");
            }
        }
    }

    #[test]
    fn overlay_without_segments_is_promoted_gray() {
        let gray = GrayImage::from_fn(8, 4, |x, y| (x * 20 + y) as u8);
        let rgb = render_overlay(&gray, &[], [255, 0, 0]);
        for y in 0..4 {
            for x in 0..8 {
                let v = gray.get(x, y);
                assert_eq!(rgb.get(x, y), [v, v, v]);
            }
        }
    }

    #[test]
    fn overlay_paints_exactly_the_segment() {
        let gray = GrayImage::filled(12, 12, 0);
        let peak = Peak { theta_bin: 90, rho_bin: 0, votes: 1 };
        let seg = LineSegment { p0: (0, 5), p1: (9, 5), source_peak: peak };
        let rgb = render_overlay(&gray, &[seg], [0, 255, 0]);
        let mut painted = 0;
        for y in 0..12 {
            for x in 0..12 {
                if rgb.get(x, y) == [0, 255, 0] {
                    painted += 1;
                    assert_eq!(y, 5);
                    assert!(x <= 9);
                }
            }
        }
        assert_eq!(painted, 10);
    }

    #[test]
    fn overlapping_segments_paint_idempotently() {
        let gray = GrayImage::filled(12, 12, 7);
        let peak = Peak { theta_bin: 90, rho_bin: 0, votes: 1 };
        let a = LineSegment { p0: (0, 5), p1: (9, 5), source_peak: peak };
        let b = LineSegment { p0: (3, 5), p1: (7, 5), source_peak: peak };
        let once = render_overlay(&gray, &[a], [9, 9, 9]);
        let twice = render_overlay(&gray, &[a, b], [9, 9, 9]);
        assert_eq!(once.data(), twice.data());
    }

    #[test]
    fn default_nhood_sizes_are_odd_and_scaled() {
        let acc = HoughAccumulator::new(512, 512, 180);
        let params = PeakParams::for_accumulator(&acc);
        // n_theta/50 = 3.6 -> 5; n_rho/50 = 1451/50 = 29.02 -> 31.
        assert_eq!(params.nhood_theta, 5);
        assert_eq!(params.nhood_rho, 31);
    }

    #[test]
    fn separated_peaks_really_are_separated() {
        let acc = acc_with_cells(
            256,
            256,
            &[(80, 300, 20), (82, 305, 19), (84, 310, 18), (150, 100, 15)],
        );
        let mut params = default_params(&acc);
        params.max_peaks = 4;
        params.threshold_ratio = 0.1;
        let peaks = find_peaks(&acc, &params);
        for (i, a) in peaks.iter().enumerate() {
            for b in &peaks[i + 1..] {
                let dt = a.theta_bin.abs_diff(b.theta_bin);
                let dr = a.rho_bin.abs_diff(b.rho_bin);
                assert!(
                    dt > params.nhood_theta / 2 || dr > params.nhood_rho / 2,
                    "peaks {a:?} and {b:?} are within one suppression window"
                );
            }
        }
    }
}
