//! Polar Hough transform: trig tables, the vote accumulator, work tiling,
//! and the `HACC1` on-disk accumulator format.
//!
//! A line is parameterized as `r = x*cos(theta) + y*sin(theta)` with theta
//! quantized to `n_theta` bins over [0°, 180°) and r quantized to 1-pixel
//! bins over [-rho_max, rho_max], where `rho_max = ceil(sqrt(w^2 + h^2))`.
//! That range makes every in-image vote land inside the accumulator.

mod vote;

pub use vote::{accumulate, accumulate_with_stats, VoteStats, VoteStrategy};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Numeric mode for the trig lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigMode {
    /// Full f64 precision.
    Float64,
    /// Entries quantized to Q1.15 signed fixed point (value = raw / 32768),
    /// emulating a hardware lookup table. Arithmetic on the entries stays
    /// exact, so the quantization is the only difference from `Float64`.
    Q15,
}

impl TrigMode {
    pub fn name(&self) -> &'static str {
        match self {
            TrigMode::Float64 => "float",
            TrigMode::Q15 => "q15",
        }
    }
}

/// Precomputed cos/sin per angle bin.
///
/// Bin `k` stands for `theta = k * (180 / n_theta)` degrees. Entries above
/// `n_theta / 2` are derived from their mirror bin via
/// `sin(180 - t) = sin(t)` and `cos(180 - t) = -cos(t)`, so those identities
/// hold bit-exactly in both modes.
#[derive(Debug, Clone)]
pub struct TrigTable {
    n_theta: usize,
    mode: TrigMode,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

const Q15_ONE: f64 = 32768.0;

fn quantize_q15(v: f64) -> f64 {
    let raw = (v * Q15_ONE).round().clamp(-32767.0, 32767.0);
    raw / Q15_ONE
}

impl TrigTable {
    /// Builds a table with `n_theta` bins (even, at least 2) in the given mode.
    pub fn build(n_theta: usize, mode: TrigMode) -> Result<Self> {
        if n_theta < 2 || n_theta % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n_theta must be even and at least 2, got {n_theta}"
            )));
        }
        let half = n_theta / 2;
        let mut cos = vec![0.0; n_theta];
        let mut sin = vec![0.0; n_theta];
        for k in 0..=half {
            let (c, s) = if k == 0 {
                (1.0, 0.0)
            } else if 2 * k == n_theta {
                (0.0, 1.0)
            } else {
                let rad = (k as f64 * 180.0 / n_theta as f64).to_radians();
                (rad.cos(), rad.sin())
            };
            match mode {
                TrigMode::Float64 => {
                    cos[k] = c;
                    sin[k] = s;
                }
                TrigMode::Q15 => {
                    cos[k] = quantize_q15(c);
                    sin[k] = quantize_q15(s);
                }
            }
        }
        // Mirror half: negating is exact in both modes.
        for k in half + 1..n_theta {
            cos[k] = -cos[n_theta - k];
            sin[k] = sin[n_theta - k];
        }
        Ok(TrigTable {
            n_theta,
            mode,
            cos,
            sin,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn mode(&self) -> TrigMode {
        self.mode
    }

    #[inline]
    pub fn cos(&self, theta_bin: usize) -> f64 {
        self.cos[theta_bin]
    }

    #[inline]
    pub fn sin(&self, theta_bin: usize) -> f64 {
        self.sin[theta_bin]
    }

    pub fn cos_table(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_table(&self) -> &[f64] {
        &self.sin
    }

    /// Degrees represented by `theta_bin`.
    pub fn theta_degrees(&self, theta_bin: usize) -> f64 {
        theta_bin as f64 * 180.0 / self.n_theta as f64
    }
}

/// Largest |r| any pixel of a `width x height` image can produce, rounded up.
pub fn rho_max(width: u32, height: u32) -> u32 {
    let d = (width as u64 * width as u64 + height as u64 * height as u64) as f64;
    d.sqrt().ceil() as u32
}

/// The shared rho quantizer: round half up.
#[inline]
pub fn quantize_rho(r: f64) -> i64 {
    (r + 0.5).floor() as i64
}

/// 2D vote counts indexed by `(theta_bin, rho_bin)`, row-major by theta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoughAccumulator {
    n_theta: usize,
    n_rho: usize,
    rho_offset: usize,
    width: u32,
    height: u32,
    counts: Vec<u32>,
}

impl HoughAccumulator {
    /// Zeroed accumulator sized for votes from a `width x height` image.
    pub fn new(width: u32, height: u32, n_theta: usize) -> Self {
        let offset = rho_max(width, height) as usize;
        let n_rho = 2 * offset + 1;
        HoughAccumulator {
            n_theta,
            n_rho,
            rho_offset: offset,
            width,
            height,
            counts: vec![0; n_theta * n_rho],
        }
    }

    pub(crate) fn from_counts(width: u32, height: u32, n_theta: usize, counts: Vec<u32>) -> Self {
        let mut acc = HoughAccumulator::new(width, height, n_theta);
        debug_assert_eq!(counts.len(), acc.counts.len());
        acc.counts = counts;
        acc
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    /// Index of the `r = 0` bin; equals `rho_max` for the source dimensions.
    pub fn rho_offset(&self) -> usize {
        self.rho_offset
    }

    /// Dimensions of the image the votes came from.
    pub fn source_dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn count(&self, theta_bin: usize, rho_bin: usize) -> u32 {
        self.counts[theta_bin * self.n_rho + rho_bin]
    }

    /// Row-major counts, theta-bin rows of length `n_rho`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total_votes(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Signed r value represented by a rho bin.
    pub fn signed_rho(&self, rho_bin: usize) -> i64 {
        rho_bin as i64 - self.rho_offset as i64
    }

    /// Rho bin that pixel `(x, y)` votes into at `theta_bin`.
    #[inline]
    pub fn rho_of(&self, x: u32, y: u32, theta_bin: usize, table: &TrigTable) -> usize {
        let r = x as f64 * table.cos(theta_bin) + y as f64 * table.sin(theta_bin);
        let bin = quantize_rho(r) + self.rho_offset as i64;
        debug_assert!(bin >= 0 && (bin as usize) < self.n_rho);
        bin as usize
    }
}

/// Tile counts for covering a `width x height` image with square blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDims {
    pub tiles_x: u32,
    pub tiles_y: u32,
    pub block: u32,
}

/// Ceil-division tiling: the smallest grid of `block`-sized tiles covering
/// the image.
pub fn tile_grid(width: u32, height: u32, block: u32) -> Result<GridDims> {
    if block == 0 {
        return Err(Error::InvalidParameter("tile block size must be >= 1".into()));
    }
    Ok(GridDims {
        tiles_x: (width + block - 1) / block,
        tiles_y: (height + block - 1) / block,
        block,
    })
}

const HACC_MAGIC: &str = "HACC1";

/// Writes the accumulator in the `HACC1` format: one ASCII header line
/// `HACC1 <n_theta> <n_rho> <rho_offset> <width> <height>\n` followed by
/// `n_theta * n_rho` little-endian u32 counts, row-major by theta.
pub fn dump_accumulator(acc: &HoughAccumulator, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = format!(
        "{HACC_MAGIC} {} {} {} {} {}\n",
        acc.n_theta, acc.n_rho, acc.rho_offset, acc.width, acc.height
    )
    .into_bytes();
    bytes.reserve(acc.counts.len() * 4);
    for &c in &acc.counts {
        bytes.extend_from_slice(&c.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads an accumulator written by [`dump_accumulator`], bit-exactly.
pub fn load_accumulator(path: impl AsRef<Path>) -> Result<HoughAccumulator> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(path, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::format(path, "header is not ASCII"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != HACC_MAGIC {
        return Err(Error::format(path, "not a HACC1 file"));
    }
    let parse = |s: &str, name: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| Error::format(path, format!("malformed {name} field")))
    };
    let n_theta = parse(fields[1], "n_theta")? as usize;
    let n_rho = parse(fields[2], "n_rho")? as usize;
    let rho_offset = parse(fields[3], "rho_offset")? as usize;
    let width = parse(fields[4], "width")? as u32;
    let height = parse(fields[5], "height")? as u32;
    if n_theta == 0 || n_rho != 2 * rho_offset + 1 || width == 0 || height == 0 {
        return Err(Error::format(path, "inconsistent HACC1 header"));
    }
    let payload = &bytes[newline + 1..];
    let expected = n_theta * n_rho * 4;
    if payload.len() != expected {
        return Err(Error::format(
            path,
            format!("payload holds {} bytes, header implies {expected}", payload.len()),
        ));
    }
    let counts = payload
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(HoughAccumulator {
        n_theta,
        n_rho,
        rho_offset,
        width,
        height,
        counts,
    })
}
