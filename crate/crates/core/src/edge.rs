//! Sobel edge extraction and threshold binarization.
//!
//! The convolution mirrors a hardware datapath: Sobel coefficients are only
//! 0, ±1, and ±2, so every product is formed with adders and a left shift —
//! the result is still bit-identical to multiply-accumulate.

use crate::error::{Error, Result};
use crate::imgio::{zero_pad, GrayImage};

/// 3x3 signed kernel with coefficients restricted to {-2, -1, 0, 1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kernel3x3 {
    coeffs: [[i32; 3]; 3],
}

/// Horizontal-gradient Sobel kernel.
pub const SOBEL_X: Kernel3x3 = Kernel3x3 {
    coeffs: [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]],
};

/// Vertical-gradient Sobel kernel.
pub const SOBEL_Y: Kernel3x3 = Kernel3x3 {
    coeffs: [[1, 2, 1], [0, 0, 0], [-1, -2, -1]],
};

impl Kernel3x3 {
    /// Validates that every coefficient is one of {-2, -1, 0, 1, 2}.
    pub fn new(coeffs: [[i32; 3]; 3]) -> Result<Self> {
        for row in &coeffs {
            for &c in row {
                if !(-2..=2).contains(&c) {
                    return Err(Error::InvalidParameter(format!(
                        "kernel coefficient {c} outside the shift-add range [-2, 2]"
                    )));
                }
            }
        }
        Ok(Kernel3x3 { coeffs })
    }

    pub fn coeffs(&self) -> &[[i32; 3]; 3] {
        &self.coeffs
    }
}

/// Signed per-pixel plane produced by [`convolve3x3`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPlane {
    width: u32,
    height: u32,
    data: Vec<i32>,
}

impl SignedPlane {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[i32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> i32 {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Gradient-magnitude image, clamped to the 8-bit range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl EdgeImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Copies the magnitudes into a plain grayscale image (for dumping).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.data.clone()).expect("dims already valid")
    }
}

/// Image whose pixels are exactly 0 or 255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl BinaryImage {
    /// Wraps row-major data; every byte must be 0 or 255.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "binary buffer holds {} bytes, {width}x{height} needs {}",
                data.len(),
                width as usize * height as usize
            )));
        }
        if let Some(bad) = data.iter().find(|&&v| v != 0 && v != 255) {
            return Err(Error::InvalidParameter(format!(
                "binary image may only contain 0 or 255, found {bad}"
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn is_white(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize] == 255
    }

    pub fn white_pixel_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 255).count()
    }

    /// Coordinates of every white pixel in raster order.
    pub fn white_pixels(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.is_white(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Copies the binary plane into a plain grayscale image (for dumping).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.data.clone()).expect("dims already valid")
    }
}

/// One kernel tap: coefficients are limited to {-2, -1, 0, 1, 2}, so ×2 is a
/// left shift and the rest are adds/negations. Bit-identical to `c * p`.
#[inline]
fn shift_add_term(c: i32, p: i32) -> i32 {
    match c {
        -2 => -(p << 1),
        -1 => -p,
        0 => 0,
        1 => p,
        2 => p << 1,
        _ => unreachable!("Kernel3x3 construction bounds coefficients"),
    }
}

/// Correlates `kernel` over every interior 3x3 window of `padded`.
///
/// The output is `(width - 2) x (height - 2)`; callers that want same-size
/// output pad with [`zero_pad`] first. Each output value is
/// `sum(kernel[i][j] * window[i][j])`, formed via the shift-add datapath.
pub fn convolve3x3(padded: &GrayImage, kernel: &Kernel3x3) -> Result<SignedPlane> {
    if padded.width() < 3 || padded.height() < 3 {
        return Err(Error::DimensionMismatch(format!(
            "convolution input must be at least 3x3, got {}x{}",
            padded.width(),
            padded.height()
        )));
    }
    let out_w = padded.width() - 2;
    let out_h = padded.height() - 2;
    let mut data = Vec::with_capacity(out_w as usize * out_h as usize);
    let src = padded.data();
    let stride = padded.width() as usize;
    for y in 0..out_h as usize {
        for x in 0..out_w as usize {
            let mut acc = 0i32;
            for (i, row) in kernel.coeffs.iter().enumerate() {
                let base = (y + i) * stride + x;
                for (j, &c) in row.iter().enumerate() {
                    acc += shift_add_term(c, src[base + j] as i32);
                }
            }
            data.push(acc);
        }
    }
    Ok(SignedPlane {
        width: out_w,
        height: out_h,
        data,
    })
}

/// Sobel gradient magnitude `|gx| + |gy|`, clamped to [0, 255].
///
/// The input is zero-padded by one pixel first, so the output has the same
/// dimensions as the input. The outermost ring, where the window would read
/// padding instead of image content, reports zero magnitude — a constant
/// image therefore has zero response everywhere, border included.
pub fn sobel_magnitude(img: &GrayImage) -> EdgeImage {
    let padded = zero_pad(img, 1);
    let gx = convolve3x3(&padded, &SOBEL_X).expect("padded image is at least 3x3");
    let gy = convolve3x3(&padded, &SOBEL_Y).expect("padded image is at least 3x3");
    let (w, h) = (img.width(), img.height());
    let mut data = vec![0u8; w as usize * h as usize];
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let m = gx.get(x, y).abs() + gy.get(x, y).abs();
            data[y as usize * w as usize + x as usize] = m.min(255) as u8;
        }
    }
    EdgeImage {
        width: w,
        height: h,
        data,
    }
}

/// Thresholds a gradient image: pixels `>= threshold` become 255, the rest 0.
///
/// `threshold` ranges over 0..=256; 0 turns every pixel white and 256 (above
/// any 8-bit magnitude) turns every pixel black.
pub fn binarize(edge: &EdgeImage, threshold: u16) -> BinaryImage {
    let data = edge
        .data
        .iter()
        .map(|&v| if v as u16 >= threshold { 255 } else { 0 })
        .collect();
    BinaryImage {
        width: edge.width,
        height: edge.height,
        data,
    }
}
