//! Grayscale/RGB image containers and file I/O (binary PGM and 8-bit PNG).
//!
//! Coordinates follow raster order: `x` is the column, `y` the row, with the
//! origin at the top-left pixel.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Wraps row-major pixel data. `data.len()` must equal `width * height`
    /// and both dimensions must be at least 1.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "pixel buffer holds {} bytes, {width}x{height} needs {expected}",
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            data,
        }
    }

    /// Constant-valued image.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self::from_fn(width, height, |_, _| value)
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

    /// Pixel at column `x`, row `y`. Panics if out of bounds.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// 8-bit RGB image, row-major interleaved triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps interleaved RGB data; `data.len()` must equal `3 * width * height`.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        let expected = 3 * width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "RGB buffer holds {} bytes, {width}x{height} needs {expected}",
                data.len()
            )));
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    /// Promotes a grayscale image: every channel takes the gray value.
    pub fn from_gray(gray: &GrayImage) -> Self {
        let mut data = Vec::with_capacity(3 * gray.data.len());
        for &v in &gray.data {
            data.extend_from_slice(&[v, v, v]);
        }
        RgbImage {
            width: gray.width,
            height: gray.height,
            data,
        }
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
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        debug_assert!(x < self.width && y < self.height);
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

/// Output encodings supported by [`save_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaveFormat {
    /// Binary PGM (P5, maxval 255). Grayscale only.
    Pgm,
    /// 8-bit PNG, grayscale or RGB.
    Png,
}

/// Borrowed view over either image kind, for [`save_image`].
#[derive(Debug, Clone, Copy)]
pub enum ImageRef<'a> {
    Gray(&'a GrayImage),
    Rgb(&'a RgbImage),
}

impl<'a> From<&'a GrayImage> for ImageRef<'a> {
    fn from(img: &'a GrayImage) -> Self {
        ImageRef::Gray(img)
    }
}

impl<'a> From<&'a RgbImage> for ImageRef<'a> {
    fn from(img: &'a RgbImage) -> Self {
        ImageRef::Rgb(img)
    }
}

/// Loads a grayscale image from a binary PGM (P5, maxval 255) or an 8-bit PNG.
///
/// Color PNG input is reduced to luma by integer rounding of
/// `0.299 R + 0.587 G + 0.114 B`; grayscale sources are preserved bit-exactly.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") {
        parse_pgm(&bytes, path)
    } else if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(&bytes, path)
    } else if bytes.first() == Some(&b'P') {
        Err(Error::format(
            path,
            format!(
                "unsupported netpbm magic {:?} (only binary P5 is accepted)",
                String::from_utf8_lossy(&bytes[..2.min(bytes.len())])
            ),
        ))
    } else {
        Err(Error::format(path, "unrecognized image format"))
    }
}

/// Writes `img` to `path` in the requested format.
///
/// Grayscale PGM output round-trips bit-exactly through [`load_gray`].
/// Requesting PGM for an RGB image is a usage error.
pub fn save_image<'a>(
    img: impl Into<ImageRef<'a>>,
    path: impl AsRef<Path>,
    format: SaveFormat,
) -> Result<()> {
    let path = path.as_ref();
    match (img.into(), format) {
        (ImageRef::Gray(g), SaveFormat::Pgm) => write_pgm(g, path),
        (ImageRef::Gray(g), SaveFormat::Png) => {
            encode_png(path, &g.data, g.width, g.height, image::ExtendedColorType::L8)
        }
        (ImageRef::Rgb(c), SaveFormat::Png) => encode_png(
            path,
            &c.data,
            c.width,
            c.height,
            image::ExtendedColorType::Rgb8,
        ),
        (ImageRef::Rgb(_), SaveFormat::Pgm) => Err(Error::Usage(
            "PGM output is grayscale-only; cannot encode an RGB image".into(),
        )),
    }
}

/// Surrounds `img` with a `border`-pixel ring of zeros.
///
/// The interior is copied unchanged, so `padded[(x + b, y + b)] == img[(x, y)]`
/// and the pixel sum is preserved.
pub fn zero_pad(img: &GrayImage, border: u32) -> GrayImage {
    if border == 0 {
        return img.clone();
    }
    let width = img.width + 2 * border;
    let height = img.height + 2 * border;
    let mut data = vec![0u8; width as usize * height as usize];
    for y in 0..img.height {
        let src = y as usize * img.width as usize;
        let dst = (y + border) as usize * width as usize + border as usize;
        data[dst..dst + img.width as usize]
            .copy_from_slice(&img.data[src..src + img.width as usize]);
    }
    GrayImage {
        width,
        height,
        data,
    }
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// BT.601 luma with integer round-half-up; exact for pure gray triples.
#[inline]
fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

fn decode_png(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::format(path, format!("PNG decode failed: {e}")))?;
    match decoded {
        image::DynamicImage::ImageLuma8(buf) => {
            GrayImage::new(buf.width(), buf.height(), buf.into_raw())
        }
        image::DynamicImage::ImageRgb8(buf) => {
            let (w, h) = (buf.width(), buf.height());
            let data = buf
                .into_raw()
                .chunks_exact(3)
                .map(|px| luma(px[0], px[1], px[2]))
                .collect();
            GrayImage::new(w, h, data)
        }
        other => Err(Error::format(
            path,
            format!(
                "unsupported PNG pixel layout {:?} (need 8-bit gray or RGB)",
                other.color()
            ),
        )),
    }
}

fn encode_png(
    path: &Path,
    data: &[u8],
    width: u32,
    height: u32,
    color: image::ExtendedColorType,
) -> Result<()> {
    image::save_buffer_with_format(path, data, width, height, color, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::format(path, format!("PNG encode failed: {other}")),
        })
}

fn write_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Parses binary PGM: `P5`, whitespace-separated width/height/maxval with
/// optional `#` comments, one whitespace byte, then raw pixel rows.
fn parse_pgm(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let mut pos = 2; // past "P5"
    let width = read_pgm_number(bytes, &mut pos)
        .ok_or_else(|| Error::format(path, "missing or malformed width"))?;
    let height = read_pgm_number(bytes, &mut pos)
        .ok_or_else(|| Error::format(path, "missing or malformed height"))?;
    let maxval = read_pgm_number(bytes, &mut pos)
        .ok_or_else(|| Error::format(path, "missing or malformed maxval"))?;
    if maxval != 255 {
        return Err(Error::format(
            path,
            format!("maxval must be 255, got {maxval}"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(path, "image dimensions must be at least 1x1"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(path, "missing separator before pixel data")),
    }
    let expected = width as usize * height as usize;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::format(
            path,
            format!(
                "truncated pixel data: need {expected} bytes, found {}",
                payload.len()
            ),
        ));
    }
    GrayImage::new(width, height, payload[..expected].to_vec())
}

/// Reads the next ASCII decimal in a PGM header, skipping whitespace and
/// `#` comments. Advances `pos`; returns `None` on malformed input.
fn read_pgm_number(bytes: &[u8], pos: &mut usize) -> Option<u32> {
    loop {
        match bytes.get(*pos)? {
            b if b.is_ascii_whitespace() => *pos += 1,
            b'#' => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    std::str::from_utf8(&bytes[start..*pos]).ok()?.parse().ok()
}
