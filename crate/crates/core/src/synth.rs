//! Deterministic synthetic road scenes: two bright lane lines with known
//! polar parameters over a dark background, plus seeded salt noise. Used by
//! the scaling benchmark and by end-to-end tests that need ground truth.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom;
use crate::imgio::GrayImage;

/// Ground truth for one painted line, in the same polar convention the
/// accumulator uses (`r = x*cos(theta) + y*sin(theta)`, theta in degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedLine {
    pub theta_deg: f64,
    pub r: f64,
}

impl PlantedLine {
    /// Pixels of the rasterized line inside a `width x height` image.
    pub fn rasterize(&self, width: u32, height: u32) -> Vec<(u32, u32)> {
        let rad = self.theta_deg.to_radians();
        geom::walk_polar_line(rad.cos(), rad.sin(), self.r, width, height)
    }
}

/// A generated scene and the lines hidden in it.
#[derive(Debug, Clone)]
pub struct LaneScene {
    pub image: GrayImage,
    pub lines: [PlantedLine; 2],
}

const BACKGROUND: u8 = 12;
const LINE_VALUE: u8 = 255;
/// One salt pixel per this many image pixels.
const SALT_DIVISOR: usize = 500;

/// Picks a lattice intercept at or shortly after `nominal` whose stripe
/// votes compactly.
///
/// A one-pixel diagonal stripe on intercept `c` has its gradient response on
/// the four neighboring diagonals `c-2, c-1, c+1, c+2` (the stripe pixel
/// itself sees a symmetric window and cancels). Those diagonals sit 1/sqrt(2)
/// apart in rho, so depending on phase they quantize into two rho bins (two
/// diagonals each) or smear across four. Concentrated intercepts give the
/// detector one strong twin pair per line instead of four half-strength bins.
fn concentrated_intercept(nominal: i64) -> i64 {
    let bin = |c: i64| (c as f64 * std::f64::consts::FRAC_1_SQRT_2 + 0.5).floor() as i64;
    (nominal..nominal + 16)
        .find(|&c| bin(c - 2) == bin(c - 1) && bin(c + 1) == bin(c + 2))
        .unwrap_or(nominal)
}

/// Builds a `width x height` scene with two lane lines at 45° and 135°
/// normals (roughly an X through the image, like converging lane markings)
/// and `width*height / 500` salt-noise pixels drawn from a ChaCha8 stream
/// seeded with `seed`. Identical arguments always produce identical pixels.
pub fn lane_scene(width: u32, height: u32, seed: u64) -> LaneScene {
    assert!(width >= 8 && height >= 8, "scene needs at least 8x8 pixels");
    let (w, h) = (width as i64, height as i64);
    // Line 1 runs along x + y = c1 near the image center; line 2 along
    // y - x = c2, offset a quarter height below the center.
    let c1 = concentrated_intercept((w + h) / 2);
    let c2 = concentrated_intercept(3 * h / 4 - w / 2);
    let lines = [
        PlantedLine {
            theta_deg: 45.0,
            r: c1 as f64 * std::f64::consts::FRAC_1_SQRT_2,
        },
        PlantedLine {
            theta_deg: 135.0,
            r: c2 as f64 * std::f64::consts::FRAC_1_SQRT_2,
        },
    ];

    let mut data = vec![BACKGROUND; width as usize * height as usize];
    for line in &lines {
        for (x, y) in line.rasterize(width, height) {
            data[y as usize * width as usize + x as usize] = LINE_VALUE;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let salt = (width as usize * height as usize) / SALT_DIVISOR;
    for _ in 0..salt {
        let x = rng.random_range(0..width);
        let y = rng.random_range(0..height);
        data[y as usize * width as usize + x as usize] = LINE_VALUE;
    }

    LaneScene {
        image: GrayImage::new(width, height, data).expect("dimensions validated above"),
        lines,
    }
}
