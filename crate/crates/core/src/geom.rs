//! Line/rectangle geometry shared by peak post-processing and the synthetic
//! scene generator. Everything here rounds with `floor(v + 0.5)`, the same
//! rule the accumulator uses for rho, so rasterized geometry and voting
//! agree about where a line lies.

/// Round half up, matching [`crate::hough::quantize_rho`].
#[inline]
pub(crate) fn round_coord(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

const EDGE_EPS: f64 = 1e-7;

/// Intersects the line `x*cos_t + y*sin_t = r` with the pixel rectangle
/// `[0, width-1] x [0, height-1]`. Returns the two extreme intersection
/// points (equal for a corner graze), or `None` if the line misses.
pub(crate) fn clip_polar_line(
    cos_t: f64,
    sin_t: f64,
    r: f64,
    width: u32,
    height: u32,
) -> Option<((f64, f64), (f64, f64))> {
    let xmax = (width - 1) as f64;
    let ymax = (height - 1) as f64;
    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);

    // Crossings with the vertical borders x = 0 and x = xmax.
    if sin_t.abs() > EDGE_EPS {
        for x in [0.0, xmax] {
            let y = (r - x * cos_t) / sin_t;
            if (-EDGE_EPS..=ymax + EDGE_EPS).contains(&y) {
                candidates.push((x, y.clamp(0.0, ymax)));
            }
        }
    }
    // Crossings with the horizontal borders y = 0 and y = ymax.
    if cos_t.abs() > EDGE_EPS {
        for y in [0.0, ymax] {
            let x = (r - y * sin_t) / cos_t;
            if (-EDGE_EPS..=xmax + EDGE_EPS).contains(&x) {
                candidates.push((x.clamp(0.0, xmax), y));
            }
        }
    }

    // Farthest-apart pair of candidates spans the whole clipped chord.
    let mut best: Option<((f64, f64), (f64, f64), f64)> = None;
    for (i, &a) in candidates.iter().enumerate() {
        for &b in &candidates[i..] {
            let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
            if best.map_or(true, |(_, _, bd)| d2 > bd) {
                best = Some((a, b, d2));
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}

/// Pixels visited by stepping the line across the image, one step per unit
/// of the dominant axis, minor coordinate recomputed from the line equation
/// and rounded. Every returned pixel is in bounds and within half a pixel
/// of the true line; pixels come out ordered along the walk axis.
pub(crate) fn walk_polar_line(
    cos_t: f64,
    sin_t: f64,
    r: f64,
    width: u32,
    height: u32,
) -> Vec<(u32, u32)> {
    let Some((a, b)) = clip_polar_line(cos_t, sin_t, r, width, height) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    // The line direction is (-sin, cos); walk whichever axis moves faster.
    if sin_t.abs() >= cos_t.abs() {
        let (x0, x1) = (a.0.min(b.0), a.0.max(b.0));
        let from = round_coord(x0).clamp(0, (width - 1) as i64);
        let to = round_coord(x1).clamp(0, (width - 1) as i64);
        for x in from..=to {
            let y = round_coord((r - x as f64 * cos_t) / sin_t);
            if y >= 0 && y < height as i64 {
                out.push((x as u32, y as u32));
            }
        }
    } else {
        let (y0, y1) = (a.1.min(b.1), a.1.max(b.1));
        let from = round_coord(y0).clamp(0, (height - 1) as i64);
        let to = round_coord(y1).clamp(0, (height - 1) as i64);
        for y in from..=to {
            let x = round_coord((r - y as f64 * sin_t) / cos_t);
            if x >= 0 && x < width as i64 {
                out.push((x as u32, y as u32));
            }
        }
    }
    out
}

/// Integer rasterization of the segment `p0..=p1`, one pixel per step of
/// the dominant axis: exactly `max(|dx|, |dy|) + 1` pixels.
pub(crate) fn rasterize_segment(p0: (u32, u32), p1: (u32, u32)) -> Vec<(u32, u32)> {
    let (x0, y0) = (p0.0 as i64, p0.1 as i64);
    let (x1, y1) = (p1.0 as i64, p1.1 as i64);
    let dx = x1 - x0;
    let dy = y1 - y0;
    let steps = dx.abs().max(dy.abs());
    if steps == 0 {
        return vec![p0];
    }
    let mut out = Vec::with_capacity(steps as usize + 1);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = round_coord(x0 as f64 + t * dx as f64);
        let y = round_coord(y0 as f64 + t * dy as f64);
        out.push((x as u32, y as u32));
    }
    out
}

/// Angle-bin trig used outside the voting tables: exact on the axes so bin 0
/// is perfectly vertical-normal and the midpoint bin perfectly horizontal.
pub(crate) fn bin_cos_sin(theta_bin: usize, n_theta: usize) -> (f64, f64) {
    if theta_bin == 0 {
        (1.0, 0.0)
    } else if 2 * theta_bin == n_theta {
        (0.0, 1.0)
    } else {
        let rad = (theta_bin as f64 * 180.0 / n_theta as f64).to_radians();
        (rad.cos(), rad.sin())
    }
}
