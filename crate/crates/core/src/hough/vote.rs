//! The four voting strategies. All of them must fill the accumulator
//! bin-for-bin identically; `Reference` is the oracle the others are held to.

use std::sync::atomic::{AtomicU32, Ordering};
use std::thread;

use crate::edge::BinaryImage;
use crate::error::{Error, Result};

use super::{quantize_rho, tile_grid, HoughAccumulator, TrigTable};

/// How votes are computed and written into the accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteStrategy {
    /// Sequential pass over pixels and angles; the correctness oracle.
    Reference,
    /// Computes products only for the lower half of the angle range and
    /// derives the mirrored bins by add/subtract, halving multiplications.
    SymmetricHalfAngle,
    /// Splits the theta axis into contiguous slices, one per worker; each
    /// worker owns its accumulator rows exclusively.
    AnglePartitioned { workers: usize },
    /// Splits white pixels across workers by image tile; all workers vote
    /// into one shared accumulator with atomic increments.
    PixelParallelAtomic { workers: usize, block: u32 },
}

impl VoteStrategy {
    /// Short name used on CLIs and in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            VoteStrategy::Reference => "reference",
            VoteStrategy::SymmetricHalfAngle => "symmetric",
            VoteStrategy::AnglePartitioned { .. } => "angle-partitioned",
            VoteStrategy::PixelParallelAtomic { .. } => "atomic",
        }
    }

    /// Worker threads used by this strategy (1 for the sequential ones).
    pub fn workers(&self) -> usize {
        match self {
            VoteStrategy::Reference | VoteStrategy::SymmetricHalfAngle => 1,
            VoteStrategy::AnglePartitioned { workers } => *workers,
            VoteStrategy::PixelParallelAtomic { workers, .. } => *workers,
        }
    }

    /// Builds a strategy from its [`name`](Self::name), attaching `workers`
    /// and `block` to the variants that use them.
    pub fn from_name(name: &str, workers: usize, block: u32) -> Option<Self> {
        match name {
            "reference" => Some(VoteStrategy::Reference),
            "symmetric" => Some(VoteStrategy::SymmetricHalfAngle),
            "angle-partitioned" => Some(VoteStrategy::AnglePartitioned { workers }),
            "atomic" => Some(VoteStrategy::PixelParallelAtomic { workers, block }),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.workers() == 0 {
            return Err(Error::InvalidParameter(
                "worker count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl std::fmt::Display for VoteStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Instrumentation gathered by [`accumulate_with_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteStats {
    /// Trig-table multiplications actually performed (`x*cos` and `y*sin`
    /// each count once).
    pub trig_muls: u64,
}

/// Votes every white pixel of `img` into a fresh accumulator.
///
/// For each white pixel and each theta bin the pixel's rho bin is
/// incremented exactly once, so the total count is
/// `white_pixels * n_theta` and the final accumulator is identical for
/// every strategy given the same table.
pub fn accumulate(
    img: &BinaryImage,
    table: &TrigTable,
    strategy: VoteStrategy,
) -> Result<HoughAccumulator> {
    run::<false>(img, table, strategy).map(|(acc, _)| acc)
}

/// Same as [`accumulate`], with instrumented multiplication counters.
pub fn accumulate_with_stats(
    img: &BinaryImage,
    table: &TrigTable,
    strategy: VoteStrategy,
) -> Result<(HoughAccumulator, VoteStats)> {
    let (acc, trig_muls) = run::<true>(img, table, strategy)?;
    Ok((acc, VoteStats { trig_muls }))
}

/// One counted multiplication. With `COUNT = false` the increment folds away
/// and the product is all that remains.
#[inline(always)]
fn mul<const COUNT: bool>(counter: &mut u64, a: f64, b: f64) -> f64 {
    if COUNT {
        *counter += 1;
    }
    a * b
}

fn run<const COUNT: bool>(
    img: &BinaryImage,
    table: &TrigTable,
    strategy: VoteStrategy,
) -> Result<(HoughAccumulator, u64)> {
    strategy.validate()?;
    let shape = HoughAccumulator::new(img.width(), img.height(), table.n_theta());
    let n_rho = shape.n_rho();
    let rho_offset = shape.rho_offset() as i64;
    // Every strategy consumes the same coordinate list, extracted once.
    let pixels = img.white_pixels();

    let (counts, muls) = match strategy {
        VoteStrategy::Reference => {
            let mut counts = vec![0u32; table.n_theta() * n_rho];
            let muls = vote_reference::<COUNT>(&mut counts, n_rho, rho_offset, &pixels, table);
            (counts, muls)
        }
        VoteStrategy::SymmetricHalfAngle => {
            let mut counts = vec![0u32; table.n_theta() * n_rho];
            let muls = vote_symmetric::<COUNT>(&mut counts, n_rho, rho_offset, &pixels, table);
            (counts, muls)
        }
        VoteStrategy::AnglePartitioned { workers } => {
            let mut counts = vec![0u32; table.n_theta() * n_rho];
            let muls = vote_angle_partitioned::<COUNT>(
                &mut counts,
                n_rho,
                rho_offset,
                &pixels,
                table,
                workers,
            );
            (counts, muls)
        }
        VoteStrategy::PixelParallelAtomic { workers, block } => {
            let grid = tile_grid(img.width(), img.height(), block)?;
            vote_atomic::<COUNT>(n_rho, rho_offset, &pixels, table, workers, grid)
        }
    };
    Ok((
        HoughAccumulator::from_counts(img.width(), img.height(), table.n_theta(), counts),
        muls,
    ))
}

fn vote_reference<const COUNT: bool>(
    counts: &mut [u32],
    n_rho: usize,
    rho_offset: i64,
    pixels: &[(u32, u32)],
    table: &TrigTable,
) -> u64 {
    let mut muls = 0u64;
    let (cos, sin) = (table.cos_table(), table.sin_table());
    for &(x, y) in pixels {
        let (xf, yf) = (x as f64, y as f64);
        for k in 0..table.n_theta() {
            let r = mul::<COUNT>(&mut muls, xf, cos[k]) + mul::<COUNT>(&mut muls, yf, sin[k]);
            let bin = (quantize_rho(r) + rho_offset) as usize;
            counts[k * n_rho + bin] += 1;
        }
    }
    muls
}

/// Half-angle voting. For each pixel, products are formed only for
/// `k in 0..=n_theta/2`; the mirror bin `n_theta - k` reuses them as
/// `p2 - p1`, which is bit-identical to voting directly with the mirrored
/// table entries because those entries are exact negations/copies.
fn vote_symmetric<const COUNT: bool>(
    counts: &mut [u32],
    n_rho: usize,
    rho_offset: i64,
    pixels: &[(u32, u32)],
    table: &TrigTable,
) -> u64 {
    let mut muls = 0u64;
    let (cos, sin) = (table.cos_table(), table.sin_table());
    let n_theta = table.n_theta();
    let half = n_theta / 2;
    for &(x, y) in pixels {
        let (xf, yf) = (x as f64, y as f64);
        for k in 0..=half {
            let p1 = mul::<COUNT>(&mut muls, xf, cos[k]);
            let p2 = mul::<COUNT>(&mut muls, yf, sin[k]);
            let bin = (quantize_rho(p1 + p2) + rho_offset) as usize;
            counts[k * n_rho + bin] += 1;
            // k = 0 has no in-range mirror and k = half mirrors onto itself.
            if k != 0 && k != half {
                let mirror_bin = (quantize_rho(p2 - p1) + rho_offset) as usize;
                counts[(n_theta - k) * n_rho + mirror_bin] += 1;
            }
        }
    }
    muls
}

fn vote_angle_partitioned<const COUNT: bool>(
    counts: &mut [u32],
    n_rho: usize,
    rho_offset: i64,
    pixels: &[(u32, u32)],
    table: &TrigTable,
    workers: usize,
) -> u64 {
    let rows_per_worker = table.n_theta().div_ceil(workers);
    let mut muls = 0u64;
    thread::scope(|s| {
        let mut handles = Vec::new();
        for (slice_idx, chunk) in counts.chunks_mut(rows_per_worker * n_rho).enumerate() {
            let first_k = slice_idx * rows_per_worker;
            handles.push(s.spawn(move || {
                let mut local_muls = 0u64;
                let (cos, sin) = (table.cos_table(), table.sin_table());
                for (row_idx, row) in chunk.chunks_mut(n_rho).enumerate() {
                    let k = first_k + row_idx;
                    for &(x, y) in pixels {
                        let r = mul::<COUNT>(&mut local_muls, x as f64, cos[k])
                            + mul::<COUNT>(&mut local_muls, y as f64, sin[k]);
                        row[(quantize_rho(r) + rho_offset) as usize] += 1;
                    }
                }
                local_muls
            }));
        }
        for handle in handles {
            muls += handle.join().expect("voting worker panicked");
        }
    });
    muls
}

fn vote_atomic<const COUNT: bool>(
    n_rho: usize,
    rho_offset: i64,
    pixels: &[(u32, u32)],
    table: &TrigTable,
    workers: usize,
    grid: super::GridDims,
) -> (Vec<u32>, u64) {
    // Pixels are dealt to workers tile by tile: raster tile index modulo the
    // worker count. The final counts do not depend on the assignment because
    // atomic increments commute.
    let mut assigned: Vec<Vec<(u32, u32)>> = vec![Vec::new(); workers];
    for &(x, y) in pixels {
        let tile = (y / grid.block) as usize * grid.tiles_x as usize + (x / grid.block) as usize;
        assigned[tile % workers].push((x, y));
    }

    let n_theta = table.n_theta();
    let shared: Vec<AtomicU32> = std::iter::repeat_with(|| AtomicU32::new(0))
        .take(n_theta * n_rho)
        .collect();
    let mut muls = 0u64;
    thread::scope(|s| {
        let mut handles = Vec::new();
        for list in &assigned {
            let shared = &shared;
            handles.push(s.spawn(move || {
                let mut local_muls = 0u64;
                let (cos, sin) = (table.cos_table(), table.sin_table());
                for &(x, y) in list {
                    let (xf, yf) = (x as f64, y as f64);
                    for k in 0..n_theta {
                        let r = mul::<COUNT>(&mut local_muls, xf, cos[k])
                            + mul::<COUNT>(&mut local_muls, yf, sin[k]);
                        let bin = (quantize_rho(r) + rho_offset) as usize;
                        shared[k * n_rho + bin].fetch_add(1, Ordering::Relaxed);
                    }
                }
                local_muls
            }));
        }
        for handle in handles {
            muls += handle.join().expect("voting worker panicked");
        }
    });
    let counts = shared.into_iter().map(AtomicU32::into_inner).collect();
    (counts, muls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hough::TrigMode;
    use proptest::prelude::*;

    fn binary_from_coords(w: u32, h: u32, whites: &[(u32, u32)]) -> BinaryImage {
        let mut data = vec![0u8; w as usize * h as usize];
        for &(x, y) in whites {
            data[y as usize * w as usize + x as usize] = 255;
        }
        BinaryImage::new(w, h, data).unwrap()
    }

    fn random_binary(w: u32, h: u32, seed: u64, density_percent: u64) -> BinaryImage {
        let mut state = seed | 1;
        let mut data = vec![0u8; w as usize * h as usize];
        for v in &mut data {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            if (state >> 33) % 100 < density_percent {
                *v = 255;
            }
        }
        BinaryImage::new(w, h, data).unwrap()
    }

    #[test]
    fn empty_image_yields_empty_accumulator() {
        let img = binary_from_coords(16, 16, &[]);
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let acc = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
        assert_eq!(acc.total_votes(), 0);
    }

    #[test]
    fn single_pixel_votes_once_per_angle() {
        let img = binary_from_coords(16, 16, &[(3, 11)]);
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let acc = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
        assert_eq!(acc.total_votes(), 180);
    }

    #[test]
    fn horizontal_row_concentrates_at_ninety_degrees() {
        let img = binary_from_coords(16, 16, &[(2, 5), (7, 5), (12, 5)]);
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let acc = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
        assert_eq!(acc.count(90, acc.rho_offset() + 5), 3);
    }

    #[test]
    fn all_strategies_match_reference() {
        for mode in [TrigMode::Float64, TrigMode::Q15] {
            let table = TrigTable::build(180, mode).unwrap();
            for seed in 0..6u64 {
                let img = random_binary(64, 64, seed * 31 + 7, 5 + seed * 9);
                let oracle = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
                let mut others = vec![VoteStrategy::SymmetricHalfAngle];
                for workers in [1usize, 2, 4, 8] {
                    others.push(VoteStrategy::AnglePartitioned { workers });
                    others.push(VoteStrategy::PixelParallelAtomic { workers, block: 16 });
                }
                for strategy in others {
                    let acc = accumulate(&img, &table, strategy).unwrap();
                    assert_eq!(
                        acc.counts(),
                        oracle.counts(),
                        "{strategy} diverged (seed {seed}, mode {mode:?})"
                    );
                }
            }
        }
    }

    #[test]
    fn vote_total_is_white_count_times_bins() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = random_binary(48, 32, 99, 20);
        let whites = img.white_pixel_count() as u64;
        for strategy in [
            VoteStrategy::Reference,
            VoteStrategy::SymmetricHalfAngle,
            VoteStrategy::AnglePartitioned { workers: 3 },
            VoteStrategy::PixelParallelAtomic { workers: 5, block: 8 },
        ] {
            let acc = accumulate(&img, &table, strategy).unwrap();
            assert_eq!(acc.total_votes(), whites * 180);
        }
    }

    #[test]
    fn atomic_strategy_is_deterministic_across_worker_counts() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = random_binary(40, 40, 5, 25);
        let base = accumulate(
            &img,
            &table,
            VoteStrategy::PixelParallelAtomic { workers: 1, block: 16 },
        )
        .unwrap();
        for workers in [2, 3, 4, 7, 16] {
            for _ in 0..3 {
                let acc = accumulate(
                    &img,
                    &table,
                    VoteStrategy::PixelParallelAtomic { workers, block: 16 },
                )
                .unwrap();
                assert_eq!(acc.counts(), base.counts());
            }
        }
    }

    #[test]
    fn mirror_bins_are_derived_exactly() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let acc = HoughAccumulator::new(64, 64, 180);
        let offset = acc.rho_offset() as i64;
        for &(x, y) in &[(0u32, 0u32), (63, 0), (0, 63), (17, 42), (63, 63)] {
            for k in 1..90usize {
                let p1 = x as f64 * table.cos(k);
                let p2 = y as f64 * table.sin(k);
                let derived = (quantize_rho(p2 - p1) + offset) as usize;
                assert_eq!(derived, acc.rho_of(x, y, 180 - k, &table));
            }
        }
    }

    #[test]
    fn symmetric_strategy_halves_multiplications() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = random_binary(32, 32, 12, 30);
        let whites = img.white_pixel_count() as u64;
        assert!(whites > 0);
        let (_, ref_stats) =
            accumulate_with_stats(&img, &table, VoteStrategy::Reference).unwrap();
        let (_, sym_stats) =
            accumulate_with_stats(&img, &table, VoteStrategy::SymmetricHalfAngle).unwrap();
        assert_eq!(ref_stats.trig_muls, whites * 180 * 2);
        // Per white pixel: (n_theta / 2 + 1) * 2 products.
        assert_eq!(sym_stats.trig_muls, whites * 91 * 2);
        assert!(sym_stats.trig_muls as f64 <= 0.51 * ref_stats.trig_muls as f64);
    }

    #[test]
    fn zero_workers_is_rejected() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = binary_from_coords(4, 4, &[(1, 1)]);
        assert!(matches!(
            accumulate(&img, &table, VoteStrategy::AnglePartitioned { workers: 0 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            accumulate(
                &img,
                &table,
                VoteStrategy::PixelParallelAtomic { workers: 0, block: 16 }
            ),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn zero_block_is_rejected() {
        let table = TrigTable::build(180, TrigMode::Float64).unwrap();
        let img = binary_from_coords(4, 4, &[(1, 1)]);
        assert!(accumulate(
            &img,
            &table,
            VoteStrategy::PixelParallelAtomic { workers: 2, block: 0 }
        )
        .is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for strategy in [
            VoteStrategy::Reference,
            VoteStrategy::SymmetricHalfAngle,
            VoteStrategy::AnglePartitioned { workers: 4 },
            VoteStrategy::PixelParallelAtomic { workers: 4, block: 16 },
        ] {
            assert_eq!(
                VoteStrategy::from_name(strategy.name(), 4, 16),
                Some(strategy)
            );
        }
        assert_eq!(VoteStrategy::from_name("warp", 4, 16), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn strategies_agree_on_arbitrary_images(
            seed in any::<u64>(),
            density in 1u64..60,
            workers in 1usize..9,
            q15 in any::<bool>(),
            n_theta in prop::sample::select(vec![2usize, 4, 90, 180]),
        ) {
            let mode = if q15 { TrigMode::Q15 } else { TrigMode::Float64 };
            let table = TrigTable::build(n_theta, mode).unwrap();
            let img = random_binary(31, 17, seed, density);
            let oracle = accumulate(&img, &table, VoteStrategy::Reference).unwrap();
            for strategy in [
                VoteStrategy::SymmetricHalfAngle,
                VoteStrategy::AnglePartitioned { workers },
                VoteStrategy::PixelParallelAtomic { workers, block: 5 },
            ] {
                let acc = accumulate(&img, &table, strategy).unwrap();
                prop_assert_eq!(acc.counts(), oracle.counts());
            }
            prop_assert_eq!(
                oracle.total_votes(),
                img.white_pixel_count() as u64 * n_theta as u64
            );
        }
    }
}
