//! Lane detection as a software pipeline: Sobel edge extraction, threshold
//! binarization, a polar Hough transform with four interchangeable voting
//! strategies, native peak/segment post-processing, and a latency/memory
//! measurement harness.
//!
//! The voting strategies (`Reference`, `SymmetricHalfAngle`,
//! `AnglePartitioned`, `PixelParallelAtomic`) model the datapaths of
//! hardware accelerators for this pipeline and are required to produce
//! bin-for-bin identical accumulators, so any of them can be swapped in
//! behind the same post-processing.

pub mod bench;
pub mod edge;
pub mod error;
mod geom;
pub mod hough;
pub mod imgio;
pub mod lanes;
pub mod synth;

pub use edge::{binarize, sobel_magnitude, BinaryImage, EdgeImage};
pub use error::{Error, Result};
pub use hough::{accumulate, HoughAccumulator, TrigMode, TrigTable, VoteStrategy};
pub use imgio::{load_gray, save_image, GrayImage, RgbImage, SaveFormat};
pub use lanes::{extract_segments, find_peaks, peak_to_line, render_overlay, Peak, PeakParams};
