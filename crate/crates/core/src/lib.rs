//! Data-driven prolate bases on disks and symmetric sets, Born data
//! synthesis, and spectral-cutoff reconstruction of a medium contrast.

pub mod analysis;
pub mod disk;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod io;
pub mod numerics;
pub mod point;
pub mod recon;
pub mod setup;
pub mod symset;

pub use error::{Error, Result};
pub use point::Point;
