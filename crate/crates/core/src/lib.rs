//! Claycodes: 2D scannable codes that carry their message in the nesting
//! structure of colored regions.
//!
//! The pipeline is
//!
//! 1. [`framing`] – message text to `payload ‖ CRC` bits,
//! 2. [`bittree`] – bits to a topology tree and back,
//! 3. [`packer`] – tree to nested polygons inside an arbitrary simple shape,
//!    rendered to SVG or a raster,
//! 4. [`scanner`] – raster to contour hierarchy to candidate trees to
//!    validated messages,
//!
//! with [`geometry`] supplying the polygon primitives and [`harness`] the
//! synthetic distortion experiments.

pub mod bittree;
pub mod error;
pub mod framing;
pub mod geometry;
pub mod harness;
pub mod packer;
pub mod raster;
pub mod scanner;

pub use error::{Error, Result};
