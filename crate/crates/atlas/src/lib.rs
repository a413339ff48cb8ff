//! Atlas over the phase portrait of the cubic quadratic differential
//! `-e^{2i theta} (z - a)(z^2 - 1) dz^2`: special-point tables, configuration
//! classification, grid scans, phase-transition detection, "very flat" search,
//! and deterministic SVG rendering.
//!
//! The heavy lifting (period integrals, level-curve tracing, trajectory
//! integration, Stokes graph assembly) lives in `stokes-core`; this crate adds
//! the user-facing record format, the reduction of arbitrary rotations to the
//! fundamental interval `[0, pi/4]`, and the CLI plumbing.

pub mod config;
pub mod normalize;
pub mod records;
pub mod render;
pub mod scan;

pub use config::AtlasConfig;
pub use normalize::{normalize, FrameMap, Normalized};
pub use records::{fmt_g12, RecordLine, Relabel, ScanFailure, ScanRecord, Verdict};
pub use scan::AtlasError;
