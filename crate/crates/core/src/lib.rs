//! Edit fidelity fields for scene text editing.
//!
//! Given a source image, its text regions and an externally edited image,
//! this crate builds a per-pixel fidelity field (editable around the target
//! text, decaying with distance, locked to zero on every other text region),
//! blends the two images through it, and measures how much each non-target
//! region was changed.
//!
//! The pipeline is `detect -> build field -> edit -> blend -> evaluate`; see
//! [`harness`] for the corpus-level drivers.

pub mod adapters;
pub mod blend;
pub mod error;
pub mod eval;
pub mod field;
pub mod harness;
pub mod scene;

pub use error::{Error, Result};
