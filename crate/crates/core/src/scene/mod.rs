//! Domain types shared by every stage: images, region geometry, masks,
//! manifests and configuration.

mod config;
mod geometry;
mod image;
mod manifest;
mod mask;

pub use self::config::FieldConfig;
pub use self::geometry::{rasterize_quad, Point, Quad};
pub use self::image::{RasterImage, CHANNELS};
pub use self::manifest::{
    load_manifest, manifest_to_string, parse_manifest, save_manifest, Manifest, Role, SceneSpec,
    TextRegion,
};
pub use self::mask::{pad_mask, BinaryMask};
