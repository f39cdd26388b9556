use super::distance::{distance_transform, DistanceGrid};
use super::smooth::gaussian_smooth;
use super::FidelityField;
use crate::error::{Error, Result};
use crate::scene::{pad_mask, rasterize_quad, BinaryMask, FieldConfig, SceneSpec};

/// Padded target region; the field is 1 on every set pixel.
pub fn build_core(scene: &SceneSpec, pad_core: f64, width: u32, height: u32) -> Result<BinaryMask> {
    let target = scene.target();
    let raw = rasterize_quad(&target.quad, width, height).map_err(|e| match e {
        Error::DegenerateRegion { reason, .. } => Error::DegenerateRegion {
            region: target.id.clone(),
            reason,
        },
        other => other,
    })?;
    Ok(pad_mask(&raw, pad_core))
}

/// `exp(-d / (sigma * D))` with `D` the image diagonal.
pub fn build_decay(dist: &DistanceGrid, sigma: f64, width: u32, height: u32) -> FidelityField {
    assert!(sigma > 0.0, "decay rate must be positive");
    assert_eq!((dist.width(), dist.height()), (width, height));
    let diagonal = (width as f64).hypot(height as f64);
    let scale = sigma * diagonal;
    let weights = dist
        .distances()
        .iter()
        .map(|&d| (-d / scale).exp() as f32)
        .collect();
    FidelityField::from_raw(width, height, weights)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedRegion {
    pub region_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtectMask {
    /// Union of padded non-target regions.
    pub mask: BinaryMask,
    /// Non-target regions that could not be rasterized.
    pub skipped: Vec<SkippedRegion>,
}

/// Union of every padded non-target region. Degenerate regions are skipped
/// and reported rather than failing the whole field.
pub fn build_protect(scene: &SceneSpec, pad_protect: f64, width: u32, height: u32) -> ProtectMask {
    let mut mask = BinaryMask::new(width, height);
    let mut skipped = Vec::new();
    for region in scene.non_targets() {
        match rasterize_quad(&region.quad, width, height) {
            Ok(raw) => mask.union_with(&pad_mask(&raw, pad_protect)),
            Err(e) => skipped.push(SkippedRegion {
                region_id: region.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    ProtectMask { mask, skipped }
}

/// A field together with the masks it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPlan {
    pub field: FidelityField,
    pub core: BinaryMask,
    pub protect: ProtectMask,
}

pub fn build_field(
    scene: &SceneSpec,
    config: &FieldConfig,
    width: u32,
    height: u32,
) -> Result<FidelityField> {
    build_field_plan(scene, config, width, height).map(|p| p.field)
}

pub fn build_field_plan(
    scene: &SceneSpec,
    config: &FieldConfig,
    width: u32,
    height: u32,
) -> Result<FieldPlan> {
    config.validate()?;
    let core = build_core(scene, config.pad_core, width, height)?;
    let dist = distance_transform(&core)?;
    let decay = build_decay(&dist, config.sigma, width, height);
    let protect = build_protect(scene, config.pad_protect, width, height);

    let combined: Vec<f32> = core
        .bits()
        .iter()
        .zip(decay.weights())
        .zip(protect.mask.bits())
        .map(|((&in_core, &d), &locked)| {
            if locked {
                0.0
            } else if in_core {
                d.max(1.0)
            } else {
                d
            }
        })
        .collect();
    let smoothed = gaussian_smooth(
        &FidelityField::from_raw(width, height, combined),
        config.smooth_sigma,
    );

    let weights = smoothed
        .weights()
        .iter()
        .zip(protect.mask.bits())
        .map(|(&w, &locked)| if locked { 0.0 } else { w.clamp(0.0, 1.0) })
        .collect();
    Ok(FieldPlan {
        field: FidelityField::from_raw(width, height, weights),
        core,
        protect,
    })
}
