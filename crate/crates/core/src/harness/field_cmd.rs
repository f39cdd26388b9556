use std::path::PathBuf;

use super::pipeline::PipelineOptions;
use crate::adapters::{assign_target, detect_text, OcrBackendMode};
use crate::error::Result;
use crate::field::{build_field_plan, write_heatmap_png, write_pfm, write_profile_csv, FieldPlan};
use crate::scene::{Manifest, RasterImage};

/// Where `cmd_field` writes its files. Any of them may be omitted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldOutputs {
    pub pfm: Option<PathBuf>,
    pub heatmap: Option<PathBuf>,
    /// Cross-section CSV of the given row.
    pub profile: Option<(u32, PathBuf)>,
}

/// Builds the field of one scene and exports it.
pub fn cmd_field(
    manifest: &Manifest,
    scene_id: &str,
    opts: &PipelineOptions,
    outputs: &FieldOutputs,
) -> Result<FieldPlan> {
    opts.validate()?;
    let scene = manifest.scene(scene_id)?;
    let source_path = scene.source_path(&manifest.base_dir);
    let source = RasterImage::load_png(&source_path)?;
    let (w, h) = source.dims();
    let scene = match opts.ocr.mode {
        OcrBackendMode::ExternalCommand => {
            assign_target(scene, detect_text(&opts.ocr, scene, &source_path)?, w, h)?
        }
        _ => scene.clone(),
    };
    let plan = build_field_plan(&scene, &opts.config, w, h)?;
    for path in [
        &outputs.pfm,
        &outputs.heatmap,
        &outputs.profile.as_ref().map(|p| p.1.clone()),
    ]
    .into_iter()
    .flatten()
    {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
    }
    if let Some(path) = &outputs.pfm {
        write_pfm(&plan.field, path)?;
    }
    if let Some(path) = &outputs.heatmap {
        write_heatmap_png(&plan.field, path)?;
    }
    if let Some((row, path)) = &outputs.profile {
        write_profile_csv(&plan.field, *row, path)?;
    }
    Ok(plan)
}
