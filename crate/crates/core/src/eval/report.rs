use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Version tag written into every JSON report and CSV header comment.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Where a region's post-edit text came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OcrMode {
    GroundTruth,
    External,
    Disabled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region_id: String,
    pub text_src: String,
    pub text_out: Option<String>,
    pub text_similarity: Option<f64>,
    pub region_psnr: f64,
    pub text_changed: Option<bool>,
    pub spillover: bool,
    pub ocr_mode: OcrMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneReport {
    pub scene_id: String,
    pub category: String,
    /// Absent when no text reading of the target region is available.
    pub target_found: Option<bool>,
    pub target_text_out: Option<String>,
    /// Absent when the scene has no evaluable non-target region.
    pub spill_rate: Option<f64>,
    pub flagged_regions: usize,
    pub evaluated_regions: usize,
    pub avg_region_psnr: Option<f64>,
    pub min_region_psnr: Option<f64>,
    /// Absent when text neighborhoods cover the whole image.
    pub bg_psnr: Option<f64>,
    pub region_reports: Vec<RegionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// How corpus spill rates weight scenes against each other.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpillWeighting {
    /// Every non-target region counts once.
    #[default]
    Region,
    /// Mean of per-scene spill rates.
    Scene,
}

/// One row of a corpus table, overall or per category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenes: usize,
    pub found_rate: Option<f64>,
    pub found_scenes: usize,
    pub found_defined: usize,
    pub spill_rate: Option<f64>,
    pub flagged_regions: usize,
    pub evaluated_regions: usize,
    pub avg_region_psnr: Option<f64>,
    /// Mean of per-scene minima.
    pub min_region_psnr: Option<f64>,
    pub bg_psnr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub weighting: SpillWeighting,
    pub overall: AggregateRow,
    pub categories: BTreeMap<String, AggregateRow>,
}
