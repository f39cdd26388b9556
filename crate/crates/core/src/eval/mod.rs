//! Per-region spillover quantification.
//!
//! Every non-target region is checked twice: its text is compared to the
//! source text (flagged below `sim_threshold`) and its pixels are compared by
//! PSNR (flagged below `psnr_threshold`). A region spills over when either
//! check flags it. Scene and corpus reports aggregate those flags.

mod export;
mod metrics;
mod report;

use std::collections::BTreeMap;

pub use self::export::{write_corpus_csv, write_region_csv, write_scene_csv};
pub use self::metrics::{region_psnr, text_similarity};
pub use self::report::{
    AggregateRow, CorpusReport, OcrMode, RegionReport, SceneReport, SpillWeighting,
    REPORT_SCHEMA_VERSION,
};

use crate::error::{Error, Result};
use crate::scene::{
    pad_mask, rasterize_quad, BinaryMask, FieldConfig, RasterImage, Role, SceneSpec, TextRegion,
};

/// Text read from an output image, keyed by region id.
#[derive(Clone, Debug, PartialEq)]
pub struct TextReadout {
    pub mode: OcrMode,
    pub texts: BTreeMap<String, String>,
}

/// Outcome of the two spillover checks for one region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpilloverDecision {
    pub text_changed: Option<bool>,
    pub spillover: bool,
}

/// Strict comparisons: similarity exactly at the threshold, or PSNR exactly
/// at the threshold, does not flag.
pub fn spillover_decision(
    similarity: Option<f64>,
    psnr: f64,
    config: &FieldConfig,
) -> SpilloverDecision {
    let text_changed = similarity.map(|s| s < config.sim_threshold);
    SpilloverDecision {
        text_changed,
        spillover: text_changed.unwrap_or(false) || psnr < config.psnr_threshold,
    }
}

pub fn classify_region(
    src: &RasterImage,
    out: &RasterImage,
    region: &TextRegion,
    out_text: Option<&str>,
    ocr_mode: OcrMode,
    config: &FieldConfig,
) -> Result<RegionReport> {
    if region.role != Role::NonTarget {
        return Err(Error::config(format!(
            "region '{}' is the edit target and is not checked for spillover",
            region.id
        )));
    }
    let mask = rasterize_quad(&region.quad, src.width(), src.height()).map_err(|e| match e {
        Error::DegenerateRegion { reason, .. } => Error::DegenerateRegion {
            region: region.id.clone(),
            reason,
        },
        other => other,
    })?;
    classify_masked(src, out, region, &mask, out_text, ocr_mode, config)
}

fn classify_masked(
    src: &RasterImage,
    out: &RasterImage,
    region: &TextRegion,
    mask: &BinaryMask,
    out_text: Option<&str>,
    ocr_mode: OcrMode,
    config: &FieldConfig,
) -> Result<RegionReport> {
    let psnr = region_psnr(src, out, mask, config.psnr_cap)?;
    let similarity = out_text.map(|t| text_similarity(&region.text, t));
    let decision = spillover_decision(similarity, psnr, config);
    Ok(RegionReport {
        region_id: region.id.clone(),
        text_src: region.text.clone(),
        text_out: out_text.map(str::to_string),
        text_similarity: similarity,
        region_psnr: psnr,
        text_changed: decision.text_changed,
        spillover: decision.spillover,
        ocr_mode: if out_text.is_some() {
            ocr_mode
        } else {
            OcrMode::Disabled
        },
    })
}

/// Evaluates one output image of a scene against its source.
///
/// Non-target regions that cannot be rasterized are skipped with a warning
/// and do not count towards the spill rate.
pub fn evaluate_scene(
    scene: &SceneSpec,
    src: &RasterImage,
    output: &RasterImage,
    config: &FieldConfig,
    readout: Option<&TextReadout>,
) -> Result<SceneReport> {
    src.ensure_same_dims(output)?;
    let (w, h) = src.dims();
    let mode = readout.map_or(OcrMode::Disabled, |r| r.mode);
    let text_of = |id: &str| readout.and_then(|r| r.texts.get(id)).map(String::as_str);

    let target = scene.target();
    let target_mask = rasterize_quad(&target.quad, w, h).map_err(|e| match e {
        Error::DegenerateRegion { reason, .. } => Error::DegenerateRegion {
            region: target.id.clone(),
            reason,
        },
        other => other,
    })?;
    let mut text_areas = pad_mask(&target_mask, config.pad_core);

    let mut warnings = Vec::new();
    let mut region_reports = Vec::new();
    for region in scene.non_targets() {
        let mask = match rasterize_quad(&region.quad, w, h) {
            Ok(m) => m,
            Err(e) => {
                warnings.push(format!("skipped region '{}': {e}", region.id));
                continue;
            }
        };
        text_areas.union_with(&pad_mask(&mask, config.pad_protect));
        region_reports.push(classify_masked(
            src,
            output,
            region,
            &mask,
            text_of(&region.id),
            mode,
            config,
        )?);
    }

    let evaluated = region_reports.len();
    let flagged = region_reports.iter().filter(|r| r.spillover).count();
    let psnrs: Vec<f64> = region_reports.iter().map(|r| r.region_psnr).collect();
    let background = text_areas.complement();
    let bg_psnr = if background.is_empty() {
        None
    } else {
        Some(region_psnr(src, output, &background, config.psnr_cap)?)
    };
    let target_text_out = text_of(&target.id).map(str::to_string);
    let target_found = target_text_out
        .as_deref()
        .map(|t| text_similarity(t, &scene.target_text) >= config.sim_threshold);

    Ok(SceneReport {
        scene_id: scene.scene_id.clone(),
        category: scene.category.clone(),
        target_found,
        target_text_out,
        spill_rate: (evaluated > 0).then(|| flagged as f64 / evaluated as f64),
        flagged_regions: flagged,
        evaluated_regions: evaluated,
        avg_region_psnr: mean(&psnrs),
        min_region_psnr: psnrs.iter().copied().reduce(f64::min),
        bg_psnr,
        region_reports,
        warnings,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn aggregate_rows<'a>(
    reports: impl Iterator<Item = &'a SceneReport> + Clone,
    weighting: SpillWeighting,
) -> AggregateRow {
    let scenes = reports.clone().count();
    let found_defined = reports.clone().filter(|r| r.target_found.is_some()).count();
    let found_scenes = reports
        .clone()
        .filter(|r| r.target_found == Some(true))
        .count();
    let flagged: usize = reports.clone().map(|r| r.flagged_regions).sum();
    let evaluated: usize = reports.clone().map(|r| r.evaluated_regions).sum();
    let collect = |f: fn(&SceneReport) -> Option<f64>| -> Vec<f64> {
        reports.clone().filter_map(f).collect()
    };
    let spill_rate = match weighting {
        SpillWeighting::Region => (evaluated > 0).then(|| flagged as f64 / evaluated as f64),
        SpillWeighting::Scene => mean(&collect(|r| r.spill_rate)),
    };
    AggregateRow {
        scenes,
        found_rate: (found_defined > 0).then(|| found_scenes as f64 / found_defined as f64),
        found_scenes,
        found_defined,
        spill_rate,
        flagged_regions: flagged,
        evaluated_regions: evaluated,
        avg_region_psnr: mean(&collect(|r| r.avg_region_psnr)),
        min_region_psnr: mean(&collect(|r| r.min_region_psnr)),
        bg_psnr: mean(&collect(|r| r.bg_psnr)),
    }
}

/// Corpus-wide and per-category aggregates of scene reports.
pub fn aggregate_corpus(
    reports: &[SceneReport],
    weighting: SpillWeighting,
) -> Result<CorpusReport> {
    if reports.is_empty() {
        return Err(Error::Missing("no scene reports to aggregate".into()));
    }
    let mut categories = BTreeMap::new();
    let names: std::collections::BTreeSet<&str> =
        reports.iter().map(|r| r.category.as_str()).collect();
    for name in names {
        let subset = reports.iter().filter(move |r| r.category == name);
        categories.insert(name.to_string(), aggregate_rows(subset, weighting));
    }
    Ok(CorpusReport {
        schema_version: REPORT_SCHEMA_VERSION,
        weighting,
        overall: aggregate_rows(reports.iter(), weighting),
        categories,
    })
}
