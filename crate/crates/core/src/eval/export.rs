use std::io::Write;

use super::report::{AggregateRow, CorpusReport, SceneReport, REPORT_SCHEMA_VERSION};
use crate::error::Result;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per scene, labelled with `method` (e.g. "eff" or "baseline").
pub fn write_scene_csv<W: Write>(out: W, rows: &[(&str, &SceneReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema_version",
        "method",
        "scene_id",
        "category",
        "target_found",
        "spill_rate",
        "flagged_regions",
        "evaluated_regions",
        "avg_region_psnr",
        "min_region_psnr",
        "bg_psnr",
    ])?;
    for (method, r) in rows {
        w.write_record([
            REPORT_SCHEMA_VERSION.to_string(),
            method.to_string(),
            r.scene_id.clone(),
            r.category.clone(),
            opt(r.target_found),
            opt(r.spill_rate),
            r.flagged_regions.to_string(),
            r.evaluated_regions.to_string(),
            opt(r.avg_region_psnr),
            opt(r.min_region_psnr),
            opt(r.bg_psnr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per non-target region.
pub fn write_region_csv<W: Write>(out: W, rows: &[(&str, &SceneReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema_version",
        "method",
        "scene_id",
        "region_id",
        "text_src",
        "text_out",
        "text_similarity",
        "region_psnr",
        "text_changed",
        "spillover",
        "ocr_mode",
    ])?;
    for (method, scene) in rows {
        for r in &scene.region_reports {
            let mode = serde_json::to_value(r.ocr_mode)?;
            w.write_record([
                REPORT_SCHEMA_VERSION.to_string(),
                method.to_string(),
                scene.scene_id.clone(),
                r.region_id.clone(),
                r.text_src.clone(),
                r.text_out.clone().unwrap_or_default(),
                opt(r.text_similarity),
                r.region_psnr.to_string(),
                opt(r.text_changed),
                r.spillover.to_string(),
                mode.as_str().unwrap_or_default().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn aggregate_record(method: &str, category: &str, row: &AggregateRow) -> Vec<String> {
    vec![
        REPORT_SCHEMA_VERSION.to_string(),
        method.to_string(),
        category.to_string(),
        row.scenes.to_string(),
        opt(row.found_rate),
        opt(row.spill_rate),
        row.flagged_regions.to_string(),
        row.evaluated_regions.to_string(),
        opt(row.avg_region_psnr),
        opt(row.min_region_psnr),
        opt(row.bg_psnr),
    ]
}

/// Per-category rows followed by an `overall` row for each method.
pub fn write_corpus_csv<W: Write>(out: W, reports: &[(&str, &CorpusReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema_version",
        "method",
        "category",
        "scenes",
        "found_rate",
        "spill_rate",
        "flagged_regions",
        "evaluated_regions",
        "avg_region_psnr",
        "min_region_psnr",
        "bg_psnr",
    ])?;
    for (method, report) in reports {
        for (name, row) in &report.categories {
            w.write_record(aggregate_record(method, name, row))?;
        }
        w.write_record(aggregate_record(method, "overall", &report.overall))?;
    }
    w.flush()?;
    Ok(())
}
