use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{scene_dir, PipelineOptions, SceneError, FOUND_RATE_NOTE};
use crate::adapters::read_text;
use crate::error::{Error, Result};
use crate::eval::{
    aggregate_corpus, evaluate_scene, write_corpus_csv, write_region_csv, write_scene_csv,
    CorpusReport, SceneReport, REPORT_SCHEMA_VERSION,
};
use crate::scene::{FieldConfig, Manifest, RasterImage, SceneSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub corpus: Option<CorpusReport>,
    pub scenes: Vec<SceneReport>,
    pub errors: Vec<SceneError>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Output image for a scene: `<dir>/<scene_id>.png`, or the layout written
/// by a pipeline run, `<dir>/scenes/<scene_id>/output.png`.
pub fn locate_output(outputs_dir: &Path, scene_id: &str) -> Option<PathBuf> {
    [
        outputs_dir.join(format!("{scene_id}.png")),
        scene_dir(outputs_dir, scene_id).join("output.png"),
    ]
    .into_iter()
    .find(|p| p.is_file())
}

fn eval_scene(
    scene: &SceneSpec,
    manifest: &Manifest,
    outputs_dir: &Path,
    opts: &PipelineOptions,
) -> Result<SceneReport> {
    let path = locate_output(outputs_dir, &scene.scene_id)
        .ok_or_else(|| Error::Missing(format!("no output image for scene '{}'", scene.scene_id)))?;
    let output = RasterImage::load_png(&path)?;
    let source = RasterImage::load_png(&scene.source_path(&manifest.base_dir))?;
    let edited = scene
        .edited_path(&manifest.base_dir)
        .and_then(|p| RasterImage::load_png(&p).ok())
        .filter(|e| e.dims() == source.dims());
    let readout = read_text(&opts.ocr, scene, &source, edited.as_ref(), &output)?;
    evaluate_scene(scene, &source, &output, &opts.config, readout.as_ref())
}

/// Scores existing output images (from any method) against the manifest's
/// sources. Missing outputs are listed as errors; the rest are still scored.
pub fn cmd_eval(
    manifest: &Manifest,
    outputs_dir: &Path,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<EvalReport> {
    opts.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let results: Vec<Result<SceneReport>> = opts.pool()?.install(|| {
        manifest
            .scenes
            .par_iter()
            .map(|s| eval_scene(s, manifest, outputs_dir, opts))
            .collect()
    });
    let mut scenes = Vec::new();
    let mut errors = Vec::new();
    for (scene, r) in manifest.scenes.iter().zip(results) {
        match r {
            Ok(report) => scenes.push(report),
            Err(e) => errors.push(SceneError {
                scene_id: scene.scene_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let report = EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: opts.config,
        corpus: aggregate_corpus(&scenes, opts.weighting).ok(),
        scenes,
        errors,
        notes: vec![FOUND_RATE_NOTE.to_string()],
    };

    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(out_dir.join("eval_report.json"), json)?;
    let rows: Vec<(&str, &SceneReport)> = report.scenes.iter().map(|s| ("eval", s)).collect();
    write_scene_csv(
        std::fs::File::create(out_dir.join("eval_scenes.csv"))?,
        &rows,
    )?;
    write_region_csv(
        std::fs::File::create(out_dir.join("eval_regions.csv"))?,
        &rows,
    )?;
    if let Some(corpus) = &report.corpus {
        write_corpus_csv(
            std::fs::File::create(out_dir.join("eval_corpus.csv"))?,
            &[("eval", corpus)],
        )?;
    }
    Ok(report)
}
