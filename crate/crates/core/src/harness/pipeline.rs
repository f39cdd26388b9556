use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapters::{
    assign_target, detect_text, read_text, run_editor, EditorBackend, OcrBackend, OcrBackendMode,
};
use crate::blend::{blend, resize_bilinear, ResizePolicy};
use crate::error::{Error, Result};
use crate::eval::{
    aggregate_corpus, evaluate_scene, write_corpus_csv, write_region_csv, write_scene_csv,
    CorpusReport, SceneReport, SpillWeighting, REPORT_SCHEMA_VERSION,
};
use crate::field::{build_field_plan, write_heatmap_png, write_pfm, FieldPlan};
use crate::scene::{FieldConfig, Manifest, RasterImage, SceneSpec};

/// Found-rate caveat carried in report metadata.
pub const FOUND_RATE_NOTE: &str = "found rate is measured by text recognition on the output \
and can undercount targets that read correctly to a human";

/// Everything that controls one run of the pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    pub config: FieldConfig,
    pub ocr: OcrBackend,
    pub editor: EditorBackend,
    pub resize: ResizePolicy,
    /// Maximum number of scenes processed concurrently; 0 uses all cores.
    pub jobs: usize,
    pub weighting: SpillWeighting,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            config: FieldConfig::default(),
            ocr: OcrBackend::default(),
            editor: EditorBackend::default(),
            resize: ResizePolicy::Strict,
            jobs: 0,
            weighting: SpillWeighting::Region,
        }
    }
}

impl PipelineOptions {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.ocr.validate()?;
        self.editor.validate()
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
    }
}

/// Stage 1 and the inputs every later stage needs for one scene.
pub(crate) struct PreparedScene {
    /// Scene with regions as seen by the detector.
    pub scene: SceneSpec,
    pub source: RasterImage,
    /// Editor output, resampled to the source size when allowed.
    pub edited: RasterImage,
}

pub(crate) fn prepare_scene(
    scene: &SceneSpec,
    base_dir: &Path,
    opts: &PipelineOptions,
) -> Result<PreparedScene> {
    let source_path = scene.source_path(base_dir);
    let source = RasterImage::load_png(&source_path)?;
    let (w, h) = source.dims();
    let detected = match opts.ocr.mode {
        OcrBackendMode::ExternalCommand => {
            let regions = detect_text(&opts.ocr, scene, &source_path)?;
            assign_target(scene, regions, w, h)?
        }
        _ => scene.clone(),
    };
    let mut edited = run_editor(&opts.editor, scene, base_dir)?;
    if edited.dims() != source.dims() {
        match opts.resize {
            ResizePolicy::Strict => {
                return Err(Error::DimensionMismatch {
                    expected: source.dims(),
                    actual: edited.dims(),
                })
            }
            ResizePolicy::Bilinear => edited = resize_bilinear(&edited, w, h),
        }
    }
    Ok(PreparedScene {
        scene: detected,
        source,
        edited,
    })
}

/// Stages 2, 4 and evaluation for one field configuration.
pub(crate) struct BlendedScene {
    pub plan: FieldPlan,
    pub output: RasterImage,
    pub report: SceneReport,
}

pub(crate) fn blend_and_evaluate(
    prepared: &PreparedScene,
    config: &FieldConfig,
    opts: &PipelineOptions,
) -> Result<BlendedScene> {
    let (w, h) = prepared.source.dims();
    let plan = build_field_plan(&prepared.scene, config, w, h)?;
    let output = blend(
        &prepared.source,
        &prepared.edited,
        &plan.field,
        ResizePolicy::Strict,
    )?;
    let readout = read_text(
        &opts.ocr,
        &prepared.scene,
        &prepared.source,
        Some(&prepared.edited),
        &output,
    )?;
    let mut report = evaluate_scene(
        &prepared.scene,
        &prepared.source,
        &output,
        config,
        readout.as_ref(),
    )?;
    report.warnings.extend(
        plan.protect
            .skipped
            .iter()
            .map(|s| format!("region '{}' not protected: {}", s.region_id, s.reason)),
    );
    Ok(BlendedScene {
        plan,
        output,
        report,
    })
}

pub(crate) fn evaluate_baseline(
    prepared: &PreparedScene,
    opts: &PipelineOptions,
) -> Result<SceneReport> {
    let readout = read_text(
        &opts.ocr,
        &prepared.scene,
        &prepared.source,
        Some(&prepared.edited),
        &prepared.edited,
    )?;
    evaluate_scene(
        &prepared.scene,
        &prepared.source,
        &prepared.edited,
        &opts.config,
        readout.as_ref(),
    )
}

/// Reports for one scene: the blended output and the raw editor output,
/// both produced from a single editor invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneOutcome {
    pub scene_id: String,
    pub eff: SceneReport,
    pub baseline: SceneReport,
    pub field_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneError {
    pub scene_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: FieldConfig,
    pub eff: Option<CorpusReport>,
    pub baseline: Option<CorpusReport>,
    pub scenes: Vec<SceneOutcome>,
    pub errors: Vec<SceneError>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Per-scene output locations inside a run directory.
pub fn scene_dir(out_dir: &Path, scene_id: &str) -> PathBuf {
    out_dir.join("scenes").join(scene_id)
}

fn run_scene(
    scene: &SceneSpec,
    manifest: &Manifest,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<SceneOutcome> {
    let prepared = prepare_scene(scene, &manifest.base_dir, opts)?;
    let blended = blend_and_evaluate(&prepared, &opts.config, opts)?;
    let baseline = evaluate_baseline(&prepared, opts)?;
    let outcome = SceneOutcome {
        scene_id: scene.scene_id.clone(),
        eff: blended.report,
        baseline,
        field_mass: blended.plan.field.mass(),
    };

    let dir = scene_dir(out_dir, &scene.scene_id);
    std::fs::create_dir_all(&dir)?;
    blended.output.save_png(&dir.join("output.png"))?;
    write_pfm(&blended.plan.field, &dir.join("field.pfm"))?;
    write_heatmap_png(&blended.plan.field, &dir.join("field.png"))?;
    let mut json = serde_json::to_string_pretty(&outcome)?;
    json.push('\n');
    std::fs::write(dir.join("report.json"), json)?;
    Ok(outcome)
}

/// Runs detect, field, edit, blend and evaluate over every scene of the
/// manifest, writing per-scene outputs and corpus reports under `out_dir`.
///
/// Failures are scene-scoped: they are recorded in the report and the run
/// continues.
pub fn cmd_run(manifest: &Manifest, opts: &PipelineOptions, out_dir: &Path) -> Result<RunReport> {
    opts.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let results: Vec<Result<SceneOutcome>> = opts.pool()?.install(|| {
        manifest
            .scenes
            .par_iter()
            .map(|scene| run_scene(scene, manifest, opts, out_dir))
            .collect()
    });

    let mut scenes = Vec::new();
    let mut errors = Vec::new();
    for (scene, result) in manifest.scenes.iter().zip(results) {
        match result {
            Ok(outcome) => scenes.push(outcome),
            Err(e) => errors.push(SceneError {
                scene_id: scene.scene_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let eff_reports: Vec<SceneReport> = scenes.iter().map(|s| s.eff.clone()).collect();
    let base_reports: Vec<SceneReport> = scenes.iter().map(|s| s.baseline.clone()).collect();
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: opts.config,
        eff: aggregate_corpus(&eff_reports, opts.weighting).ok(),
        baseline: aggregate_corpus(&base_reports, opts.weighting).ok(),
        scenes,
        errors,
        notes: vec![FOUND_RATE_NOTE.to_string()],
    };
    write_run_outputs(&report, out_dir)?;
    Ok(report)
}

fn write_run_outputs(report: &RunReport, out_dir: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    std::fs::write(out_dir.join("report.json"), json)?;

    let rows: Vec<(&str, &SceneReport)> = report
        .scenes
        .iter()
        .flat_map(|s| [("baseline", &s.baseline), ("eff", &s.eff)])
        .collect();
    write_scene_csv(std::fs::File::create(out_dir.join("scenes.csv"))?, &rows)?;
    write_region_csv(std::fs::File::create(out_dir.join("regions.csv"))?, &rows)?;
    let corpora: Vec<(&str, &CorpusReport)> =
        [("baseline", &report.baseline), ("eff", &report.eff)]
            .into_iter()
            .filter_map(|(m, c)| c.as_ref().map(|c| (m, c)))
            .collect();
    write_corpus_csv(std::fs::File::create(out_dir.join("corpus.csv"))?, &corpora)?;
    Ok(())
}
