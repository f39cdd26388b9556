use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{
    blend_and_evaluate, evaluate_baseline, prepare_scene, PipelineOptions, SceneError,
};
use crate::error::{Error, Result};
use crate::eval::{aggregate_corpus, AggregateRow, SceneReport, REPORT_SCHEMA_VERSION};
use crate::scene::{FieldConfig, Manifest};

/// Cartesian grid over decay rate and core padding; every other field
/// parameter comes from `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub sigma_values: Vec<f64>,
    pub pad_core_values: Vec<f64>,
    pub base: FieldConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_values.is_empty() || self.pad_core_values.is_empty() {
            return Err(Error::config("sweep value lists must be non-empty"));
        }
        for cfg in self.cells() {
            cfg.validate()?;
        }
        Ok(())
    }

    /// Configurations in row-major order: sigma outer, pad_core inner.
    pub fn cells(&self) -> Vec<FieldConfig> {
        self.sigma_values
            .iter()
            .flat_map(|&sigma| {
                self.pad_core_values
                    .iter()
                    .map(move |&pad_core| FieldConfig {
                        sigma,
                        pad_core,
                        ..self.base
                    })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub sigma: Option<f64>,
    pub pad_core: Option<f64>,
    pub aggregate: AggregateRow,
    /// Mean over scenes of the field's total weight.
    pub mean_field_mass: Option<f64>,
    pub errored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub schema_version: u32,
    pub rows: Vec<SweepRow>,
    pub errors: Vec<SceneError>,
}

impl SweepTable {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "schema_version",
            "method",
            "sigma",
            "pad_core",
            "scenes",
            "errored",
            "found_rate",
            "spill_rate",
            "avg_region_psnr",
            "min_region_psnr",
            "bg_psnr",
            "mean_field_mass",
        ])?;
        for r in &self.rows {
            w.write_record([
                self.schema_version.to_string(),
                r.method.clone(),
                opt(r.sigma),
                opt(r.pad_core),
                r.aggregate.scenes.to_string(),
                r.errored.to_string(),
                opt(r.aggregate.found_rate),
                opt(r.aggregate.spill_rate),
                opt(r.aggregate.avg_region_psnr),
                opt(r.aggregate.min_region_psnr),
                opt(r.aggregate.bg_psnr),
                opt(r.mean_field_mass),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn empty_row() -> AggregateRow {
    AggregateRow {
        scenes: 0,
        found_rate: None,
        found_scenes: 0,
        found_defined: 0,
        spill_rate: None,
        flagged_regions: 0,
        evaluated_regions: 0,
        avg_region_psnr: None,
        min_region_psnr: None,
        bg_psnr: None,
    }
}

/// Runs the pipeline once per grid cell. Each scene is edited once and the
/// edited image is reused across cells; a leading `baseline` row scores the
/// raw edits.
pub fn cmd_sweep(
    manifest: &Manifest,
    sweep: &SweepSpec,
    opts: &PipelineOptions,
) -> Result<SweepTable> {
    sweep.validate()?;
    opts.validate()?;
    let pool = opts.pool()?;
    let mut errors = Vec::new();

    let prepared: Vec<_> = pool.install(|| {
        manifest
            .scenes
            .par_iter()
            .map(|s| prepare_scene(s, &manifest.base_dir, opts))
            .collect()
    });
    let mut ready = Vec::new();
    for (scene, p) in manifest.scenes.iter().zip(prepared) {
        match p {
            Ok(p) => ready.push(p),
            Err(e) => errors.push(SceneError {
                scene_id: scene.scene_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let prepare_failures = errors.len();

    let mut rows = Vec::new();
    let baseline: Vec<Result<SceneReport>> = pool.install(|| {
        ready
            .par_iter()
            .map(|p| evaluate_baseline(p, opts))
            .collect()
    });
    let (base_ok, base_err) = split(baseline, &ready, &mut errors, "baseline");
    rows.push(SweepRow {
        method: "baseline".into(),
        sigma: None,
        pad_core: None,
        aggregate: aggregate_corpus(&base_ok, opts.weighting)
            .map(|c| c.overall)
            .unwrap_or_else(|_| empty_row()),
        mean_field_mass: None,
        errored: prepare_failures + base_err,
    });

    for cfg in sweep.cells() {
        let results: Vec<Result<(SceneReport, f64)>> = pool.install(|| {
            ready
                .par_iter()
                .map(|p| blend_and_evaluate(p, &cfg, opts).map(|b| (b.report, b.plan.field.mass())))
                .collect()
        });
        let label = format!("sigma={} pad_core={}", cfg.sigma, cfg.pad_core);
        let (ok, failed) = split(results, &ready, &mut errors, &label);
        let (reports, masses): (Vec<SceneReport>, Vec<f64>) = ok.into_iter().unzip();
        rows.push(SweepRow {
            method: "eff".into(),
            sigma: Some(cfg.sigma),
            pad_core: Some(cfg.pad_core),
            aggregate: aggregate_corpus(&reports, opts.weighting)
                .map(|c| c.overall)
                .unwrap_or_else(|_| empty_row()),
            mean_field_mass: (!masses.is_empty())
                .then(|| masses.iter().sum::<f64>() / masses.len() as f64),
            errored: prepare_failures + failed,
        });
    }
    Ok(SweepTable {
        schema_version: REPORT_SCHEMA_VERSION,
        rows,
        errors,
    })
}

fn split<T>(
    results: Vec<Result<T>>,
    ready: &[super::pipeline::PreparedScene],
    errors: &mut Vec<SceneError>,
    label: &str,
) -> (Vec<T>, usize) {
    let mut ok = Vec::new();
    let mut failed = 0;
    for (p, r) in ready.iter().zip(results) {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failed += 1;
                errors.push(SceneError {
                    scene_id: p.scene.scene_id.clone(),
                    reason: format!("{label}: {e}"),
                });
            }
        }
    }
    (ok, failed)
}
