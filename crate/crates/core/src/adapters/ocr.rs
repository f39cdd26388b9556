use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::process::{run_captured, CommandSpec, DEFAULT_TIMEOUT};
use crate::error::{Error, Result};
use crate::eval::{region_psnr, OcrMode, TextReadout};
use crate::scene::{rasterize_quad, BinaryMask, Quad, RasterImage, Role, SceneSpec, TextRegion};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OcrBackendMode {
    /// Regions and texts come from the manifest.
    #[default]
    GroundTruth,
    ExternalCommand,
    Disabled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OcrBackend {
    pub mode: OcrBackendMode,
    pub command: Option<CommandSpec>,
    pub timeout: Duration,
    /// Detections with a lower confidence are dropped.
    pub confidence_floor: f64,
}

impl Default for OcrBackend {
    fn default() -> Self {
        Self {
            mode: OcrBackendMode::GroundTruth,
            command: None,
            timeout: DEFAULT_TIMEOUT,
            confidence_floor: 0.0,
        }
    }
}

impl OcrBackend {
    pub fn external(command: CommandSpec) -> Self {
        Self {
            mode: OcrBackendMode::ExternalCommand,
            command: Some(command),
            ..Default::default()
        }
    }

    pub fn disabled() -> Self {
        Self {
            mode: OcrBackendMode::Disabled,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == OcrBackendMode::ExternalCommand && self.command.is_none() {
            return Err(Error::config("external OCR mode requires a command"));
        }
        Ok(())
    }
}

/// One detection as emitted by an external OCR command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedRegion {
    pub id: String,
    pub text: String,
    pub quad: Quad,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct OcrWire {
    regions: Vec<DetectedRegion>,
}

pub fn parse_ocr_output(stdout: &str, confidence_floor: f64) -> Result<Vec<DetectedRegion>> {
    let wire: OcrWire = serde_json::from_str(stdout.trim()).map_err(|e| Error::Backend {
        message: format!("malformed OCR output: {e}"),
        stderr: String::new(),
    })?;
    Ok(wire
        .regions
        .into_iter()
        .filter(|r| r.confidence.is_none_or(|c| c >= confidence_floor))
        .collect())
}

fn run_ocr(backend: &OcrBackend, image_path: &Path) -> Result<Vec<DetectedRegion>> {
    let command = backend
        .command
        .as_ref()
        .ok_or_else(|| Error::config("external OCR mode requires a command"))?;
    let image = std::path::absolute(image_path)?;
    let image = image.to_string_lossy();
    let mut args: Vec<String> = command
        .args
        .iter()
        .map(|a| a.replace("{image}", &image))
        .collect();
    if !command.args.iter().any(|a| a.contains("{image}")) {
        args.push(image.into_owned());
    }
    let work = tempfile::tempdir()?;
    let out = run_captured(&command.program, &args, work.path(), backend.timeout)?;
    parse_ocr_output(&out.stdout, backend.confidence_floor).map_err(|e| match e {
        Error::Backend { message, .. } => Error::Backend {
            message,
            stderr: out.stderr.clone(),
        },
        other => other,
    })
}

/// Stage 1: the text regions of a scene's source image.
///
/// Ground truth returns the manifest regions verbatim. External detections
/// are returned with the `NonTarget` role; see [`assign_target`].
pub fn detect_text(
    backend: &OcrBackend,
    scene: &SceneSpec,
    image_path: &Path,
) -> Result<Vec<TextRegion>> {
    match backend.mode {
        OcrBackendMode::GroundTruth => Ok(scene.regions.clone()),
        OcrBackendMode::Disabled => Err(Error::config("text detection is disabled")),
        OcrBackendMode::ExternalCommand => Ok(run_ocr(backend, image_path)?
            .into_iter()
            .map(|d| TextRegion {
                id: d.id,
                quad: d.quad,
                text: d.text,
                role: Role::NonTarget,
            })
            .collect()),
    }
}

fn iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        inter += usize::from(x && y);
        union += usize::from(x || y);
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Index of the quad overlapping `mask` best, by intersection over union.
fn best_match<'a>(mask: &BinaryMask, candidates: impl Iterator<Item = &'a Quad>) -> Option<usize> {
    let (w, h) = mask.dims();
    let mut best: Option<(usize, f64)> = None;
    for (i, quad) in candidates.enumerate() {
        let Ok(m) = rasterize_quad(quad, w, h) else {
            continue;
        };
        let score = iou(mask, &m);
        if score > 0.0 && best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// Rebuilds `scene` around detected regions: the detection overlapping the
/// annotated target best becomes the target, all others are protected.
pub fn assign_target(
    scene: &SceneSpec,
    detected: Vec<TextRegion>,
    width: u32,
    height: u32,
) -> Result<SceneSpec> {
    let target = scene.target();
    let target_mask = rasterize_quad(&target.quad, width, height)?;
    let index = best_match(&target_mask, detected.iter().map(|r| &r.quad)).ok_or_else(|| {
        Error::validation(
            &scene.scene_id,
            "no detected region overlaps the edit target",
        )
    })?;
    let regions = detected
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.role = if i == index {
                Role::Target
            } else {
                Role::NonTarget
            };
            if i == index {
                r.id = target.id.clone();
            }
            r
        })
        .collect();
    let rebuilt = SceneSpec {
        regions,
        ..scene.clone()
    };
    rebuilt.validate()?;
    Ok(rebuilt)
}

/// Reads the text of every scene region on `output`.
///
/// Ground truth mode has no recognizer: a region identical to the source
/// reads as its source text, one identical to the edited image reads as the
/// manifest's `edited_ocr` entry, and a mixture reads as whichever of the
/// two it is closer to by PSNR (ties go to the source). Regions whose
/// edited text is unknown are left out.
///
/// External mode runs the OCR command on `output` and gives each region the
/// text of the best-overlapping detection, or the empty string if nothing
/// was detected there.
pub fn read_text(
    backend: &OcrBackend,
    scene: &SceneSpec,
    src: &RasterImage,
    edited: Option<&RasterImage>,
    output: &RasterImage,
) -> Result<Option<TextReadout>> {
    let (w, h) = src.dims();
    match backend.mode {
        OcrBackendMode::Disabled => Ok(None),
        OcrBackendMode::GroundTruth => {
            let mut texts = BTreeMap::new();
            for region in &scene.regions {
                let Ok(mask) = rasterize_quad(&region.quad, w, h) else {
                    continue;
                };
                let edited_text = scene
                    .edited_ocr
                    .as_ref()
                    .and_then(|m| m.get(&region.id))
                    .cloned();
                let from_src = region_psnr(src, output, &mask, f64::INFINITY)?;
                let text = if from_src.is_infinite() {
                    Some(region.text.clone())
                } else if let Some(edited) = edited {
                    let from_edit = region_psnr(edited, output, &mask, f64::INFINITY)?;
                    if from_edit > from_src {
                        edited_text
                    } else {
                        Some(region.text.clone())
                    }
                } else {
                    edited_text
                };
                if let Some(text) = text {
                    texts.insert(region.id.clone(), text);
                }
            }
            Ok(Some(TextReadout {
                mode: OcrMode::GroundTruth,
                texts,
            }))
        }
        OcrBackendMode::ExternalCommand => {
            let work = tempfile::tempdir()?;
            let path = work.path().join("output.png");
            output.save_png(&path)?;
            let detections = run_ocr(backend, &path)?;
            let mut texts = BTreeMap::new();
            for region in &scene.regions {
                let Ok(mask) = rasterize_quad(&region.quad, w, h) else {
                    continue;
                };
                let text = best_match(&mask, detections.iter().map(|d| &d.quad))
                    .map(|i| detections[i].text.clone())
                    .unwrap_or_default();
                texts.insert(region.id.clone(), text);
            }
            Ok(Some(TextReadout {
                mode: OcrMode::External,
                texts,
            }))
        }
    }
}
