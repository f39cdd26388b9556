//! Scene manifests: the JSON document describing a benchmark corpus.
//!
//! ```json
//! {"scenes": [{
//!   "scene_id": "s0", "category": "real",
//!   "source": "s0_src.png", "edited": "s0_edit.png",
//!   "target_region_id": "r0", "target_text": "Entrance",
//!   "regions": [{"id": "r0", "text": "Exit", "quad": [[10,10],[60,10],[60,30],[10,30]]}],
//!   "edited_ocr": {"r0": "Entrance"}
//! }]}
//! ```
//!
//! Image paths are resolved relative to the manifest's directory. Images are
//! not opened while loading.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::geometry::Quad;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Target,
    NonTarget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextRegion {
    pub id: String,
    pub quad: Quad,
    /// Text recognized on the source image.
    pub text: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub scene_id: String,
    pub category: String,
    pub source_ref: String,
    pub regions: Vec<TextRegion>,
    /// Text the target region should read after editing.
    pub target_text: String,
    pub edited_ref: Option<String>,
    /// Ground-truth text of each region on the edited image.
    pub edited_ocr: Option<BTreeMap<String, String>>,
}

impl SceneSpec {
    pub fn target(&self) -> &TextRegion {
        self.regions
            .iter()
            .find(|r| r.role == Role::Target)
            .expect("validated scene has a target region")
    }

    pub fn non_targets(&self) -> impl Iterator<Item = &TextRegion> {
        self.regions.iter().filter(|r| r.role == Role::NonTarget)
    }

    pub fn region(&self, id: &str) -> Option<&TextRegion> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::validation(&self.scene_id, "scene has no regions"));
        }
        let mut seen = HashSet::new();
        for r in &self.regions {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::validation(
                    &self.scene_id,
                    format!("duplicate region id '{}'", r.id),
                ));
            }
            if !r.quad.is_finite() {
                return Err(Error::validation(
                    &self.scene_id,
                    format!("region '{}' has a non-finite vertex", r.id),
                ));
            }
        }
        let targets = self
            .regions
            .iter()
            .filter(|r| r.role == Role::Target)
            .count();
        if targets != 1 {
            return Err(Error::validation(
                &self.scene_id,
                format!("expected exactly one target region, found {targets}"),
            ));
        }
        Ok(())
    }

    pub fn source_path(&self, base_dir: &Path) -> PathBuf {
        base_dir.join(&self.source_ref)
    }

    pub fn edited_path(&self, base_dir: &Path) -> Option<PathBuf> {
        self.edited_ref.as_ref().map(|e| base_dir.join(e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    /// Directory image references are resolved against.
    pub base_dir: PathBuf,
    pub scenes: Vec<SceneSpec>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let scenes = parse_manifest(&text)?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self { base_dir, scenes })
    }

    pub fn scene(&self, scene_id: &str) -> Result<&SceneSpec> {
        self.scenes
            .iter()
            .find(|s| s.scene_id == scene_id)
            .ok_or_else(|| Error::UnknownScene(scene_id.to_string()))
    }
}

pub fn load_manifest(path: &Path) -> Result<Vec<SceneSpec>> {
    Manifest::load(path).map(|m| m.scenes)
}

pub fn save_manifest(path: &Path, scenes: &[SceneSpec]) -> Result<()> {
    std::fs::write(path, manifest_to_string(scenes)?)?;
    Ok(())
}

pub fn manifest_to_string(scenes: &[SceneSpec]) -> Result<String> {
    let doc = ManifestDoc {
        scenes: scenes.iter().map(SceneDoc::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_manifest(text: &str) -> Result<Vec<SceneSpec>> {
    let doc: ManifestDoc = serde_json::from_str(text).map_err(|e| Error::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut ids = HashSet::new();
    let mut scenes = Vec::with_capacity(doc.scenes.len());
    for s in doc.scenes {
        if !ids.insert(s.scene_id.clone()) {
            return Err(Error::validation(&s.scene_id, "duplicate scene_id"));
        }
        scenes.push(s.into_spec()?);
    }
    Ok(scenes)
}

#[derive(Serialize, Deserialize)]
struct ManifestDoc {
    scenes: Vec<SceneDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    scene_id: String,
    category: String,
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edited: Option<String>,
    target_region_id: String,
    target_text: String,
    regions: Vec<RegionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edited_ocr: Option<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
struct RegionDoc {
    id: String,
    text: String,
    quad: Quad,
}

impl SceneDoc {
    fn into_spec(self) -> Result<SceneSpec> {
        let targets = self
            .regions
            .iter()
            .filter(|r| r.id == self.target_region_id)
            .count();
        if targets == 0 {
            return Err(Error::validation(
                &self.scene_id,
                format!(
                    "target_region_id '{}' does not name a region",
                    self.target_region_id
                ),
            ));
        }
        let regions = self
            .regions
            .into_iter()
            .map(|r| TextRegion {
                role: if r.id == self.target_region_id {
                    Role::Target
                } else {
                    Role::NonTarget
                },
                id: r.id,
                quad: r.quad,
                text: r.text,
            })
            .collect();
        let spec = SceneSpec {
            scene_id: self.scene_id,
            category: self.category,
            source_ref: self.source,
            regions,
            target_text: self.target_text,
            edited_ref: self.edited,
            edited_ocr: self.edited_ocr,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&SceneSpec> for SceneDoc {
    fn from(s: &SceneSpec) -> Self {
        SceneDoc {
            scene_id: s.scene_id.clone(),
            category: s.category.clone(),
            source: s.source_ref.clone(),
            edited: s.edited_ref.clone(),
            target_region_id: s.target().id.clone(),
            target_text: s.target_text.clone(),
            regions: s
                .regions
                .iter()
                .map(|r| RegionDoc {
                    id: r.id.clone(),
                    text: r.text.clone(),
                    quad: r.quad,
                })
                .collect(),
            edited_ocr: s.edited_ocr.clone(),
        }
    }
}
