//! Seeded synthetic scenes with known ground truth.
//!
//! Each scene is a plain background with `N` rectangular text blocks drawn
//! from a blocky 5x7 glyph pattern. An "edited" image is derived by applying
//! a per-region corruption plan, so the expected spillover of every region
//! is known exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{save_manifest, Quad, RasterImage, Role, SceneSpec, TextRegion};

const BLOCK_BG: [u8; 3] = [250, 250, 246];
const INK: [u8; 3] = [24, 28, 40];
const PLACEMENT_ATTEMPTS: usize = 2000;

/// What the synthetic editor does to one region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Corruption {
    Preserve,
    FillBlack,
    /// Moves region content by `(dx, dy)` inside the region, clamping at its edges.
    ShiftPixels {
        dx: i32,
        dy: i32,
    },
    /// Redraws the region with different text.
    RepaintText {
        text: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSceneSpec {
    pub scene_id: String,
    pub category: String,
    pub width: u32,
    pub height: u32,
    pub region_count: usize,
    /// Index of the region that becomes the edit target.
    pub target_index: usize,
    /// Minimum clearance between blocks and from the image border, pixels.
    pub gap: u32,
    /// Corruptions keyed by region id (`r0`, `r1`, ...); unlisted regions are preserved.
    pub plan: BTreeMap<String, Corruption>,
    /// Text the target should read after editing.
    pub target_text: Option<String>,
}

impl SyntheticSceneSpec {
    pub fn new(scene_id: &str, width: u32, height: u32, region_count: usize) -> Self {
        Self {
            scene_id: scene_id.to_string(),
            category: "synthetic".to_string(),
            width,
            height,
            region_count,
            target_index: 0,
            gap: 24,
            plan: BTreeMap::new(),
            target_text: None,
        }
    }

    pub fn region_id(index: usize) -> String {
        format!("r{index}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub scene: SceneSpec,
    pub source: RasterImage,
    pub edited: RasterImage,
}

#[derive(Clone, Copy, Debug)]
struct Block {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
}

impl Block {
    fn separated(&self, other: &Block, gap: u32) -> bool {
        self.x + self.w + gap <= other.x
            || other.x + other.w + gap <= self.x
            || self.y + self.h + gap <= other.y
            || other.y + other.h + gap <= self.y
    }

    fn quad(&self) -> Quad {
        Quad::rect(
            self.x as f64,
            self.y as f64,
            (self.x + self.w) as f64,
            (self.y + self.h) as f64,
        )
    }
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| char::from(b'A' + rng.random_range(0..26u8)))
        .collect()
}

/// 35-bit 5x7 glyph derived from the character code.
fn glyph_bits(ch: char) -> u64 {
    let mut z = (ch as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw_text(img: &mut RasterImage, block: &Block, text: &str) {
    for y in block.y..block.y + block.h {
        for x in block.x..block.x + block.w {
            img.put_pixel(x, y, BLOCK_BG);
        }
    }
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() || block.w <= 4 || block.h <= 4 {
        return;
    }
    let (tx, ty, tw, th) = (block.x + 2, block.y + 2, block.w - 4, block.h - 4);
    for py in 0..th {
        let gy = (py * 7 / th) as u64;
        for px in 0..tw {
            let idx = (px as usize * chars.len()) / tw as usize;
            let cell_start = (idx * tw as usize).div_ceil(chars.len()) as u32;
            let cell_end = ((idx + 1) * tw as usize).div_ceil(chars.len()) as u32;
            let cell_w = (cell_end - cell_start).max(1);
            let gx = (((px - cell_start.min(px)) * 5) / cell_w).min(4) as u64;
            if glyph_bits(chars[idx]) >> (gy * 5 + gx) & 1 == 1 {
                img.put_pixel(tx + px, ty + py, INK);
            }
        }
    }
}

fn apply(img: &mut RasterImage, block: &Block, corruption: &Corruption) {
    match corruption {
        Corruption::Preserve => {}
        Corruption::FillBlack => {
            for y in block.y..block.y + block.h {
                for x in block.x..block.x + block.w {
                    img.put_pixel(x, y, [0, 0, 0]);
                }
            }
        }
        Corruption::ShiftPixels { dx, dy } => {
            let before = img.clone();
            let clamp =
                |v: i64, lo: u32, len: u32| v.clamp(lo as i64, (lo + len - 1) as i64) as u32;
            for y in block.y..block.y + block.h {
                for x in block.x..block.x + block.w {
                    let sx = clamp(x as i64 - *dx as i64, block.x, block.w);
                    let sy = clamp(y as i64 - *dy as i64, block.y, block.h);
                    img.put_pixel(x, y, before.pixel(sx, sy));
                }
            }
        }
        Corruption::RepaintText { text } => draw_text(img, block, text),
    }
}

/// Renders one scene. Identical `spec` and `seed` give identical output.
pub fn generate_synthetic(spec: &SyntheticSceneSpec, seed: u64) -> Result<SyntheticScene> {
    if spec.region_count < 2 {
        return Err(Error::config("synthetic scenes need at least two regions"));
    }
    if spec.target_index >= spec.region_count {
        return Err(Error::config("target index outside region list"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shade = rng.random_range(170..=215u8);
    let mut source = RasterImage::filled(
        spec.width,
        spec.height,
        [shade, shade.saturating_add(6), shade.saturating_add(12)],
    )?;

    let mut blocks: Vec<Block> = Vec::with_capacity(spec.region_count);
    let mut texts = Vec::with_capacity(spec.region_count);
    for _ in 0..spec.region_count {
        let len = rng.random_range(3..=6usize);
        let cell = rng.random_range(7..=10u32);
        let (w, h) = (len as u32 * cell + 4, rng.random_range(16..=24u32));
        if w + 2 * spec.gap > spec.width || h + 2 * spec.gap > spec.height {
            return Err(Error::config(format!(
                "a {w}x{h} block does not fit in {}x{} with gap {}",
                spec.width, spec.height, spec.gap
            )));
        }
        let placed = (0..PLACEMENT_ATTEMPTS).find_map(|_| {
            let candidate = Block {
                x: rng.random_range(spec.gap..=spec.width - spec.gap - w),
                y: rng.random_range(spec.gap..=spec.height - spec.gap - h),
                w,
                h,
            };
            blocks
                .iter()
                .all(|b| b.separated(&candidate, spec.gap))
                .then_some(candidate)
        });
        let block = placed.ok_or_else(|| {
            Error::config(format!(
                "could not place {} non-overlapping regions in scene '{}'",
                spec.region_count, spec.scene_id
            ))
        })?;
        let text = random_word(&mut rng, len);
        draw_text(&mut source, &block, &text);
        blocks.push(block);
        texts.push(text);
    }

    let target_text = spec.target_text.clone().unwrap_or_else(|| {
        let mut word = random_word(&mut rng, texts[spec.target_index].len());
        while word == texts[spec.target_index] {
            word = random_word(&mut rng, word.len());
        }
        word
    });

    let mut edited = source.clone();
    let mut regions = Vec::with_capacity(spec.region_count);
    let mut edited_ocr = BTreeMap::new();
    for (i, (block, text)) in blocks.iter().zip(&texts).enumerate() {
        let id = SyntheticSceneSpec::region_id(i);
        let corruption = spec.plan.get(&id).unwrap_or(&Corruption::Preserve);
        apply(&mut edited, block, corruption);
        let out_text = match corruption {
            Corruption::Preserve | Corruption::ShiftPixels { .. } => text.clone(),
            Corruption::FillBlack => String::new(),
            Corruption::RepaintText { text } => text.clone(),
        };
        edited_ocr.insert(id.clone(), out_text);
        regions.push(TextRegion {
            id,
            quad: block.quad(),
            text: text.clone(),
            role: if i == spec.target_index {
                Role::Target
            } else {
                Role::NonTarget
            },
        });
    }

    let scene = SceneSpec {
        scene_id: spec.scene_id.clone(),
        category: spec.category.clone(),
        source_ref: format!("{}_src.png", spec.scene_id),
        regions,
        target_text,
        edited_ref: Some(format!("{}_edit.png", spec.scene_id)),
        edited_ocr: Some(edited_ocr),
    };
    scene.validate()?;
    Ok(SyntheticScene {
        scene,
        source,
        edited,
    })
}

/// How a generated corpus treats the regions that are not the edit target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpillPattern {
    /// Leave them untouched.
    None,
    /// Corrupt only the first non-target region.
    One,
    /// Corrupt every non-target region, cycling through fill, shift and repaint.
    #[default]
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub scenes: usize,
    pub regions_per_scene: usize,
    pub width: u32,
    pub height: u32,
    pub categories: Vec<String>,
    /// Repaint the target with its target text.
    pub edit_target: bool,
    pub spill: SpillPattern,
    pub gap: u32,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            scenes: 50,
            regions_per_scene: 4,
            width: 320,
            height: 240,
            categories: ["real", "app", "normal", "receipts"]
                .map(String::from)
                .to_vec(),
            edit_target: true,
            spill: SpillPattern::All,
            gap: 24,
        }
    }
}

impl CorpusSpec {
    /// Per-scene generator spec; scene `i` draws from its own seed stream.
    pub fn scene_spec(&self, index: usize, seed: u64) -> SyntheticSceneSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64 + 1);
        let mut spec = SyntheticSceneSpec::new(
            &format!("scene{index:03}"),
            self.width,
            self.height,
            self.regions_per_scene,
        );
        spec.category = if self.categories.is_empty() {
            "synthetic".to_string()
        } else {
            self.categories[index % self.categories.len()].clone()
        };
        spec.gap = self.gap;
        spec.target_index = rng.random_range(0..self.regions_per_scene.max(1));
        let target_text = random_word(&mut rng, 5);
        if self.edit_target {
            spec.plan.insert(
                SyntheticSceneSpec::region_id(spec.target_index),
                Corruption::RepaintText {
                    text: target_text.clone(),
                },
            );
        }
        spec.target_text = Some(target_text);
        let non_targets = (0..self.regions_per_scene).filter(|&i| i != spec.target_index);
        for (k, i) in non_targets.enumerate() {
            let corruption = match (self.spill, k % 3) {
                (SpillPattern::None, _) => continue,
                (SpillPattern::One, _) if k > 0 => continue,
                (_, 0) => Corruption::FillBlack,
                (_, 1) => Corruption::ShiftPixels { dx: 3, dy: 2 },
                _ => Corruption::RepaintText {
                    text: random_word(&mut rng, 4),
                },
            };
            spec.plan
                .insert(SyntheticSceneSpec::region_id(i), corruption);
        }
        spec
    }
}

pub fn generate_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<SyntheticScene>> {
    (0..spec.scenes)
        .map(|i| {
            let scene_seed = seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            generate_synthetic(&spec.scene_spec(i, seed), scene_seed)
        })
        .collect()
}

/// Writes images plus `manifest.json` into `dir`; returns the manifest path.
pub fn write_corpus(dir: &Path, scenes: &[SyntheticScene]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for s in scenes {
        s.source.save_png(&dir.join(&s.scene.source_ref))?;
        if let Some(edited) = &s.scene.edited_ref {
            s.edited.save_png(&dir.join(edited))?;
        }
    }
    let manifest = dir.join("manifest.json");
    let specs: Vec<SceneSpec> = scenes.iter().map(|s| s.scene.clone()).collect();
    save_manifest(&manifest, &specs)?;
    Ok(manifest)
}
