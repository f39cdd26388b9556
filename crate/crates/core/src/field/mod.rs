//! Construction of the edit fidelity field: an edit core around the target
//! region, exponential decay with distance from that core, and protected
//! zones around every other text region where the weight is forced to zero.
//!
//! The three components combine as `smooth(max(core, decay) * protect)`,
//! after which protected pixels are reset to exactly `0.0`. "Background"
//! pixels are simply the far tail of the decay and are not modelled
//! separately.

mod build;
pub(crate) mod distance;
mod export;
mod smooth;

pub use self::build::{
    build_core, build_decay, build_field, build_field_plan, build_protect, FieldPlan, ProtectMask,
    SkippedRegion,
};
pub use self::distance::{distance_transform, DistanceGrid};
pub use self::export::{read_pfm, write_heatmap_png, write_pfm, write_profile_csv};
pub use self::smooth::{gaussian_kernel, gaussian_smooth};

use crate::error::{Error, Result};

/// Per-pixel fidelity weights in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityField {
    width: u32,
    height: u32,
    weights: Vec<f32>,
}

impl FidelityField {
    pub fn new(width: u32, height: u32, weights: Vec<f32>) -> Result<Self> {
        if weights.len() != width as usize * height as usize {
            return Err(Error::config(format!(
                "field of {width}x{height} needs {} weights, got {}",
                width as usize * height as usize,
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::config(format!("field weight {w} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            weights,
        })
    }

    pub fn constant(width: u32, height: u32, value: f32) -> Self {
        assert!((0.0..=1.0).contains(&value));
        Self {
            width,
            height,
            weights: vec![value; width as usize * height as usize],
        }
    }

    /// Wraps weights already known to lie in `[0, 1]`.
    pub(crate) fn from_raw(width: u32, height: u32, weights: Vec<f32>) -> Self {
        debug_assert_eq!(weights.len(), width as usize * height as usize);
        Self {
            width,
            height,
            weights,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.weights[y as usize * self.width as usize + x as usize]
    }

    /// Total weight, the "editable area" of the field.
    pub fn mass(&self) -> f64 {
        self.weights.iter().map(|&w| w as f64).sum()
    }

    pub fn row(&self, y: u32) -> &[f32] {
        let w = self.width as usize;
        &self.weights[y as usize * w..(y as usize + 1) * w]
    }
}
