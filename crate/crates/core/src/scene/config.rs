use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field construction and evaluation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Decay rate relative to the image diagonal.
    pub sigma: f64,
    /// Padding of the target region (edit core), pixels.
    pub pad_core: f64,
    /// Padding of each non-target region (protected zone), pixels.
    pub pad_protect: f64,
    /// Standard deviation of the smoothing Gaussian, pixels.
    pub smooth_sigma: f64,
    /// Text similarity below this marks a region's text as changed.
    pub sim_threshold: f64,
    /// Region PSNR below this (dB) marks a region as modified.
    pub psnr_threshold: f64,
    /// PSNR reported for identical content, and the upper bound of any PSNR.
    pub psnr_cap: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            sigma: 0.12,
            pad_core: 15.0,
            pad_protect: 8.0,
            smooth_sigma: 3.0,
            sim_threshold: 0.85,
            psnr_threshold: 35.0,
            psnr_cap: 150.0,
        }
    }
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.sigma,
            self.pad_core,
            self.pad_protect,
            self.smooth_sigma,
            self.sim_threshold,
            self.psnr_threshold,
            self.psnr_cap,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("field parameters must be finite"));
        }
        if self.sigma <= 0.0 {
            return Err(Error::config(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if self.pad_core < 0.0 || self.pad_protect < 0.0 {
            return Err(Error::config("paddings must be >= 0"));
        }
        if self.smooth_sigma < 0.0 {
            return Err(Error::config("smooth_sigma must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.sim_threshold) {
            return Err(Error::config("sim_threshold must lie in [0, 1]"));
        }
        if self.psnr_cap <= self.psnr_threshold {
            return Err(Error::config("psnr_cap must exceed psnr_threshold"));
        }
        Ok(())
    }
}
