//! Field-guided blending in pixel space:
//! `out = src * (1 - w) + edited * w` per pixel and channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FidelityField;
use crate::scene::{RasterImage, CHANNELS};

/// What to do when the edited image does not match the source resolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResizePolicy {
    /// Reject mismatched dimensions.
    #[default]
    Strict,
    /// Resample the edited image to the source size first.
    Bilinear,
}

pub fn blend(
    src: &RasterImage,
    edited: &RasterImage,
    field: &FidelityField,
    policy: ResizePolicy,
) -> Result<RasterImage> {
    if field.dims() != src.dims() {
        return Err(Error::DimensionMismatch {
            expected: src.dims(),
            actual: field.dims(),
        });
    }
    let resized;
    let edited = if edited.dims() == src.dims() {
        edited
    } else {
        match policy {
            ResizePolicy::Strict => {
                return Err(Error::DimensionMismatch {
                    expected: src.dims(),
                    actual: edited.dims(),
                })
            }
            ResizePolicy::Bilinear => {
                resized = resize_bilinear(edited, src.width(), src.height());
                &resized
            }
        }
    };

    let mut out = Vec::with_capacity(src.data().len());
    for ((s, e), &w) in src
        .data()
        .chunks_exact(CHANNELS)
        .zip(edited.data().chunks_exact(CHANNELS))
        .zip(field.weights())
    {
        if w == 0.0 {
            out.extend_from_slice(s);
        } else if w == 1.0 {
            out.extend_from_slice(e);
        } else {
            for c in 0..CHANNELS {
                let v = s[c] as f32 * (1.0 - w) + e[c] as f32 * w;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(src.width(), src.height(), out)
}

/// Bilinear resampling with half-pixel-centered coordinates and clamped
/// borders. Returns a copy when the size is unchanged.
pub fn resize_bilinear(img: &RasterImage, width: u32, height: u32) -> RasterImage {
    assert!(
        width >= 1 && height >= 1,
        "target dimensions must be positive"
    );
    if img.dims() == (width, height) {
        return img.clone();
    }
    let (sw, sh) = (img.width() as f64, img.height() as f64);
    let axis = |dst: u32, src_len: f64, dst_len: u32| -> (usize, usize, f64) {
        let pos = ((dst as f64 + 0.5) * src_len / dst_len as f64 - 0.5).clamp(0.0, src_len - 1.0);
        let lo = pos.floor();
        let hi = (lo + 1.0).min(src_len - 1.0);
        (lo as usize, hi as usize, pos - lo)
    };
    let xs: Vec<_> = (0..width).map(|x| axis(x, sw, width)).collect();
    let stride = img.width() as usize * CHANNELS;
    let data = img.data();
    let mut out = Vec::with_capacity(width as usize * height as usize * CHANNELS);
    for y in 0..height {
        let (y0, y1, fy) = axis(y, sh, height);
        for &(x0, x1, fx) in &xs {
            for c in 0..CHANNELS {
                let at = |xx: usize, yy: usize| data[yy * stride + xx * CHANNELS + c] as f64;
                let top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
                let bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(width, height, out).expect("resized buffer has the requested size")
}
