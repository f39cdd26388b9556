//! Exact Euclidean distance transform.
//!
//! Two separable passes of the lower-envelope-of-parabolas method over
//! squared distances: first along columns, then along rows. Distances are
//! measured between pixel centers, so all squared distances are integers and
//! are represented exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::BinaryMask;

/// Per-pixel Euclidean distance to the nearest set pixel of a seed mask.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGrid {
    width: u32,
    height: u32,
    distances: Vec<f64>,
}

impl DistanceGrid {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.distances[y as usize * self.width as usize + x as usize]
    }
}

/// Distance from every pixel to the nearest set pixel of `mask`.
///
/// Fails on an empty mask, where the distance is undefined.
pub fn distance_transform(mask: &BinaryMask) -> Result<DistanceGrid> {
    let sq = squared_distance_transform(mask).ok_or(Error::EmptyMask(
        "distance transform needs at least one seed pixel",
    ))?;
    Ok(DistanceGrid {
        width: mask.width(),
        height: mask.height(),
        distances: sq.into_iter().map(f64::sqrt).collect(),
    })
}

/// Squared distances, or `None` when the mask has no set pixel.
pub(crate) fn squared_distance_transform(mask: &BinaryMask) -> Option<Vec<f64>> {
    if mask.is_empty() {
        return None;
    }
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let mut grid: Vec<f64> = mask
        .bits()
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();

    // columns
    let mut col = vec![0.0; h];
    let mut out = vec![0.0; h];
    let mut env = Envelope::with_capacity(h);
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        env.transform(&col, &mut out);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }

    // rows; every row now has a finite entry in any column holding a seed
    grid.par_chunks_mut(w).for_each_init(
        || (Envelope::with_capacity(w), vec![0.0; w]),
        |(env, buf), row| {
            env.transform(row, buf);
            row.copy_from_slice(buf);
        },
    );
    Some(grid)
}

/// Scratch space for the 1-D squared distance transform.
struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    /// `out[q] = min_p (q - p)^2 + f[p]` over finite `f[p]`.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.sites.clear();
        self.bounds.clear();
        let parabola_key = |p: usize| f[p] + (p * p) as f64;

        for (q, fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            let mut boundary = f64::NEG_INFINITY;
            while let Some(&p) = self.sites.last() {
                let s = (parabola_key(q) - parabola_key(p)) / (2.0 * (q - p) as f64);
                if s <= *self.bounds.last().unwrap() {
                    self.sites.pop();
                    self.bounds.pop();
                } else {
                    boundary = s;
                    break;
                }
            }
            self.sites.push(q);
            self.bounds.push(boundary);
        }

        if self.sites.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while k + 1 < self.sites.len() && self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let p = self.sites[k];
            let dq = q.abs_diff(p) as f64;
            *o = dq * dq + f[p];
        }
    }
}
