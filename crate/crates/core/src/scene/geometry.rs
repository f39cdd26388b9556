use serde::{Deserialize, Serialize};

use super::mask::BinaryMask;
use crate::error::{Error, Result};

/// Tolerance used when deciding whether a pixel center lies on a polygon edge.
const EDGE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Quadrilateral text region outline in pixel coordinates, vertices in
/// consistent winding order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quad(pub [Point; 4]);

impl Quad {
    pub fn new(points: [[f64; 2]; 4]) -> Self {
        Quad(points.map(Point::from))
    }

    /// Axis-aligned rectangle spanning `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Quad::new([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    pub fn points(&self) -> &[Point; 4] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|p| p.x.is_finite() && p.y.is_finite())
    }

    /// Flattened `x1,y1,...,x4,y4` form used on command lines.
    pub fn to_flat(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (i, p) in self.0.iter().enumerate() {
            out[2 * i] = p.x;
            out[2 * i + 1] = p.y;
        }
        out
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.0)
    }
}

pub(crate) fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum();
    (twice * 0.5).abs()
}

/// Sutherland-Hodgman clip of `poly` against the rectangle `[0, w] x [0, h]`.
fn clip_to_rect(poly: &[Point], w: f64, h: f64) -> Vec<Point> {
    // (inside test, intersection along that boundary)
    type Inside = fn(Point, f64, f64) -> bool;
    type Cross = fn(Point, Point, f64, f64) -> Point;
    let planes: [(Inside, Cross); 4] = [
        (|p, _, _| p.x >= 0.0, |a, b, _, _| lerp_at_x(a, b, 0.0)),
        (|p, w, _| p.x <= w, |a, b, w, _| lerp_at_x(a, b, w)),
        (|p, _, _| p.y >= 0.0, |a, b, _, _| lerp_at_y(a, b, 0.0)),
        (|p, _, h| p.y <= h, |a, b, _, h| lerp_at_y(a, b, h)),
    ];

    let mut out = poly.to_vec();
    for (inside, cross) in planes {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let cur_in = inside(cur, w, h);
            let prev_in = inside(prev, w, h);
            if cur_in {
                if !prev_in {
                    out.push(cross(prev, cur, w, h));
                }
                out.push(cur);
            } else if prev_in {
                out.push(cross(prev, cur, w, h));
            }
        }
    }
    out
}

fn lerp_at_x(a: Point, b: Point, x: f64) -> Point {
    let t = (x - a.x) / (b.x - a.x);
    Point::new(x, a.y + t * (b.y - a.y))
}

fn lerp_at_y(a: Point, b: Point, y: f64) -> Point {
    let t = (y - a.y) / (b.y - a.y);
    Point::new(a.x + t * (b.x - a.x), y)
}

/// Rasterizes `quad` onto a `width x height` grid.
///
/// A pixel `(i, j)` is set when its center `(i + 0.5, j + 0.5)` lies inside
/// the quad (even-odd rule) or on its boundary. The quad is clipped to the
/// image first; a clip result with no area is reported as degenerate.
pub fn rasterize_quad(quad: &Quad, width: u32, height: u32) -> Result<BinaryMask> {
    let degenerate = |reason: &str| Error::DegenerateRegion {
        region: format!("{:?}", quad.to_flat()),
        reason: reason.to_string(),
    };
    if !quad.is_finite() {
        return Err(degenerate("non-finite vertex"));
    }
    let (w, h) = (width as f64, height as f64);
    let clipped = clip_to_rect(&quad.0, w, h);
    if clipped.len() < 3 || polygon_area(&clipped) <= 1e-12 {
        return Err(degenerate("no area inside the image bounds"));
    }

    let mut mask = BinaryMask::new(width, height);
    let min_y = clipped.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = clipped
        .iter()
        .map(|p| p.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let row_lo = ((min_y - 0.5 - EDGE_EPS).ceil().max(0.0)) as u32;
    let row_hi = ((max_y - 0.5 + EDGE_EPS).floor().min(h - 1.0)).max(-1.0);
    if row_hi < 0.0 {
        return Ok(mask);
    }
    let row_hi = row_hi as u32;

    let n = clipped.len();
    let mut crossings: Vec<f64> = Vec::with_capacity(n);
    let mut spans: Vec<(f64, f64)> = Vec::with_capacity(2 * n);
    for row in row_lo..=row_hi {
        let cy = row as f64 + 0.5;
        crossings.clear();
        spans.clear();
        for i in 0..n {
            let a = clipped[i];
            let b = clipped[(i + 1) % n];
            let (lo, hi) = if a.y <= b.y { (a, b) } else { (b, a) };
            if (hi.y - lo.y).abs() <= EDGE_EPS {
                // horizontal edge: contributes only its boundary points
                if (cy - lo.y).abs() <= EDGE_EPS {
                    spans.push((a.x.min(b.x), a.x.max(b.x)));
                }
                continue;
            }
            if cy < lo.y - EDGE_EPS || cy > hi.y + EDGE_EPS {
                continue;
            }
            let x = lo.x + (cy - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
            // boundary point of this edge on the scanline
            spans.push((x, x));
            // half-open rule for interior parity
            if lo.y <= cy && cy < hi.y {
                crossings.push(x);
            }
        }
        crossings.sort_by(f64::total_cmp);
        spans.extend(crossings.chunks_exact(2).map(|c| (c[0], c[1])));

        for &(x0, x1) in &spans {
            let first = (x0 - 0.5 - EDGE_EPS).ceil().max(0.0);
            let last = (x1 - 0.5 + EDGE_EPS).floor().min(w - 1.0);
            if last < first {
                continue;
            }
            for col in first as u32..=last as u32 {
                mask.set(col, row, true);
            }
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent point-in-polygon test: on-segment check plus ray casting,
    /// evaluated against the unclipped quad.
    fn oracle_contains(quad: &Quad, px: f64, py: f64) -> bool {
        let pts = quad.points();
        for i in 0..4 {
            let a = pts[i];
            let b = pts[(i + 1) % 4];
            let cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
            let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
            let within = px >= a.x.min(b.x) - 1e-9
                && px <= a.x.max(b.x) + 1e-9
                && py >= a.y.min(b.y) - 1e-9
                && py <= a.y.max(b.y) + 1e-9;
            if within && cross.abs() <= 1e-9 * len.max(1.0) {
                return true;
            }
        }
        let mut inside = false;
        let mut j = 3;
        for i in 0..4 {
            let (a, b) = (pts[i], pts[j]);
            if (a.y > py) != (b.y > py) {
                let x = (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x;
                if px < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    fn oracle_mask(quad: &Quad, w: u32, h: u32) -> Vec<bool> {
        let mut out = Vec::with_capacity((w * h) as usize);
        for j in 0..h {
            for i in 0..w {
                out.push(oracle_contains(quad, i as f64 + 0.5, j as f64 + 0.5));
            }
        }
        out
    }

    #[test]
    fn axis_aligned_rect_uses_pixel_centers() {
        let q = Quad::new([[2.0, 2.0], [5.0, 2.0], [5.0, 4.0], [2.0, 4.0]]);
        let m = rasterize_quad(&q, 8, 8).unwrap();
        assert_eq!(m.count(), 6);
        assert_eq!(m.bits(), oracle_mask(&q, 8, 8).as_slice());
        for (x, y) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)] {
            assert!(m.get(x, y));
        }
    }

    #[test]
    fn full_cover_sets_every_bit() {
        let q = Quad::rect(-10.0, -10.0, 50.0, 50.0);
        let m = rasterize_quad(&q, 16, 9).unwrap();
        assert_eq!(m.count(), 16 * 9);
    }

    #[test]
    fn outside_quad_is_degenerate() {
        let q = Quad::rect(20.0, 20.0, 30.0, 30.0);
        assert!(matches!(
            rasterize_quad(&q, 8, 8),
            Err(Error::DegenerateRegion { .. })
        ));
        let flat = Quad::new([[1.0, 1.0], [5.0, 1.0], [5.0, 1.0], [1.0, 1.0]]);
        assert!(rasterize_quad(&flat, 8, 8).is_err());
        let nan = Quad::new([[f64::NAN, 1.0], [5.0, 1.0], [5.0, 4.0], [1.0, 4.0]]);
        assert!(rasterize_quad(&nan, 8, 8).is_err());
    }

    #[test]
    fn boundary_centers_are_included() {
        // edges pass exactly through pixel centers
        let q = Quad::rect(1.5, 1.5, 3.5, 2.5);
        let m = rasterize_quad(&q, 6, 6).unwrap();
        assert_eq!(m.count(), 3 * 2);
        // diamond with vertices on centers
        let d = Quad::new([[3.5, 0.5], [6.5, 3.5], [3.5, 6.5], [0.5, 3.5]]);
        let m = rasterize_quad(&d, 8, 8).unwrap();
        assert_eq!(m.bits(), oracle_mask(&d, 8, 8).as_slice());
        assert_eq!(m.count(), 1 + 3 + 5 + 7 + 5 + 3 + 1);
    }

    proptest! {
        #[test]
        fn matches_point_in_polygon_oracle(
            w in 1u32..=64, h in 1u32..=64,
            coords in proptest::array::uniform8(-16.0f64..80.0),
            snap in any::<bool>(),
        ) {
            let c = if snap { coords.map(|v| (v * 2.0).round() / 2.0) } else { coords };
            let q = Quad::new([[c[0], c[1]], [c[2], c[3]], [c[4], c[5]], [c[6], c[7]]]);
            if let Ok(m) = rasterize_quad(&q, w, h) {
                prop_assert_eq!(m.bits().to_vec(), oracle_mask(&q, w, h));
            }
        }

        #[test]
        fn rotated_rects_match_oracle(
            cx in 0.0f64..64.0, cy in 0.0f64..64.0,
            hw in 0.5f64..20.0, hh in 0.5f64..20.0,
            theta in 0.0f64..std::f64::consts::PI,
        ) {
            let (s, c) = theta.sin_cos();
            let corner = |dx: f64, dy: f64| [cx + dx * c - dy * s, cy + dx * s + dy * c];
            let q = Quad::new([corner(-hw, -hh), corner(hw, -hh), corner(hw, hh), corner(-hw, hh)]);
            if let Ok(m) = rasterize_quad(&q, 64, 64) {
                prop_assert_eq!(m.bits().to_vec(), oracle_mask(&q, 64, 64));
            }
        }
    }
}
