//! Static PNG heatmaps of coincidence grids.
//!
//! Time runs left to right and `γ₁/g` bottom to top. Panels share one color
//! scale and sit side by side in the order given. Invalid cells are gray.

use crate::error::{Error, Result};
use crate::observables::CoincidenceGrid;
use image::{Rgb, RgbImage};
use std::path::Path;

const GAP: u32 = 8;
const INVALID: Rgb<u8> = Rgb([128, 128, 128]);
const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);

/// Viridis control points at 0, 0.25, 0.5, 0.75 and 1.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

/// Piecewise-linear viridis; `x` is clamped to `[0, 1]`.
pub fn colormap(x: f64) -> Rgb<u8> {
    let x = if x.is_finite() { x.clamp(0.0, 1.0) } else { 0.0 };
    let pos = x * (STOPS.len() - 1) as f64;
    let k = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - k as f64;
    let c = |i: usize| (STOPS[k][i] + f * (STOPS[k + 1][i] - STOPS[k][i])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Pixel scale so that a panel is at least ~300 pixels on each side.
fn scale(cells: usize) -> u32 {
    (300 / cells.max(1)).max(1) as u32
}

pub fn heatmap(grids: &[CoincidenceGrid]) -> Result<RgbImage> {
    if grids.is_empty() || grids.iter().any(|g| g.times.is_empty() || g.gamma1_over_g.is_empty()) {
        return Err(Error::Config("nothing to render: empty grid".into()));
    }
    let vmax = grids
        .iter()
        .flat_map(|g| g.rows())
        .filter(|r| r.3 && r.2.is_finite())
        .map(|r| r.2)
        .fold(0.0_f64, f64::max);
    let vmax = if vmax > 0.0 { vmax } else { 1.0 };

    let dims: Vec<(u32, u32, u32, u32)> = grids
        .iter()
        .map(|g| {
            let (sx, sy) = (scale(g.times.len()), scale(g.gamma1_over_g.len()));
            (sx, sy, sx * g.times.len() as u32, sy * g.gamma1_over_g.len() as u32)
        })
        .collect();
    let width = dims.iter().map(|d| d.2).sum::<u32>() + GAP * (grids.len() as u32 - 1);
    let height = dims.iter().map(|d| d.3).max().unwrap_or(1);
    let mut img = RgbImage::from_pixel(width, height, BACKGROUND);

    let mut x0 = 0;
    for (grid, &(sx, sy, w, h)) in grids.iter().zip(&dims) {
        let rows = grid.gamma1_over_g.len();
        for (k, (col, ok)) in grid.values.iter().zip(&grid.valid).enumerate() {
            // Largest γ₁ on the top row.
            let top = (rows - 1 - k) as u32 * sy;
            for (i, (&p, &valid)) in col.iter().zip(ok).enumerate() {
                let color = if valid && p.is_finite() { colormap(p / vmax) } else { INVALID };
                for dy in 0..sy {
                    for dx in 0..sx {
                        img.put_pixel(x0 + i as u32 * sx + dx, top + dy, color);
                    }
                }
            }
        }
        debug_assert!(h <= height);
        x0 += w + GAP;
    }
    Ok(img)
}

/// Writes the heatmap of `grids` to `path` in the format implied by its
/// extension.
pub fn render(grids: &[CoincidenceGrid], path: &Path) -> Result<()> {
    heatmap(grids)?
        .save(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
