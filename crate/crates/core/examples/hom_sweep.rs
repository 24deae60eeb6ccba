//! Coincidence-rate map over time and `γ₁/g` at zero and finite temperature,
//! written as a side-by-side PNG heatmap.
//!
//! Run with `cargo run --example hom_sweep -- [output.png]`.

use coupled_modes::observables::{default_gamma_grid, default_time_grid, hom_sweep};
use coupled_modes::render::render;
use coupled_modes::SimConfig;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

fn main() -> coupled_modes::Result<()> {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "hom_sweep.png".into()));
    let times = default_time_grid(1.0);
    let gammas = default_gamma_grid();

    let mut grids = Vec::new();
    for (nbar, cutoff) in [(0.0, 4), (0.01, 6)] {
        let grid = hom_sweep(&SimConfig::new(1.0, 0.0, 0.0, nbar, cutoff)?, &times, &gammas, true)?;
        let (t_min, p_min) = grid.minimum(0, FRAC_PI_2).unwrap_or((f64::NAN, f64::NAN));
        let half = gammas.iter().position(|&x| x == 0.5).unwrap_or(0);
        println!(
            "n̄ = {nbar}: min P11 {p_min:.3e} at t = {t_min:.4}; first minimum at γ₁/g = 0.5: {:?}; invalid {}",
            grid.first_local_minimum(half),
            grid.invalid_cells()
        );
        grids.push(grid);
    }
    render(&grids, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
