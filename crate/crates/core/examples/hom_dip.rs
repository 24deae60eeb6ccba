//! Lossless Hong-Ou-Mandel interference: two photons entering the coupler
//! never leave in different modes at `t = π/4g`.
//!
//! Run with `cargo run --example hom_dip`.

use coupled_modes::fock::number_state;
use coupled_modes::observables::{coincidence_rate, linspace};
use coupled_modes::solver::Evolution;
use coupled_modes::{SimConfig, TwoModeSpace};
use std::f64::consts::FRAC_PI_4;

fn main() -> coupled_modes::Result<()> {
    let config = SimConfig::new(1.0, 0.0, 0.0, 0.0, 4)?;
    let rho0 = number_state(TwoModeSpace::new(4)?, 1, 1)?.projector();
    let evolution = Evolution::new(&rho0, &config)?;

    println!("{:>8}  {:>12}  {:>12}", "g t", "P11", "cos²(2gt)");
    for t in linspace(FRAC_PI_4 * 2.0, 9) {
        let p11 = coincidence_rate(&evolution.at(t)?)?;
        println!("{t:>8.4}  {p11:>12.3e}  {:>12.3e}", (2.0 * t).cos().powi(2));
    }
    let dip = coincidence_rate(&evolution.at(FRAC_PI_4)?)?;
    println!("P11 at the dip: {dip:.3e}");
    Ok(())
}
