//! Relaxation of `|1,1⟩` into the reservoir's thermal product state, with
//! state diagnostics along the way.
//!
//! Run with `cargo run --example thermal_relaxation`.

use coupled_modes::fock::{number_state, thermal_state, Mode};
use coupled_modes::linalg::trace_distance;
use coupled_modes::observables::{diagnostics, mode_occupation};
use coupled_modes::solver::Evolution;
use coupled_modes::{SimConfig, TwoModeSpace};

fn main() -> coupled_modes::Result<()> {
    let nbar = 0.2;
    let config = SimConfig::new(1.0, 0.5, 0.5, nbar, 8)?;
    let rho0 = number_state(TwoModeSpace::new(8)?, 1, 1)?.projector();
    let evolution = Evolution::new(&rho0, &config)?;
    let target = thermal_state(evolution.working_space(), nbar)?;
    println!("working cutoff {} (output cutoff {})", evolution.working_space().cutoff(), config.cutoff);

    println!("{:>6}  {:>10}  {:>10}  {:>12}  {:>12}", "t", "<n1>", "<n2>", "to thermal", "min eig");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
        let rho = evolution.at(t)?;
        let d = diagnostics(&rho);
        println!(
            "{t:>6.1}  {:>10.6}  {:>10.6}  {:>12.3e}  {:>12.3e}",
            mode_occupation(&rho, Mode::One),
            mode_occupation(&rho, Mode::Two),
            trace_distance(rho.matrix(), target.matrix()),
            d.min_eigenvalue
        );
    }
    Ok(())
}
