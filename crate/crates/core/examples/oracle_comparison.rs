//! The closed-form evolution against direct RK4 integration of the master
//! equation, for a random mixed initial state at finite temperature.
//!
//! Run with `cargo run --example oracle_comparison`.

use coupled_modes::linalg::trace_distance;
use coupled_modes::oracle::{integrate_times, IntegratorConfig};
use coupled_modes::sampling::random_rank2_mixture;
use coupled_modes::solver::Evolution;
use coupled_modes::{SimConfig, TwoModeSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() -> coupled_modes::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let config = SimConfig::new(1.0, 0.35, 0.8, 0.01, 6)?;
    let rho0 = random_rank2_mixture(TwoModeSpace::new(6)?, 2, &mut rng)?;
    let times = [0.3, 1.0, 3.0];

    let start = Instant::now();
    let evolution = Evolution::new(&rho0, &config)?;
    let exact: Vec<_> = times.iter().map(|&t| evolution.at(t)).collect::<Result<_, _>>()?;
    let exact_time = start.elapsed();

    let start = Instant::now();
    let reference = integrate_times(&rho0, &times, &config, &IntegratorConfig::default())?;
    let oracle_time = start.elapsed();

    for ((t, a), b) in times.iter().zip(&exact).zip(&reference) {
        let target = b.space();
        let distance = trace_distance(&a.space().transfer(a.matrix(), &target), b.matrix());
        println!("t = {t:>4}: trace distance {distance:.3e}");
    }
    println!("closed form {exact_time:?}, RK4 {oracle_time:?}");
    Ok(())
}
