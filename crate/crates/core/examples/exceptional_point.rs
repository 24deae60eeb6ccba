//! Regimes of the effective non-Hermitian Hamiltonian as the loss imbalance
//! crosses `|Δ| = 2g`, and the direct propagator path across that point.
//!
//! Run with `cargo run --example exceptional_point`.

use coupled_modes::linalg::max_abs;
use coupled_modes::solver::{diagonalize, propagator};
use coupled_modes::{Error, Method, SimConfig, TwoModeSpace};

fn main() -> coupled_modes::Result<()> {
    let space = TwoModeSpace::new(3)?;
    println!("{:>6}  {:<12}  {:>24}", "Δ/g", "regime", "c_z");
    for delta in [0.0, 1.0, 1.9, 2.0, 2.1, 3.0] {
        let config = SimConfig::new(1.0, 0.0, delta, 0.0, 3)?;
        match diagonalize(&config, space) {
            Ok(d) => println!("{delta:>6.2}  {:<12}  {:>24.6}", format!("{:?}", d.regime), d.c_z),
            Err(Error::ExceptionalPoint(_)) => println!("{delta:>6.2}  {:<12}  {:>24}", "exceptional", "-"),
            Err(e) => return Err(e),
        }
    }

    let at = |delta: f64| -> coupled_modes::Result<_> {
        let config = SimConfig::new(1.0, 0.0, delta, 0.0, 3)?;
        Ok(propagator(&config, space, 1.5, Method::Direct)?.matrix())
    };
    let centre = at(2.0)?;
    for eps in [1e-1, 1e-2, 1e-3] {
        let jump = max_abs(&(at(2.0 + eps)? - &centre)).max(max_abs(&(at(2.0 - eps)? - &centre)));
        println!("|U(2g ± {eps:e}) − U(2g)| = {jump:.3e}");
    }
    Ok(())
}
