//! The jump and damping superoperators on a random Hermitian matrix: their
//! commutators and the su(1,1) closure, evaluated numerically.
//!
//! Run with `cargo run --example superoperator_algebra`.

use coupled_modes::linalg::{max_abs, CMatrix};
use coupled_modes::sampling::{random_hermitian, restrict_to_total};
use coupled_modes::superop::{apply_j, apply_j_sum, apply_l, apply_s, Sign};
use coupled_modes::{Mode, TwoModeSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coupled_modes::Result<()> {
    let space = TwoModeSpace::new(5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = restrict_to_total(space, &random_hermitian(space.dim(), &mut rng), 4);

    let jm = |m: &CMatrix| apply_j(space, Sign::Minus, Mode::One, m);
    let jp = |m: &CMatrix| apply_j(space, Sign::Plus, Mode::One, m);
    let l = |m: &CMatrix| apply_l(space, Mode::One, m);

    let checks = [
        ("[J⁻, J⁺] − 4(L + 1)", jm(&jp(&rho)?)? - jp(&jm(&rho)?)? - (l(&rho)? + &rho).scale(4.0)),
        ("[L, J⁺] − 2J⁺", l(&jp(&rho)?)? - jp(&l(&rho)?)? - jp(&rho)?.scale(2.0)),
        ("[L, J⁻] + 2J⁻", l(&jm(&rho)?)? - jm(&l(&rho)?)? + jm(&rho)?.scale(2.0)),
        (
            "[J⁺₁ + J⁺₂, S]",
            apply_j_sum(space, Sign::Plus, &apply_s(space, &rho)?)?
                - apply_s(space, &apply_j_sum(space, Sign::Plus, &rho)?)?,
        ),
    ];
    for (name, residual) in &checks {
        println!("{name:<22} {:.3e}", max_abs(residual));
    }
    Ok(())
}
