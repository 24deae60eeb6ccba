//! Seeded random inputs for property checks and the verify harness.

use crate::error::Result;
use crate::fock::{DensityMatrix, StateVector, TwoModeSpace};
use crate::linalg::{hermitize, CMatrix, C64};
use nalgebra::DVector;
use rand::Rng;

/// Entries uniform in `[−1,1] + i[−1,1]`, then Hermitized.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
    hermitize(&m)
}

/// Zeroes every row and column whose basis state has more than `max_total`
/// photons.
pub fn restrict_to_total(space: TwoModeSpace, m: &CMatrix, max_total: usize) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if space.total(i) <= max_total && space.total(j) <= max_total {
            m[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Normalized random pure state supported on `N ≤ max_total`.
pub fn random_pure_state<R: Rng>(space: TwoModeSpace, max_total: usize, rng: &mut R) -> Result<StateVector> {
    let v = DVector::from_fn(space.dim(), |i, _| {
        if space.total(i) <= max_total {
            C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let norm = v.norm();
    StateVector::new(space, v.unscale(norm))
}

/// Rank-2 mixture `w|ψ₁⟩⟨ψ₁| + (1−w)|ψ₂⟩⟨ψ₂|` of random pure states on
/// `N ≤ max_total`, with `w` uniform in `[0.1, 0.9]`.
pub fn random_rank2_mixture<R: Rng>(space: TwoModeSpace, max_total: usize, rng: &mut R) -> Result<DensityMatrix> {
    let a = random_pure_state(space, max_total, rng)?.projector();
    let b = random_pure_state(space, max_total, rng)?.projector();
    let w = rng.gen_range(0.1..=0.9);
    DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)])
}
