//! Truncated two-mode Fock space, ladder and Schwinger operators, states.
//!
//! Each mode keeps occupations `0..=cutoff`. Basis states are ordered
//! row-major: the flat index of `|n₁, n₂⟩` is `n₁·(cutoff+1) + n₂`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I, ONE, ZERO};
use nalgebra::DVector;

/// Default cap on the number of density-matrix entries (`dim²`), which is
/// also the length of the vectorized state the oracle integrates.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 22;

/// Support threshold used when scanning a matrix for occupied basis states.
const SUPPORT_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::One, Mode::Two];
}

impl TryFrom<u8> for Mode {
    type Error = Error;

    fn try_from(m: u8) -> Result<Self> {
        match m {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            other => Err(Error::Domain(format!("mode must be 1 or 2, got {other}"))),
        }
    }
}

/// Truncated two-mode Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoModeSpace {
    cutoff: usize,
}

impl TwoModeSpace {
    /// Builds the space with the default memory cap.
    pub fn new(cutoff: usize) -> Result<Self> {
        Self::with_limit(cutoff, DEFAULT_MAX_ENTRIES)
    }

    /// Builds the space, rejecting cutoffs whose `dim²` exceeds `max_entries`.
    pub fn with_limit(cutoff: usize, max_entries: usize) -> Result<Self> {
        let per_mode = cutoff
            .checked_add(1)
            .ok_or_else(|| Error::Config("cutoff overflows".into()))?;
        let entries = per_mode
            .checked_mul(per_mode)
            .and_then(|d| d.checked_mul(d))
            .ok_or_else(|| Error::Config(format!("cutoff {cutoff}: dim² overflows")))?;
        if entries > max_entries {
            return Err(Error::Config(format!(
                "cutoff {cutoff} gives {entries} density-matrix entries, above the limit of {max_entries}"
            )));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim_per_mode(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.dim_per_mode() * self.dim_per_mode()
    }

    /// Flat index of `|n₁, n₂⟩`. Panics if an occupation exceeds the cutoff.
    #[inline]
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        assert!(n1 <= self.cutoff && n2 <= self.cutoff, "occupation beyond cutoff");
        n1 * self.dim_per_mode() + n2
    }

    pub fn try_index(&self, n1: usize, n2: usize) -> Result<usize> {
        if n1 > self.cutoff || n2 > self.cutoff {
            return Err(Error::Domain(format!(
                "occupation ({n1}, {n2}) exceeds cutoff {}",
                self.cutoff
            )));
        }
        Ok(self.index(n1, n2))
    }

    /// Occupations `(n₁, n₂)` of a flat index.
    #[inline]
    pub fn occupations(&self, idx: usize) -> (usize, usize) {
        (idx / self.dim_per_mode(), idx % self.dim_per_mode())
    }

    #[inline]
    pub fn occupation(&self, idx: usize, mode: Mode) -> usize {
        let (n1, n2) = self.occupations(idx);
        match mode {
            Mode::One => n1,
            Mode::Two => n2,
        }
    }

    #[inline]
    pub fn total(&self, idx: usize) -> usize {
        let (n1, n2) = self.occupations(idx);
        n1 + n2
    }

    /// Flat indices of the total-photon-number sector `N = n`, ordered by
    /// increasing `n₁`. Sectors with `n > cutoff` are incomplete.
    pub fn sector(&self, n: usize) -> Vec<usize> {
        let c = self.cutoff;
        if n > 2 * c {
            return Vec::new();
        }
        let lo = n.saturating_sub(c);
        let hi = n.min(c);
        (lo..=hi).map(|n1| self.index(n1, n - n1)).collect()
    }

    /// All sectors `N = 0..=2·cutoff`.
    pub fn sectors(&self) -> Vec<Vec<usize>> {
        (0..=2 * self.cutoff).map(|n| self.sector(n)).collect()
    }

    /// True if every state of `self` also exists in `other`.
    pub fn fits_in(&self, other: &TwoModeSpace) -> bool {
        self.cutoff <= other.cutoff
    }

    /// Copies the entries of `m` (on `self`) shared with `target`, dropping
    /// states outside `target` and zero-filling new ones.
    pub fn transfer(&self, m: &CMatrix, target: &TwoModeSpace) -> CMatrix {
        let d = target.dim();
        let mut out = CMatrix::zeros(d, d);
        let keep = self.cutoff.min(target.cutoff);
        let map: Vec<(usize, usize)> = (0..=keep)
            .flat_map(|n1| (0..=keep).map(move |n2| (n1, n2)))
            .map(|(n1, n2)| (self.index(n1, n2), target.index(n1, n2)))
            .collect();
        for &(sj, tj) in &map {
            for &(si, ti) in &map {
                out[(ti, tj)] = m[(si, sj)];
            }
        }
        out
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found });
        }
        Ok(())
    }
}

/// Operator on a two-mode space, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: TwoModeSpace,
    matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn new(space: TwoModeSpace, matrix: CMatrix) -> Result<Self> {
        space.check_dim(matrix.nrows())?;
        space.check_dim(matrix.ncols())?;
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn apply(&self, v: &StateVector) -> DVector<C64> {
        &self.matrix * v.amplitudes()
    }
}

/// `aⱼ`: `⟨n−1|a|n⟩ = √n` on mode `j`, identity on the other mode.
pub fn annihilator(space: TwoModeSpace, mode: Mode) -> OperatorMatrix {
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let (n1, n2) = space.occupations(col);
        let (n, row) = match mode {
            Mode::One if n1 > 0 => (n1, space.index(n1 - 1, n2)),
            Mode::Two if n2 > 0 => (n2, space.index(n1, n2 - 1)),
            _ => continue,
        };
        m[(row, col)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix { space, matrix: m }
}

pub fn creator(space: TwoModeSpace, mode: Mode) -> OperatorMatrix {
    annihilator(space, mode).adjoint()
}

/// `a†ⱼaⱼ`, built as a diagonal.
pub fn number_operator(space: TwoModeSpace, mode: Mode) -> OperatorMatrix {
    let d = space.dim();
    let diag = DVector::from_fn(d, |i, _| C64::new(space.occupation(i, mode) as f64, 0.0));
    OperatorMatrix { space, matrix: CMatrix::from_diagonal(&diag) }
}

/// Two-mode Schwinger (angular-momentum) operators.
#[derive(Debug, Clone)]
pub struct SchwingerSet {
    pub n: OperatorMatrix,
    pub jx: OperatorMatrix,
    pub jy: OperatorMatrix,
    pub jz: OperatorMatrix,
}

/// `N = a₁†a₁ + a₂†a₂`, `Jx = (a₁a₂† + a₁†a₂)/2`, `Jy = i(a₁†a₂ − a₁a₂†)/2`,
/// `Jz = (a₂†a₂ − a₁†a₁)/2`, assembled from the ladder matrices.
pub fn schwinger_operators(space: TwoModeSpace) -> SchwingerSet {
    let a1 = annihilator(space, Mode::One).into_matrix();
    let a2 = annihilator(space, Mode::Two).into_matrix();
    let a1d = a1.adjoint();
    let a2d = a2.adjoint();
    let n1 = &a1d * &a1;
    let n2 = &a2d * &a2;
    let half = C64::new(0.5, 0.0);
    let wrap = |matrix: CMatrix| OperatorMatrix { space, matrix };
    SchwingerSet {
        n: wrap(&n1 + &n2),
        jx: wrap((&a1 * &a2d + &a1d * &a2) * half),
        jy: wrap((&a1d * &a2 - &a1 * &a2d) * (I * half)),
        jz: wrap((&n2 - &n1) * half),
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: TwoModeSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(space: TwoModeSpace, amplitudes: DVector<C64>) -> Result<Self> {
        space.check_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = &self.amplitudes;
        DensityMatrix { space: self.space, matrix: v * v.adjoint() }
    }
}

/// Basis state `|n₁, n₂⟩`.
pub fn number_state(space: TwoModeSpace, n1: usize, n2: usize) -> Result<StateVector> {
    let idx = space.try_index(n1, n2)?;
    let mut amplitudes = DVector::from_element(space.dim(), ZERO);
    amplitudes[idx] = ONE;
    Ok(StateVector { space, amplitudes })
}

/// Product of two single-mode thermal states with mean `nbar`, truncated at
/// the cutoff and renormalized.
pub fn thermal_state(space: TwoModeSpace, nbar: f64) -> Result<DensityMatrix> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("thermal occupation must be ≥ 0, got {nbar}")));
    }
    let ratio = nbar / (1.0 + nbar);
    let weights: Vec<f64> = (0..space.dim_per_mode()).map(|n| ratio.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let (n1, n2) = space.occupations(i);
        m[(i, i)] = C64::new(weights[n1] * weights[n2] / (z * z), 0.0);
    }
    Ok(DensityMatrix { space, matrix: m })
}

/// Largest single-mode occupation of any basis state touched by a row or
/// column of `m` with an entry above roundoff.
pub fn max_mode_occupation(space: TwoModeSpace, m: &CMatrix) -> usize {
    let d = space.dim();
    (0..d)
        .filter(|&i| (0..d).any(|j| m[(i, j)].norm() > SUPPORT_EPS || m[(j, i)].norm() > SUPPORT_EPS))
        .map(|i| {
            let (n1, n2) = space.occupations(i);
            n1.max(n2)
        })
        .max()
        .unwrap_or(0)
}

/// Hermitian, unit-trace, positive-semidefinite matrix on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: TwoModeSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the invariants: Hermiticity to 1e-12, trace to 1e-10 and
    /// minimum eigenvalue ≥ −1e-10.
    pub fn new(space: TwoModeSpace, matrix: CMatrix) -> Result<Self> {
        space.check_dim(matrix.nrows())?;
        space.check_dim(matrix.ncols())?;
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("Hermiticity defect {herm:.3e}")));
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)[0];
        if min < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { space, matrix })
    }

    /// Accepts the output of a propagation step. Hermiticity defects below
    /// 1e-9 are symmetrized away; larger ones, trace drift above 1e-6 or a
    /// negative eigenvalue below −1e-6 are reported as truncation errors.
    pub fn from_evolved(space: TwoModeSpace, matrix: CMatrix) -> Result<Self> {
        space.check_dim(matrix.nrows())?;
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > 1e-9 {
            return Err(Error::Truncation(format!("evolved state has Hermiticity defect {herm:.3e}")));
        }
        let matrix = linalg::hermitize(&matrix);
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::Truncation(format!("evolved state has trace {tr}")));
        }
        // Cholesky of ρ + εI exists iff the smallest eigenvalue exceeds −ε;
        // a state without coherences between sectors is checked per sector.
        let d = space.dim();
        let block_diagonal = (0..d).all(|j| {
            (0..d).all(|i| space.total(i) == space.total(j) || matrix[(i, j)] == ZERO)
        });
        let blocks = if block_diagonal { space.sectors() } else { vec![(0..d).collect()] };
        for idx in blocks {
            let n = idx.len();
            let shifted = CMatrix::from_fn(n, n, |r, c| {
                matrix[(idx[r], idx[c])] + if r == c { C64::new(1e-6, 0.0) } else { ZERO }
            });
            if shifted.cholesky().is_none() {
                return Err(Error::Truncation(
                    "evolved state has an eigenvalue below -1e-6".into(),
                ));
            }
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `⟨n₁,n₂|ρ|n₁,n₂⟩`.
    pub fn population(&self, n1: usize, n2: usize) -> Result<f64> {
        let i = self.space.try_index(n1, n2)?;
        Ok(self.matrix[(i, i)].re)
    }

    /// Embeds the state into a larger space (zero padding).
    pub fn embed(&self, target: TwoModeSpace) -> Result<Self> {
        if !self.space.fits_in(&target) {
            return Err(Error::Domain(format!(
                "cannot embed cutoff {} into cutoff {}",
                self.space.cutoff,
                target.cutoff
            )));
        }
        Ok(Self { space: target, matrix: self.space.transfer(&self.matrix, &target) })
    }

    /// Compression onto `target` (not renormalized).
    pub fn compress(&self, target: TwoModeSpace) -> CMatrix {
        self.space.transfer(&self.matrix, &target)
    }

    /// Largest single-mode occupation carrying weight in `ρ`.
    pub fn max_mode_occupation(&self) -> usize {
        max_mode_occupation(self.space, &self.matrix)
    }

    /// Largest total photon number carrying weight in `ρ`.
    pub fn max_total_photons(&self) -> usize {
        self.support().map(|i| self.space.total(i)).max().unwrap_or(0)
    }

    fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let d = self.space.dim();
        (0..d).filter(move |&i| {
            self.matrix[(i, i)].norm() > SUPPORT_EPS
                || (0..d).any(|j| self.matrix[(i, j)].norm() > SUPPORT_EPS)
        })
    }

    /// Convex combination `Σ wₖ ρₖ`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let space = first.1.space;
        let mut m = CMatrix::zeros(space.dim(), space.dim());
        for (w, rho) in parts {
            if rho.space != space {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: rho.space.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            m += rho.matrix.scale(*w);
        }
        Self::new(space, m)
    }
}
