//! Effective Hamiltonian, its diagonalization and the closed-form evolution.
//!
//! After the two thermal transformations the master equation becomes
//! `dΩ/dt = −i(H Ω − Ω H†)` with
//!
//! ```text
//! H = −iγ₁n₁ − iγ₂n₂ + g(a₁a₂† + a₁†a₂) = −i[(γ/2)N + ΔJz] + 2gJx
//! ```
//!
//! `H` conserves `N`, so everything here is assembled per `N`-sector. With
//! `tanh ξ = 2g/Δ` the rotation `e^{−ξJy} H e^{ξJy}` is diagonal and the
//! propagator is `U(t) = e^{ξJy} e^{−iℋt} e^{−ξJy}`.

use crate::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, OperatorMatrix, TwoModeSpace};
use crate::linalg::{expm, CMatrix, C64, I};
use crate::superop::{sector_differences, thermal_params, SeriesPlan, Sign};

/// Relative distance `||Δ| − 2g| / g` below which `auto` uses the direct path.
pub const EXCEPTIONAL_WINDOW: f64 = 1e-6;

/// Largest working cutoff the padded pipeline will allocate.
pub const MAX_WORKING_CUTOFF: usize = 40;

/// Required cutoff margin above the initial state's occupation.
pub const CUTOFF_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    space: TwoModeSpace,
    matrix: CMatrix,
}

impl EffectiveHamiltonian {
    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Restriction to the sector of total photon number `n`.
    pub fn block(&self, n: usize) -> CMatrix {
        let idx = self.space.sector(n);
        submatrix(&self.matrix, &idx, &idx)
    }
}

/// `−iγ₁a₁†a₁ − iγ₂a₂†a₂ + g(a₁a₂† + a₁†a₂)`.
pub fn effective_hamiltonian(config: &SimConfig, space: TwoModeSpace) -> EffectiveHamiltonian {
    let d = space.dim();
    let mut matrix = CMatrix::zeros(d, d);
    for idx in space.sectors() {
        let block = hamiltonian_block(config, space, &idx);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                matrix[(i, j)] = block[(r, c)];
            }
        }
    }
    EffectiveHamiltonian { space, matrix }
}

/// `H` on one sector, from its matrix elements. Within a sector the basis is
/// ordered by `n₁`, and the hopping term links neighbours `n₁ ↔ n₁ + 1`.
fn hamiltonian_block(config: &SimConfig, space: TwoModeSpace, idx: &[usize]) -> CMatrix {
    let n = idx.len();
    let mut h = CMatrix::zeros(n, n);
    for r in 0..n {
        let (n1, n2) = space.occupations(idx[r]);
        h[(r, r)] = C64::new(0.0, -(config.gamma1 * n1 as f64 + config.gamma2 * n2 as f64));
        if r + 1 < n {
            // ⟨n₁+1, n₂−1| a₁†a₂ |n₁, n₂⟩ = √((n₁+1)n₂)
            let v = config.g * (((n1 + 1) * n2) as f64).sqrt();
            h[(r + 1, r)] = C64::new(v, 0.0);
            h[(r, r + 1)] = C64::new(v, 0.0);
        }
    }
    h
}

/// `Jy = i(a₁†a₂ − a₁a₂†)/2` on one sector.
fn jy_block(space: TwoModeSpace, idx: &[usize]) -> CMatrix {
    let n = idx.len();
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n.saturating_sub(1) {
        let (n1, n2) = space.occupations(idx[r]);
        let v = 0.5 * (((n1 + 1) * n2) as f64).sqrt();
        m[(r + 1, r)] = C64::new(0.0, v);
        m[(r, r + 1)] = C64::new(0.0, -v);
    }
    m
}

/// `−i[(γ/2)N + ΔJz] + 2gJx`.
pub fn effective_hamiltonian_schwinger(config: &SimConfig, space: TwoModeSpace) -> EffectiveHamiltonian {
    let s = fock::schwinger_operators(space);
    let damping = s.n.matrix().scale(config.gamma() / 2.0) + s.jz.matrix().scale(config.delta());
    let matrix = damping * -I + s.jx.matrix().scale(2.0 * config.g);
    EffectiveHamiltonian { space, matrix }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `|Δ| > 2g`: real ξ.
    Overdamped,
    /// `|Δ| < 2g`: ξ = ζ + iπ/2.
    Underdamped,
    /// `|Δ| = 2g` within tolerance: no ξ exists.
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiParameter {
    pub regime: Regime,
    pub xi: Option<C64>,
}

/// Solves `tanh ξ = 2g/Δ`. `tolerance` is the relative width of the
/// exceptional window around `|Δ| = 2g`.
pub fn xi_parameter(g: f64, delta: f64, tolerance: f64) -> Result<XiParameter> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::Domain(format!("coupling g must be > 0, got {g}")));
    }
    if !delta.is_finite() || tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::Domain(format!("invalid Δ = {delta} or tolerance = {tolerance}")));
    }
    let two_g = 2.0 * g;
    if delta.abs() > two_g * (1.0 + tolerance) {
        Ok(XiParameter { regime: Regime::Overdamped, xi: Some(C64::new((two_g / delta).atanh(), 0.0)) })
    } else if delta.abs() < two_g * (1.0 - tolerance) {
        let zeta = (delta / two_g).atanh();
        Ok(XiParameter {
            regime: Regime::Underdamped,
            xi: Some(C64::new(zeta, std::f64::consts::FRAC_PI_2)),
        })
    } else {
        Ok(XiParameter { regime: Regime::Exceptional, xi: None })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizationResult {
    pub regime: Regime,
    pub xi: C64,
    pub c_n: C64,
    pub c_x: C64,
    pub c_z: C64,
    /// `+1` when the upper sign of `±√(Δ²−4g²)` (overdamped) or
    /// `∓√(4g²−Δ²)` (underdamped) is realized, `−1` otherwise.
    pub branch: i8,
    /// Diagonal of `ℋ = c_N N + c_z Jz` in the Fock basis.
    pub diagonal: Vec<C64>,
    space: TwoModeSpace,
}

impl DiagonalizationResult {
    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    /// `ℋ` as a dense diagonal matrix.
    pub fn generator(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal.clone()))
    }
}

pub fn diagonalize(config: &SimConfig, space: TwoModeSpace) -> Result<DiagonalizationResult> {
    config.validate()?;
    let (g, delta) = (config.g, config.delta());
    let xp = xi_parameter(g, delta, EXCEPTIONAL_WINDOW)?;
    let xi = xp.xi.ok_or_else(|| {
        Error::ExceptionalPoint(format!("|Δ| = {} is within {EXCEPTIONAL_WINDOW:e}·2g of 2g = {}", delta.abs(), 2.0 * g))
    })?;
    let c_n = C64::new(0.0, -config.gamma() / 2.0);
    let c_x = xi.cosh() * (2.0 * g) - xi.sinh() * delta;
    let c_z = I * (xi.sinh() * (2.0 * g) - xi.cosh() * delta);
    let branch = match xp.regime {
        Regime::Overdamped => {
            // ℋ = −i[(γ/2)N ± √(Δ²−4g²) Jz] ⇒ c_z = ∓i√(…)
            if c_z.im <= 0.0 { 1 } else { -1 }
        }
        _ => {
            // ℋ = −i(γ/2)N ∓ √(4g²−Δ²) Jz ⇒ c_z = ∓√(…)
            if c_z.re <= 0.0 { 1 } else { -1 }
        }
    };
    let diagonal = (0..space.dim())
        .map(|i| {
            let (n1, n2) = space.occupations(i);
            c_n * (n1 + n2) as f64 + c_z * ((n2 as f64 - n1 as f64) / 2.0)
        })
        .collect();
    Ok(DiagonalizationResult { regime: xp.regime, xi, c_n, c_x, c_z, branch, diagonal, space })
}

/// Construction path actually taken by a propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorPath {
    Diagonalized,
    Direct,
}

#[derive(Debug, Clone)]
enum BlockGenerator {
    /// `R diag(λ) R⁻¹` with `R = e^{ξJy}`.
    Diagonal { rotate: CMatrix, unrotate: CMatrix, eigen: Vec<C64> },
    Dense { h: CMatrix },
}

/// Per-sector data needed to build `U(t)` for any `t`.
#[derive(Debug, Clone)]
pub struct PropagatorFactory {
    space: TwoModeSpace,
    path: PropagatorPath,
    sectors: Vec<Vec<usize>>,
    blocks: Vec<BlockGenerator>,
    diagonalization: Option<DiagonalizationResult>,
}

impl PropagatorFactory {
    pub fn new(config: &SimConfig, space: TwoModeSpace, method: Method) -> Result<Self> {
        config.validate()?;
        let near_ep = ((config.delta().abs() - 2.0 * config.g) / config.g).abs() < EXCEPTIONAL_WINDOW;
        let path = match method {
            Method::Direct => PropagatorPath::Direct,
            Method::Diagonalized => PropagatorPath::Diagonalized,
            Method::Auto if near_ep => PropagatorPath::Direct,
            Method::Auto => PropagatorPath::Diagonalized,
        };
        let sectors = space.sectors();
        let (blocks, diagonalization) = match path {
            PropagatorPath::Direct => {
                let blocks = sectors
                    .iter()
                    .map(|idx| BlockGenerator::Dense { h: hamiltonian_block(config, space, idx) })
                    .collect();
                (blocks, None)
            }
            PropagatorPath::Diagonalized => {
                let d = diagonalize(config, space)?;
                let blocks = sectors
                    .iter()
                    .enumerate()
                    .map(|(n, idx)| {
                        // Sectors above the cutoff are clipped multiplets on
                        // which the rotation is not defined.
                        if n > space.cutoff() {
                            return BlockGenerator::Dense { h: hamiltonian_block(config, space, idx) };
                        }
                        let jy_b = jy_block(space, idx);
                        BlockGenerator::Diagonal {
                            rotate: expm(&(&jy_b * d.xi)),
                            unrotate: expm(&(&jy_b * -d.xi)),
                            eigen: idx.iter().map(|&i| d.diagonal[i]).collect(),
                        }
                    })
                    .collect();
                (blocks, Some(d))
            }
        };
        Ok(Self { space, path, sectors, blocks, diagonalization })
    }

    pub fn path(&self) -> PropagatorPath {
        self.path
    }

    pub fn diagonalization(&self) -> Option<&DiagonalizationResult> {
        self.diagonalization.as_ref()
    }

    pub fn at(&self, t: f64) -> Result<Propagator> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&self.sectors)
            .map(|(b, idx)| match b {
                _ if t == 0.0 => CMatrix::identity(idx.len(), idx.len()),
                BlockGenerator::Diagonal { rotate, unrotate, eigen } => {
                    let mut scaled = unrotate.clone();
                    for (r, lam) in eigen.iter().enumerate() {
                        let phase = (-I * *lam * t).exp();
                        scaled.row_mut(r).scale_mut_complex(phase);
                    }
                    rotate * scaled
                }
                BlockGenerator::Dense { h } => expm(&(h * (-I * t))),
            })
            .collect();
        Ok(Propagator { space: self.space, t, path: self.path, sectors: self.sectors.clone(), blocks })
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, z: C64);
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::StorageMut<C64, R, C>> ScaleComplex
    for nalgebra::Matrix<C64, R, C, S>
{
    fn scale_mut_complex(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

/// `U(t)` stored as its diagonal `N`-blocks.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: TwoModeSpace,
    t: f64,
    path: PropagatorPath,
    sectors: Vec<Vec<usize>>,
    blocks: Vec<CMatrix>,
}

impl Propagator {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn path(&self) -> PropagatorPath {
        self.path
    }

    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn block(&self, n: usize) -> &CMatrix {
        &self.blocks[n]
    }

    /// Dense `dim × dim` matrix.
    pub fn matrix(&self) -> CMatrix {
        let d = self.space.dim();
        let mut m = CMatrix::zeros(d, d);
        for (idx, b) in self.sectors.iter().zip(&self.blocks) {
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    m[(i, j)] = b[(r, c)];
                }
            }
        }
        m
    }

    pub fn into_operator(self) -> OperatorMatrix {
        let space = self.space;
        OperatorMatrix::new(space, self.matrix()).expect("propagator matches its space")
    }

    /// `U X U†`, evaluated sector pair by sector pair.
    pub fn conjugate(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check(x)?;
        Ok(self.conjugate_band(x, &sector_differences(self.space, x)))
    }

    fn check(&self, x: &CMatrix) -> Result<()> {
        let d = self.space.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.nrows() });
        }
        Ok(())
    }

    /// `U X U†` for `X` supported on sector pairs `(a, b)` with
    /// `a − b ∈ differences`.
    fn conjugate_band(&self, x: &CMatrix, differences: &[i64]) -> CMatrix {
        let d = self.space.dim();
        let mut out = CMatrix::zeros(d, d);
        for (a, ia) in self.sectors.iter().enumerate() {
            for &delta in differences {
                let b = a as i64 - delta;
                if b < 0 || b as usize >= self.sectors.len() {
                    continue;
                }
                let ib = &self.sectors[b as usize];
                let res = &self.blocks[a] * submatrix(x, ia, ib) * self.blocks[b as usize].adjoint();
                for (c, &j) in ib.iter().enumerate() {
                    for (r, &i) in ia.iter().enumerate() {
                        out[(i, j)] = res[(r, c)];
                    }
                }
            }
        }
        out
    }
}

pub fn propagator(config: &SimConfig, space: TwoModeSpace, t: f64, method: Method) -> Result<Propagator> {
    PropagatorFactory::new(config, space, method)?.at(t)
}

fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// Cutoff of the space the thermal pipeline runs in.
///
/// `e^{η₊J⁺}` spreads weight geometrically up the ladder and the final
/// `e^{−χJ⁻}` folds it back down, so anything cut off at the top returns as
/// an error in the low-lying block. The fold-down ratio per quantum is
/// `q = n̄(2+n̄)/(1+n̄)`; the working cutoff is raised to `m₀ + k` with the
/// smallest `k` such that `(k + m₀ + 1)·qᵏ ≤ tolerance`.
pub fn working_cutoff(config: &SimConfig, max_occupation: usize) -> Result<usize> {
    let base = config.cutoff;
    let tol = match config.pad_tolerance {
        Some(tol) if config.nbar > 0.0 => tol,
        _ => return Ok(base),
    };
    let n = config.nbar;
    let q = n * (2.0 + n) / (1.0 + n);
    if q >= 1.0 {
        return Err(Error::Truncation(format!(
            "n̄ = {n} is too hot for the transformed pipeline (fold-down ratio {q:.3} ≥ 1)"
        )));
    }
    let m0 = max_occupation;
    let mut k = 0usize;
    while (k + m0 + 1) as f64 * q.powi(k as i32) > tol {
        k += 1;
        if m0 + k > MAX_WORKING_CUTOFF {
            return Err(Error::Truncation(format!(
                "n̄ = {n} needs a working cutoff above {MAX_WORKING_CUTOFF} to reach {tol:e}"
            )));
        }
    }
    Ok(base.max(m0 + k))
}

/// Closed-form evolution from a fixed initial state: the transformed initial
/// state and the propagator data are computed once and reused for every `t`.
#[derive(Debug, Clone)]
pub struct Evolution {
    config: SimConfig,
    space: TwoModeSpace,
    omega0: CMatrix,
    factory: PropagatorFactory,
    differences: Vec<i64>,
    lower: SeriesPlan,
    raise: SeriesPlan,
    eta: f64,
    chi: f64,
}

impl Evolution {
    pub fn new(rho0: &DensityMatrix, config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let base = TwoModeSpace::new(config.cutoff)?;
        if rho0.space() != base {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: rho0.space().dim() });
        }
        let m0 = rho0.max_mode_occupation();
        if m0 + CUTOFF_MARGIN > config.cutoff {
            return Err(Error::Config(format!(
                "cutoff {} leaves less than {CUTOFF_MARGIN} quanta of margin above occupation {m0}",
                config.cutoff
            )));
        }
        let space = TwoModeSpace::new(working_cutoff(config, m0)?)?;
        let factory = PropagatorFactory::new(config, space, config.method)?;
        Self::with_factory(rho0, config, factory)
    }

    /// Reuses a propagator factory built for the working space of `rho0`
    /// (sweeps over time and initial states at fixed rates).
    pub fn with_factory(rho0: &DensityMatrix, config: &SimConfig, factory: PropagatorFactory) -> Result<Self> {
        let space = factory.space;
        let p = thermal_params(config.nbar, config.gamma1, config.gamma2)?;
        let rho = rho0.embed(space)?;
        let differences = sector_differences(space, rho.matrix());
        let lower = SeriesPlan::new(space, Sign::Minus, &differences);
        let raise = SeriesPlan::new(space, Sign::Plus, &differences);
        let x = raise.apply(p.eta_plus, rho.matrix())?.value;
        let omega0 = lower.apply(p.chi, &x)?.value;
        Ok(Self { config: *config, space, omega0, factory, differences, lower, raise, eta: p.eta_plus, chi: p.chi })
    }

    pub fn working_space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn path(&self) -> PropagatorPath {
        self.factory.path
    }

    /// `ρ(t) = e^{−η₊J⁺} e^{−χJ⁻} [U(t) Ω₀ U(t)†]` on the working space.
    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        let u = self.factory.at(t)?;
        let omega = u.conjugate_band(&self.omega0, &self.differences);
        let x = self.lower.apply(-self.chi, &omega)?.value;
        let rho = self.raise.apply(-self.eta, &x)?.value;
        DensityMatrix::from_evolved(self.space, rho)
    }
}

/// `ρ(t)` on the working space chosen by [`working_cutoff`].
pub fn evolve(rho0: &DensityMatrix, t: f64, config: &SimConfig) -> Result<DensityMatrix> {
    Evolution::new(rho0, config)?.at(t)
}
