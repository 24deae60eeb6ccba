//! Superoperators of the thermal two-mode master equation.
//!
//! With `aⱼ` the ladder operators of mode `j`:
//!
//! ```text
//! J⁻ⱼ ρ = 2 aⱼ ρ aⱼ†        J⁺ⱼ ρ = 2 aⱼ† ρ aⱼ
//! Lⱼ ρ  = aⱼ†aⱼ ρ + ρ aⱼ†aⱼ  S ρ   = [a₁a₂† + a₁†a₂, ρ]
//! ```
//!
//! Superoperators act on `dim × dim` matrices directly and exploit the ladder
//! structure, so one application costs `O(dim²)`. Contributions that would be
//! raised past the cutoff are dropped.
//!
//! The dissipator is brought to a von Neumann-like form by the two
//! transformations `e^{−η₊(J⁺₁+J⁺₂)}` and `e^{−χ(J⁻₁+J⁻₂)}` with
//! `η₊ = −n̄/(2(1+n̄))` and `χ = (1+n̄)/2`.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::fock::{Mode, TwoModeSpace};
use crate::linalg::{max_abs, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Parameters of the thermal transformations, derived from `n̄` and the rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalTransformParams {
    pub nbar: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub chi: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
}

impl ThermalTransformParams {
    /// `4η²(1+n̄) + 2η(1+2n̄) + n̄`; both η roots make it vanish.
    pub fn quadratic(&self, eta: f64) -> f64 {
        let n = self.nbar;
        4.0 * eta * eta * (1.0 + n) + 2.0 * eta * (1.0 + 2.0 * n) + n
    }

    /// `f(η) = (4η+1)(1+n̄) + n̄`.
    pub fn f(&self, eta: f64) -> f64 {
        (4.0 * eta + 1.0) * (1.0 + self.nbar) + self.nbar
    }
}

/// `G(η) = 2(γ₁+γ₂)[n̄ + 2η(1+n̄)]`.
pub fn g_offset(nbar: f64, gamma_sum: f64, eta: f64) -> f64 {
    2.0 * gamma_sum * (nbar + 2.0 * eta * (1.0 + nbar))
}

pub fn thermal_params(nbar: f64, gamma1: f64, gamma2: f64) -> Result<ThermalTransformParams> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("n̄ must be ≥ 0, got {nbar}")));
    }
    let eta_plus = -nbar / (2.0 * (1.0 + nbar));
    let eta_minus = -0.5;
    let mut p = ThermalTransformParams {
        nbar,
        eta_plus,
        eta_minus,
        chi: (1.0 + nbar) / 2.0,
        f_plus: 0.0,
        f_minus: 0.0,
        g_plus: g_offset(nbar, gamma1 + gamma2, eta_plus),
        g_minus: g_offset(nbar, gamma1 + gamma2, eta_minus),
    };
    p.f_plus = p.f(eta_plus);
    p.f_minus = p.f(eta_minus);
    Ok(p)
}

/// Neighbour table: for each flat index, the index with one more (`up`) or
/// one fewer (`down`) photon in a given mode and the matrix element of the
/// ladder operator connecting them.
struct Ladder {
    up: Vec<(usize, f64)>,
    down: Vec<(usize, f64)>,
}

const NONE: usize = usize::MAX;

impl Ladder {
    fn new(space: TwoModeSpace, mode: Mode) -> Self {
        let d = space.dim();
        let c = space.cutoff();
        let mut up = vec![(NONE, 0.0); d];
        let mut down = vec![(NONE, 0.0); d];
        for i in 0..d {
            let (n1, n2) = space.occupations(i);
            let n = match mode {
                Mode::One => n1,
                Mode::Two => n2,
            };
            let shift = |k: usize| match mode {
                Mode::One => space.index(k, n2),
                Mode::Two => space.index(n1, k),
            };
            if n < c {
                up[i] = (shift(n + 1), ((n + 1) as f64).sqrt());
            }
            if n > 0 {
                down[i] = (shift(n - 1), (n as f64).sqrt());
            }
        }
        Self { up, down }
    }
}

fn check(space: TwoModeSpace, rho: &CMatrix) -> Result<()> {
    let d = space.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows().max(rho.ncols()) });
    }
    Ok(())
}

/// `dst += scale · Jⱼ^{sign} src`. Returns the largest contribution dropped
/// at the cutoff (always zero for `J⁻`).
fn add_jump(
    space: TwoModeSpace,
    ladder: &Ladder,
    sign: Sign,
    src: &CMatrix,
    scale: C64,
    dst: &mut CMatrix,
) -> f64 {
    let d = space.dim();
    let s = src.as_slice();
    let out = dst.as_mut_slice();
    let mut dropped = 0.0_f64;
    match sign {
        Sign::Minus => {
            // (2 a ρ a†)[i,j] = 2 √(mᵢ+1)(nⱼ+1) ρ[i↑, j↑]
            for j in 0..d {
                let (uj, fj) = ladder.up[j];
                if uj == NONE {
                    continue;
                }
                for i in 0..d {
                    let (ui, fi) = ladder.up[i];
                    if ui != NONE {
                        out[i + j * d] += scale * (2.0 * fi * fj) * s[ui + uj * d];
                    }
                }
            }
        }
        Sign::Plus => {
            // (2 a† ρ a)[i,j] = 2 √(mᵢ nⱼ) ρ[i↓, j↓]
            for j in 0..d {
                let (dj, fj) = ladder.down[j];
                if dj == NONE {
                    continue;
                }
                for i in 0..d {
                    let (di, fi) = ladder.down[i];
                    if di != NONE {
                        out[i + j * d] += scale * (2.0 * fi * fj) * s[di + dj * d];
                    }
                }
            }
            for j in 0..d {
                for i in 0..d {
                    if ladder.up[i].0 == NONE || ladder.up[j].0 == NONE {
                        let z = s[i + j * d];
                        if z.re != 0.0 || z.im != 0.0 {
                            let (mi, mj) = (ladder.down_count(i), ladder.down_count(j));
                            let w = 2.0 * ((mi + 1) as f64 * (mj + 1) as f64).sqrt();
                            dropped = dropped.max((scale * z).norm() * w);
                        }
                    }
                }
            }
        }
    }
    dropped
}

impl Ladder {
    /// Occupation of the ladder's mode at `i`, recovered from `down`.
    fn down_count(&self, i: usize) -> usize {
        let f = self.down[i].1;
        (f * f).round() as usize
    }
}

/// `dst += scale · Lⱼ src`.
fn add_l(space: TwoModeSpace, mode: Mode, src: &CMatrix, scale: C64, dst: &mut CMatrix) {
    let d = space.dim();
    let occ: Vec<f64> = (0..d).map(|i| space.occupation(i, mode) as f64).collect();
    let s = src.as_slice();
    let out = dst.as_mut_slice();
    for j in 0..d {
        for i in 0..d {
            out[i + j * d] += scale * (occ[i] + occ[j]) * s[i + j * d];
        }
    }
}

/// Rows of the hopping operator `a₁a₂† + a₁†a₂` as (column, value) pairs.
fn hopping_rows(space: TwoModeSpace) -> Vec<[(usize, f64); 2]> {
    let c = space.cutoff();
    (0..space.dim())
        .map(|i| {
            let (m1, m2) = space.occupations(i);
            let mut row = [(NONE, 0.0); 2];
            // a₁a₂† |m1+1, m2−1⟩ = √(m1+1)√m2 |m1, m2⟩
            if m1 < c && m2 > 0 {
                row[0] = (space.index(m1 + 1, m2 - 1), (((m1 + 1) * m2) as f64).sqrt());
            }
            // a₁†a₂ |m1−1, m2+1⟩ = √m1 √(m2+1) |m1, m2⟩
            if m1 > 0 && m2 < c {
                row[1] = (space.index(m1 - 1, m2 + 1), ((m1 * (m2 + 1)) as f64).sqrt());
            }
            row
        })
        .collect()
}

/// `dst += scale · [a₁a₂† + a₁†a₂, src]`.
fn add_s(space: TwoModeSpace, src: &CMatrix, scale: C64, dst: &mut CMatrix) {
    let d = space.dim();
    let rows = hopping_rows(space);
    let s = src.as_slice();
    let out = dst.as_mut_slice();
    for j in 0..d {
        for i in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for &(k, v) in &rows[i] {
                if k != NONE {
                    acc += v * s[k + j * d];
                }
            }
            // The hopping matrix is real symmetric, so column j of it is row j.
            for &(l, v) in &rows[j] {
                if l != NONE {
                    acc -= v * s[i + l * d];
                }
            }
            out[i + j * d] += scale * acc;
        }
    }
}

/// `Jⱼ^{sign} ρ`.
pub fn apply_j(space: TwoModeSpace, sign: Sign, mode: Mode, rho: &CMatrix) -> Result<CMatrix> {
    check(space, rho)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    add_jump(space, &Ladder::new(space, mode), sign, rho, C64::new(1.0, 0.0), &mut out);
    Ok(out)
}

/// `Lⱼ ρ = aⱼ†aⱼ ρ + ρ aⱼ†aⱼ`.
pub fn apply_l(space: TwoModeSpace, mode: Mode, rho: &CMatrix) -> Result<CMatrix> {
    check(space, rho)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    add_l(space, mode, rho, C64::new(1.0, 0.0), &mut out);
    Ok(out)
}

/// `S ρ = [a₁a₂† + a₁†a₂, ρ]`.
pub fn apply_s(space: TwoModeSpace, rho: &CMatrix) -> Result<CMatrix> {
    check(space, rho)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    add_s(space, rho, C64::new(1.0, 0.0), &mut out);
    Ok(out)
}

/// `(J₁^{sign} + J₂^{sign}) ρ`.
pub fn apply_j_sum(space: TwoModeSpace, sign: Sign, rho: &CMatrix) -> Result<CMatrix> {
    check(space, rho)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    for mode in Mode::BOTH {
        add_jump(space, &Ladder::new(space, mode), sign, rho, C64::new(1.0, 0.0), &mut out);
    }
    Ok(out)
}

/// `(L₁ + L₂) ρ`.
pub fn apply_l_sum(space: TwoModeSpace, rho: &CMatrix) -> Result<CMatrix> {
    check(space, rho)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    for mode in Mode::BOTH {
        add_l(space, mode, rho, C64::new(1.0, 0.0), &mut out);
    }
    Ok(out)
}

/// Result of a superoperator exponential series.
#[derive(Debug, Clone)]
pub struct SeriesOutcome {
    pub value: CMatrix,
    /// Number of non-zero terms beyond the identity.
    pub terms: usize,
    /// Largest single contribution dropped at the cutoff.
    pub dropped: f64,
    /// Set when `dropped` exceeds 1e-10 relative to the result.
    pub truncated: bool,
}

/// Relative size below which a series term no longer changes the sum.
const NEGLIGIBLE: f64 = 1e-18;

/// Photon-number differences `N(i) − N(j)` over the non-zero entries of `m`.
pub fn sector_differences(space: TwoModeSpace, m: &CMatrix) -> Vec<i64> {
    let d = space.dim();
    let mut seen = vec![false; 4 * space.cutoff() + 1];
    let offset = 2 * space.cutoff() as i64;
    for j in 0..d {
        for i in 0..d {
            if m[(i, j)] != C64::new(0.0, 0.0) {
                seen[(space.total(i) as i64 - space.total(j) as i64 + offset) as usize] = true;
            }
        }
    }
    (0..seen.len()).filter(|&k| seen[k]).map(|k| k as i64 - offset).collect()
}

/// Entries of the `N`-difference band of a matrix, with the source entry
/// and weight of `J^{sign}` in each mode. Every superoperator here conserves
/// `N(i) − N(j)`, so a series started in the band stays in it.
#[derive(Debug, Clone)]
struct BandPlan {
    entries: Vec<usize>,
    src: [Vec<usize>; 2],
    weight: [Vec<f64>; 2],
    /// Source entries on the shell of a mode with the weight they would
    /// carry past the cutoff (`J⁺` only).
    dropped: Vec<(usize, f64)>,
}

impl BandPlan {
    fn new(space: TwoModeSpace, sign: Sign, differences: &[i64]) -> Self {
        let d = space.dim();
        let c = space.cutoff();
        let sectors = space.sectors();
        let strides = [c + 1, 1];
        let mut plan = BandPlan {
            entries: Vec::new(),
            src: [Vec::new(), Vec::new()],
            weight: [Vec::new(), Vec::new()],
            dropped: Vec::new(),
        };
        for j in 0..d {
            let nj = space.total(j) as i64;
            for &delta in differences {
                let n = nj + delta;
                if n < 0 || n > 2 * c as i64 {
                    continue;
                }
                for &i in &sectors[n as usize] {
                    let e = i + j * d;
                    plan.entries.push(e);
                    for (m, mode) in Mode::BOTH.into_iter().enumerate() {
                        let (ni, nj) = (space.occupation(i, mode), space.occupation(j, mode));
                        let st = strides[m];
                        let (src, w) = match sign {
                            Sign::Minus if ni < c && nj < c => {
                                ((i + st) + (j + st) * d, 2.0 * (((ni + 1) * (nj + 1)) as f64).sqrt())
                            }
                            Sign::Plus if ni > 0 && nj > 0 => ((i - st) + (j - st) * d, 2.0 * ((ni * nj) as f64).sqrt()),
                            _ => (e, 0.0),
                        };
                        plan.src[m].push(src);
                        plan.weight[m].push(w);
                        if sign == Sign::Plus && (ni == c || nj == c) {
                            plan.dropped.push((e, 2.0 * (((ni + 1) * (nj + 1)) as f64).sqrt()));
                        }
                    }
                }
            }
        }
        plan
    }
}

/// Reusable evaluation of `exp[coeff·(J₁^{sign} + J₂^{sign})]` on matrices
/// whose `N`-differences lie in a fixed set.
#[derive(Debug, Clone)]
pub struct SeriesPlan {
    space: TwoModeSpace,
    band: BandPlan,
}

impl SeriesPlan {
    pub fn new(space: TwoModeSpace, sign: Sign, differences: &[i64]) -> Self {
        Self { space, band: BandPlan::new(space, sign, differences) }
    }

    /// Entries of `rho` outside the plan's band are ignored.
    pub fn apply(&self, coeff: f64, rho: &CMatrix) -> Result<SeriesOutcome> {
        check(self.space, rho)?;
        let plan = &self.band;
        let mut value = CMatrix::zeros(rho.nrows(), rho.ncols());
        for &e in &plan.entries {
            value.as_mut_slice()[e] = rho.as_slice()[e];
        }
        let mut dropped = 0.0_f64;
        let mut terms = 0;
        if coeff != 0.0 {
            let mut term: Vec<C64> = value.as_slice().to_vec();
            let mut next = vec![C64::new(0.0, 0.0); term.len()];
            // Each application moves both sides one photon; 2·cutoff + 1
            // steps empty the box in either direction.
            for k in 1..=(2 * self.space.cutoff() + 1) {
                let scale = coeff / k as f64;
                for &(e, w) in &plan.dropped {
                    dropped = dropped.max(scale.abs() * w * term[e].norm());
                }
                let mut size = 0.0_f64;
                for (p, &e) in plan.entries.iter().enumerate() {
                    let z = (term[plan.src[0][p]] * plan.weight[0][p] + term[plan.src[1][p]] * plan.weight[1][p])
                        * scale;
                    next[e] = z;
                    size = size.max(z.norm_sqr());
                }
                std::mem::swap(&mut term, &mut next);
                if size == 0.0 {
                    break;
                }
                let out = value.as_mut_slice();
                let mut value_max = 0.0_f64;
                for &e in &plan.entries {
                    out[e] += term[e];
                    value_max = value_max.max(out[e].norm_sqr());
                }
                terms = k;
                if size <= NEGLIGIBLE * NEGLIGIBLE * value_max {
                    break;
                }
            }
        }
        let truncated = dropped > 1e-10 * max_abs(&value);
        Ok(SeriesOutcome { value, terms, dropped, truncated })
    }
}

/// `exp[coeff·(J₁^{sign} + J₂^{sign})] ρ`, summed until the series
/// terminates: `J⁻` runs out of photons, `J⁺` runs into the cutoff.
pub fn exp_j_sum(space: TwoModeSpace, sign: Sign, coeff: f64, rho: &CMatrix) -> Result<SeriesOutcome> {
    check(space, rho)?;
    if coeff == 0.0 {
        return Ok(SeriesOutcome { value: rho.clone(), terms: 0, dropped: 0.0, truncated: false });
    }
    SeriesPlan::new(space, sign, &sector_differences(space, rho)).apply(coeff, rho)
}

/// Right-hand side of the thermal two-mode Lindblad master equation,
///
/// `−ig S ρ + (n̄+1) Σⱼ γⱼ (J⁻ⱼ − Lⱼ) ρ + n̄ Σⱼ γⱼ (J⁺ⱼ − Lⱼ − 2) ρ`.
pub fn lindblad_generator(space: TwoModeSpace, rho: &CMatrix, config: &SimConfig) -> Result<CMatrix> {
    check(space, rho)?;
    let d = space.dim();
    let n = config.nbar;
    let mut out = CMatrix::zeros(d, d);
    add_s(space, rho, C64::new(0.0, -config.g), &mut out);
    for (mode, gamma) in [(Mode::One, config.gamma1), (Mode::Two, config.gamma2)] {
        if gamma == 0.0 {
            continue;
        }
        let ladder = Ladder::new(space, mode);
        add_jump(space, &ladder, Sign::Minus, rho, C64::new(gamma * (n + 1.0), 0.0), &mut out);
        add_jump(space, &ladder, Sign::Plus, rho, C64::new(gamma * n, 0.0), &mut out);
        add_l(space, mode, rho, C64::new(-gamma * (2.0 * n + 1.0), 0.0), &mut out);
        out -= rho.scale(2.0 * gamma * n);
    }
    Ok(out)
}

/// The generator conjugated by the thermal transformations, evaluated by
/// composing the exponential series:
/// `e^{χJ⁻} e^{η₊J⁺} 𝓛 e^{−η₊J⁺} e^{−χJ⁻} ρ`.
///
/// The inner `e^{−η₊J⁺}` tail is cut at the cutoff and then folded back
/// down by `e^{χJ⁻}`, so this converges with the cutoff only for small `n̄`;
/// see [`conjugated_generator`] for a form that is exact with finite headroom.
pub fn conjugated_generator_series(space: TwoModeSpace, rho: &CMatrix, config: &SimConfig) -> Result<CMatrix> {
    let p = thermal_params(config.nbar, config.gamma1, config.gamma2)?;
    let x = exp_j_sum(space, Sign::Minus, -p.chi, rho)?.value;
    let x = exp_j_sum(space, Sign::Plus, -p.eta_plus, &x)?.value;
    let x = lindblad_generator(space, &x, config)?;
    let x = exp_j_sum(space, Sign::Plus, p.eta_plus, &x)?.value;
    Ok(exp_j_sum(space, Sign::Minus, p.chi, &x)?.value)
}

/// Conjugated generator with the size of its highest retained orders.
#[derive(Debug, Clone)]
pub struct ConjugationOutcome {
    pub value: CMatrix,
    /// Largest max-norm among the terms of the two highest orders of the
    /// outer and inner nested-commutator series.
    pub tail: f64,
}

/// `Σₖ cᵏ/k! ad_A^k(X) σ` with `ad_A^k(X) = Σᵢ C(k,i)(−1)ⁱ A^{k−i} X Aⁱ`.
fn adjoint_series<A, X>(sigma: &CMatrix, coeff: f64, order: usize, apply_a: A, apply_x: X) -> Result<(CMatrix, f64)>
where
    A: Fn(&CMatrix) -> Result<CMatrix>,
    X: Fn(&CMatrix) -> Result<CMatrix>,
{
    // table[i][j] = A^j X A^i σ
    let mut powers = vec![sigma.clone()];
    for i in 1..=order {
        powers.push(apply_a(&powers[i - 1])?);
    }
    let mut table: Vec<Vec<CMatrix>> = Vec::with_capacity(order + 1);
    for (i, p) in powers.iter().enumerate() {
        let mut row = vec![apply_x(p)?];
        for j in 1..=(order - i) {
            let next = apply_a(&row[j - 1])?;
            row.push(next);
        }
        table.push(row);
    }
    let mut sum = table[0][0].clone();
    let mut tail = 0.0_f64;
    let mut factor = 1.0;
    for k in 1..=order {
        factor *= coeff / k as f64;
        let mut term = CMatrix::zeros(sigma.nrows(), sigma.ncols());
        let mut binom = 1.0;
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            term += table[i][k - i].scale(sign * binom);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        term *= C64::new(factor, 0.0);
        if k + 1 >= order {
            tail = tail.max(max_abs(&term));
        }
        sum += term;
    }
    Ok((sum, tail))
}

/// Default order of the nested-commutator expansions. The adjoint actions
/// of `J⁺` and `J⁻` on the generator vanish from third order on, so order 4
/// leaves two orders that must come out at roundoff level.
pub const CONJUGATION_ORDER: usize = 4;

/// The conjugated generator `e^{χJ⁻} e^{η₊J⁺} 𝓛 e^{−η₊J⁺} e^{−χJ⁻} ρ`
/// evaluated through the adjoint action
/// `e^{cA} X e^{−cA} = Σₖ cᵏ/k! ad_A^k(X)`, applied to `ρ` term by term.
///
/// Every term only raises `ρ` by a bounded number of quanta, so the result is
/// exact whenever `ρ` leaves `order + 1` quanta of headroom below the cutoff
/// in each mode. Returns a truncation error otherwise.
pub fn conjugated_generator(
    space: TwoModeSpace,
    rho: &CMatrix,
    config: &SimConfig,
    order: usize,
) -> Result<ConjugationOutcome> {
    check(space, rho)?;
    let p = thermal_params(config.nbar, config.gamma1, config.gamma2)?;
    let support = crate::fock::max_mode_occupation(space, rho);
    if support + order + 1 > space.cutoff() {
        return Err(Error::Truncation(format!(
            "conjugation of order {order} needs occupation {} ≤ cutoff {}",
            support + order + 1,
            space.cutoff()
        )));
    }
    let jp = |m: &CMatrix| apply_j_sum(space, Sign::Plus, m);
    let jm = |m: &CMatrix| apply_j_sum(space, Sign::Minus, m);
    let inner_tail = std::cell::Cell::new(0.0_f64);
    let inner = |m: &CMatrix| -> Result<CMatrix> {
        let (v, t) = adjoint_series(m, p.eta_plus, order, jp, |x: &CMatrix| {
            lindblad_generator(space, x, config)
        })?;
        inner_tail.set(inner_tail.get().max(t));
        Ok(v)
    };
    let (value, outer_tail) = adjoint_series(rho, p.chi, order, jm, inner)?;
    Ok(ConjugationOutcome { value, tail: outer_tail.max(inner_tail.get()) })
}
