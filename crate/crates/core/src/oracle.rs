//! Brute-force reference: the master equation integrated directly on
//! column-stacked density matrices.
//!
//! The Liouvillian is assembled from the ladder matrices with
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)` and stored sparse. Nothing here touches
//! the transformed pipeline.
//!
//! Every term of the generator conserves `N(row) − N(column)`, so the
//! integration only carries the entries whose photon-number difference
//! occurs in the initial state.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, Mode, TwoModeSpace};
use crate::linalg::{expm, CMatrix, C64};
use std::collections::BTreeSet;

/// Largest dense Liouvillian (entries) the expm path will build.
pub const DENSE_ENTRY_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Step size; `None` selects `1e-3 / max(g, γ₁, γ₂, g·n̄, 1)`.
    pub dt: Option<f64>,
    pub max_steps: usize,
    /// Target truncation error used to size the oracle's own space.
    pub error_budget: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: None, max_steps: 50_000_000, error_budget: 1e-8 }
    }
}

impl IntegratorConfig {
    pub fn step(&self, config: &SimConfig) -> Result<f64> {
        let dt = self.dt.unwrap_or_else(|| default_dt(config));
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("step size must be > 0, got {dt}")));
        }
        Ok(dt)
    }
}

pub fn default_dt(c: &SimConfig) -> f64 {
    1e-3 / [c.g, c.gamma1, c.gamma2, c.g * c.nbar, 1.0].into_iter().fold(0.0, f64::max)
}

/// Compressed sparse row matrix acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct VectorizedLiouvillian {
    space: TwoModeSpace,
    /// Positions in `vec(ρ)` kept by this operator, ascending.
    support: Vec<usize>,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

type Triplets = Vec<(usize, usize, C64)>;

fn sparse(m: &CMatrix) -> Triplets {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != C64::new(0.0, 0.0) {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// `coeff · (Bᵀ ⊗ A)` appended as triplets on `vec` indices.
fn push_kron(out: &mut Triplets, d: usize, bt: &Triplets, a: &Triplets, coeff: C64) {
    for &(j, l, b) in bt {
        for &(i, k, av) in a {
            out.push((i + j * d, k + l * d, coeff * b * av));
        }
    }
}

fn check_rates(c: &SimConfig) -> Result<()> {
    for (name, v) in [("g", c.g), ("gamma1", c.gamma1), ("gamma2", c.gamma2), ("nbar", c.nbar)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("{name} must be ≥ 0, got {v}")));
        }
    }
    Ok(())
}

impl VectorizedLiouvillian {
    /// Full Liouvillian on `space`.
    pub fn new(config: &SimConfig, space: TwoModeSpace) -> Result<Self> {
        Self::restricted(config, space, None)
    }

    /// Liouvillian restricted to the entries `(i, j)` with
    /// `N(i) − N(j) ∈ differences` (all entries when `None`).
    pub fn restricted(config: &SimConfig, space: TwoModeSpace, differences: Option<&BTreeSet<i64>>) -> Result<Self> {
        check_rates(config)?;
        let d = space.dim();
        let ident = sparse(&CMatrix::identity(d, d));
        let a1 = fock::annihilator(space, Mode::One).into_matrix();
        let a2 = fock::annihilator(space, Mode::Two).into_matrix();
        let hop = (&a1 * a2.adjoint() + a1.adjoint() * &a2).scale(config.g);
        let hop_s = sparse(&hop);
        let hop_t = sparse(&hop.transpose());
        let i = C64::new(0.0, 1.0);

        let mut t: Triplets = Vec::new();
        push_kron(&mut t, d, &ident, &hop_s, -i);
        push_kron(&mut t, d, &hop_t, &ident, i);
        for (a, gamma) in [(&a1, config.gamma1), (&a2, config.gamma2)] {
            if gamma == 0.0 {
                continue;
            }
            let ad = a.adjoint();
            let n = &ad * a;
            let (loss, gain) = (gamma * (config.nbar + 1.0), gamma * config.nbar);
            let n_s = sparse(&n);
            let n_t = sparse(&n.transpose());
            // 2 a ρ a†: Bᵀ = (a†)ᵀ = conj(a)
            push_kron(&mut t, d, &sparse(&a.map(|z| z.conj())), &sparse(a), C64::new(2.0 * loss, 0.0));
            // 2 a† ρ a: Bᵀ = aᵀ
            push_kron(&mut t, d, &sparse(&a.transpose()), &sparse(&ad), C64::new(2.0 * gain, 0.0));
            // −{a†a, ρ} at both rates, and −{aa†, ρ} + {a†a, ρ} = −2ρ for the gain.
            let damp = C64::new(-(loss + gain), 0.0);
            push_kron(&mut t, d, &ident, &n_s, damp);
            push_kron(&mut t, d, &n_t, &ident, damp);
            push_kron(&mut t, d, &ident, &ident, C64::new(-2.0 * gain, 0.0));
        }

        let keep = |v: usize| match differences {
            None => true,
            Some(set) => set.contains(&(space.total(v % d) as i64 - space.total(v / d) as i64)),
        };
        let support: Vec<usize> = (0..d * d).filter(|&v| keep(v)).collect();
        let mut position = vec![usize::MAX; d * d];
        for (p, &v) in support.iter().enumerate() {
            position[v] = p;
        }
        t.retain(|&(r, c, _)| position[r] != usize::MAX && position[c] != usize::MAX);
        for e in t.iter_mut() {
            e.0 = position[e.0];
            e.1 = position[e.1];
        }
        t.sort_by_key(|&(r, c, _)| (r, c));

        let mut indptr = vec![0usize; support.len() + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..support.len() {
            indptr[r + 1] += indptr[r];
        }
        Ok(Self { space, support, indptr, indices, values })
    }

    pub fn space(&self) -> TwoModeSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Restricts `vec(ρ)` to the operator's support.
    pub fn gather(&self, rho: &CMatrix) -> Vec<C64> {
        let flat = rho.as_slice();
        self.support.iter().map(|&v| flat[v]).collect()
    }

    /// Inverse of [`gather`](Self::gather); entries outside the support are zero.
    pub fn scatter(&self, x: &[C64]) -> CMatrix {
        let d = self.space.dim();
        let mut m = CMatrix::zeros(d, d);
        let flat = m.as_mut_slice();
        for (&v, &z) in self.support.iter().zip(x) {
            flat[v] = z;
        }
        m
    }

    /// `y = L̂ x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    /// Applies the operator to a full matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let x = self.gather(rho);
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_into(&x, &mut y);
        self.scatter(&y)
    }

    /// Dense form on the support.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let n = self.len();
        if n.saturating_mul(n) > DENSE_ENTRY_LIMIT {
            return Err(Error::Config(format!(
                "dense Liouvillian of size {n}² exceeds the {DENSE_ENTRY_LIMIT} entry budget"
            )));
        }
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] += self.values[k];
            }
        }
        Ok(m)
    }
}

/// Full vectorized Liouvillian on the configuration's cutoff.
pub fn liouvillian_matrix(config: &SimConfig, space: TwoModeSpace) -> Result<VectorizedLiouvillian> {
    VectorizedLiouvillian::new(config, space)
}

/// Cutoff of the oracle's space: thermal population `pᵏ` with
/// `p = n̄/(1+n̄)` at `k` quanta above the initial occupation must fall
/// below the error budget.
pub fn oracle_cutoff(config: &SimConfig, max_occupation: usize, budget: f64) -> usize {
    if config.nbar == 0.0 || config.pad_tolerance.is_none() {
        return config.cutoff;
    }
    let p = config.nbar / (1.0 + config.nbar);
    let k = (budget.ln() / p.ln()).ceil().max(0.0) as usize;
    config.cutoff.max(max_occupation + k)
}

fn differences(space: TwoModeSpace, rho: &CMatrix) -> BTreeSet<i64> {
    let d = space.dim();
    let mut set = BTreeSet::new();
    for j in 0..d {
        for i in 0..d {
            if rho[(i, j)] != C64::new(0.0, 0.0) {
                set.insert(space.total(i) as i64 - space.total(j) as i64);
            }
        }
    }
    set
}

struct Prepared {
    space: TwoModeSpace,
    op: VectorizedLiouvillian,
    x0: Vec<C64>,
}

fn prepare(rho0: &DensityMatrix, config: &SimConfig, icfg: &IntegratorConfig) -> Result<Prepared> {
    let base = TwoModeSpace::new(config.cutoff)?;
    if rho0.space() != base {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: rho0.space().dim() });
    }
    let space = TwoModeSpace::new(oracle_cutoff(config, rho0.max_mode_occupation(), icfg.error_budget))?;
    let rho = rho0.embed(space)?;
    let op = VectorizedLiouvillian::restricted(config, space, Some(&differences(space, rho.matrix())))?;
    let x0 = op.gather(rho.matrix());
    Ok(Prepared { space, op, x0 })
}

/// RK4 solution at each of `times` (any order, all ≥ 0), on the oracle's
/// space. Integrates once up to the largest time.
pub fn integrate_times(
    rho0: &DensityMatrix,
    times: &[f64],
    config: &SimConfig,
    icfg: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    let dt = icfg.step(config)?;
    let tmax = times.iter().copied().fold(0.0, f64::max);
    let total_steps = (tmax / dt).ceil() as usize + times.len();
    if total_steps > icfg.max_steps {
        return Err(Error::Config(format!(
            "integration to t = {tmax} needs ~{total_steps} steps, above the limit {}",
            icfg.max_steps
        )));
    }
    let p = prepare(rho0, config, icfg)?;
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let n = p.op.len();
    let mut x = p.x0.clone();
    let mut k = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut now = 0.0;
    let mut out: Vec<Option<DensityMatrix>> = vec![None; times.len()];
    for idx in order {
        let span = times[idx] - now;
        let steps = (span / dt).ceil() as usize;
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                rk4_step(&p.op, &mut x, h, &mut k, &mut tmp);
            }
        }
        now = times[idx];
        out[idx] = Some(DensityMatrix::from_evolved(p.space, p.op.scatter(&x))?);
    }
    Ok(out.into_iter().map(|r| r.expect("every time visited")).collect())
}

fn rk4_step(op: &VectorizedLiouvillian, x: &mut [C64], h: f64, k: &mut [Vec<C64>; 4], tmp: &mut [C64]) {
    op.apply_into(x, &mut k[0]);
    for (t, (xi, ki)) in tmp.iter_mut().zip(x.iter().zip(&k[0])) {
        *t = xi + ki * (0.5 * h);
    }
    op.apply_into(tmp, &mut k[1]);
    for (t, (xi, ki)) in tmp.iter_mut().zip(x.iter().zip(&k[1])) {
        *t = xi + ki * (0.5 * h);
    }
    op.apply_into(tmp, &mut k[2]);
    for (t, (xi, ki)) in tmp.iter_mut().zip(x.iter().zip(&k[2])) {
        *t = xi + ki * h;
    }
    op.apply_into(tmp, &mut k[3]);
    for i in 0..x.len() {
        x[i] += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * (h / 6.0);
    }
}

/// RK4 solution at `t` on the oracle's space.
pub fn integrate(rho0: &DensityMatrix, t: f64, config: &SimConfig, icfg: &IntegratorConfig) -> Result<DensityMatrix> {
    Ok(integrate_times(rho0, &[t], config, icfg)?.remove(0))
}

/// `exp(L̂ t) vec(ρ₀)` with the dense Liouvillian; small spaces only.
pub fn expm_propagate(rho0: &DensityMatrix, t: f64, config: &SimConfig, icfg: &IntegratorConfig) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    let p = prepare(rho0, config, icfg)?;
    let l = p.op.to_dense()?;
    let x0 = nalgebra::DVector::from_vec(p.x0);
    let x = expm(&(l * C64::new(t, 0.0))) * x0;
    DensityMatrix::from_evolved(p.space, p.op.scatter(x.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::number_state;
    use crate::linalg::{max_abs, trace};
    use crate::superop::lindblad_generator;
    use crate::sampling::{random_hermitian, restrict_to_total};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fock_rho(space: TwoModeSpace, n1: usize, n2: usize) -> DensityMatrix {
        number_state(space, n1, n2).unwrap().projector()
    }

    #[test]
    fn default_step_formula() {
        let c = SimConfig::new(2.0, 0.5, 3.0, 2.0, 4).unwrap();
        assert_eq!(default_dt(&c), 1e-3 / 4.0);
        let c = SimConfig::new(0.1, 0.0, 0.0, 0.0, 4).unwrap();
        assert_eq!(default_dt(&c), 1e-3);
    }

    #[test]
    fn vectorized_matches_generator() {
        let s = TwoModeSpace::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for nbar in [0.0, 0.3] {
            let c = SimConfig::new(1.2, 0.4, 0.9, nbar, 4).unwrap();
            let l = liouvillian_matrix(&c, s).unwrap();
            let rho = random_hermitian(s.dim(), &mut rng);
            let diff = max_abs(&(l.apply(&rho) - lindblad_generator(s, &rho, &c).unwrap()));
            assert!(diff <= 1e-12, "{diff:e}");
        }
    }

    #[test]
    fn trace_functional_is_left_null_vector() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.7, 0.2, 0.4, 4).unwrap();
        let l = liouvillian_matrix(&c, s).unwrap().to_dense().unwrap();
        let d = s.dim();
        // Columns of states below the shell.
        for j in 0..d {
            for i in 0..d {
                let (a, b) = (s.occupations(i), s.occupations(j));
                if a.0.max(a.1).max(b.0).max(b.1) >= s.cutoff() {
                    continue;
                }
                let col = i + j * d;
                let sum: C64 = (0..d).map(|k| l[(k + k * d, col)]).sum();
                assert!(sum.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn restriction_is_closed() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.3, 0.5, 0.2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = restrict_to_total(s, &random_hermitian(s.dim(), &mut rng), 2);
        let mut diag_only = rho.clone();
        for j in 0..s.dim() {
            for i in 0..s.dim() {
                if s.total(i) != s.total(j) {
                    diag_only[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        let set: BTreeSet<i64> = [0].into_iter().collect();
        let part = VectorizedLiouvillian::restricted(&c, s, Some(&set)).unwrap();
        let full = VectorizedLiouvillian::new(&c, s).unwrap();
        assert!(part.len() < full.len());
        assert!(max_abs(&(part.apply(&diag_only) - full.apply(&diag_only))) < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.3, 0.1, 0.0, 4).unwrap();
        let rho0 = fock_rho(s, 1, 1);
        let out = integrate(&rho0, 0.0, &c, &IntegratorConfig::default()).unwrap();
        assert_eq!(out.matrix(), rho0.matrix());
    }

    #[test]
    fn lossless_hom_dip() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.0, 0.0, 0.0, 4).unwrap();
        let out = integrate(&fock_rho(s, 1, 1), PI / 4.0, &c, &IntegratorConfig::default()).unwrap();
        assert!(out.population(1, 1).unwrap() <= 1e-8);
        let t = 0.4;
        let out = integrate(&fock_rho(s, 1, 1), t, &c, &IntegratorConfig::default()).unwrap();
        assert!((out.population(1, 1).unwrap() - (2.0 * t).cos().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn step_halving_converges() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.2, 0.1, 0.01, 4).unwrap();
        let rho0 = fock_rho(s, 1, 1);
        let base = IntegratorConfig::default();
        let dt = base.step(&c).unwrap();
        let a = integrate(&rho0, 1.0, &c, &base).unwrap();
        let b = integrate(&rho0, 1.0, &c, &IntegratorConfig { dt: Some(dt / 2.0), ..base }).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) <= 1e-9);
    }

    #[test]
    fn single_mode_decay_rate() {
        // d⟨n⟩/dt = −2γ₁⟨n⟩ + 2γ₁n̄ ⇒ ⟨n⟩(t) = n̄ + (1 − n̄)e^{−2γ₁t}
        let s = TwoModeSpace::new(8).unwrap();
        let c = SimConfig { g: 0.0, gamma1: 0.4, gamma2: 0.0, nbar: 0.1, cutoff: 8, ..SimConfig::default() };
        let times = [0.5, 1.0, 2.5];
        let out = integrate_times(&fock_rho(s, 1, 0), &times, &c, &IntegratorConfig::default()).unwrap();
        for (t, rho) in times.iter().zip(&out) {
            let n = fock::number_operator(rho.space(), Mode::One).into_matrix();
            let occ = trace(&(n * rho.matrix())).re;
            let expected = 0.1 + 0.9 * (-0.8 * t).exp();
            assert!((occ - expected).abs() < 1e-7, "t = {t}: {occ} vs {expected}");
        }
    }

    #[test]
    fn expm_and_rk4_agree() {
        let s = TwoModeSpace::new(4).unwrap();
        let c = SimConfig::new(1.0, 0.2, 0.1, 0.01, 4).unwrap().with_padding(None);
        let rho0 = fock_rho(s, 1, 1);
        let icfg = IntegratorConfig::default();
        let times = [0.5, 1.0, 2.0];
        let rk = integrate_times(&rho0, &times, &c, &icfg).unwrap();
        for (t, r) in times.iter().zip(&rk) {
            let e = expm_propagate(&rho0, *t, &c, &icfg).unwrap();
            assert!(max_abs(&(e.matrix() - r.matrix())) <= 1e-8);
        }
    }

    #[test]
    fn trace_drift_is_small() {
        let s = TwoModeSpace::new(6).unwrap();
        let c = SimConfig::new(1.0, 0.5, 0.2, 0.05, 6).unwrap();
        let out = integrate(&fock_rho(s, 1, 1), 5.0 / 0.2, &c, &IntegratorConfig::default()).unwrap();
        assert!((trace(out.matrix()).re - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn step_limit_is_enforced() {
        let s = TwoModeSpace::new(3).unwrap();
        let c = SimConfig::new(1.0, 0.1, 0.1, 0.0, 3).unwrap();
        let icfg = IntegratorConfig { max_steps: 10, ..IntegratorConfig::default() };
        assert!(matches!(integrate(&fock_rho(s, 1, 0), 1.0, &c, &icfg), Err(Error::Config(_))));
    }
}
