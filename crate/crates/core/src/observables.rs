//! Observables, state diagnostics and the Hong-Ou-Mandel sweep.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::fock::{number_state, DensityMatrix, Mode};
use crate::linalg::{hermiticity_defect, hermitian_eigenvalues, trace};
use crate::solver::Evolution;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Population `⟨1,1|ρ|1,1⟩` of one photon in each mode.
pub fn coincidence_rate(rho: &DensityMatrix) -> Result<f64> {
    let space = rho.space();
    if space.cutoff() < 1 {
        return Err(Error::Domain("coincidence rate needs cutoff ≥ 1".into()));
    }
    let i = space.index(1, 1);
    Ok(rho.matrix()[(i, i)].re)
}

/// `Tr(aⱼ†aⱼ ρ)`.
pub fn mode_occupation(rho: &DensityMatrix, mode: Mode) -> f64 {
    let space = rho.space();
    (0..space.dim())
        .map(|i| space.occupation(i, mode) as f64 * rho.matrix()[(i, i)].re)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub trace_deviation: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    /// Population on states with `n₁ = cutoff` or `n₂ = cutoff`.
    pub leakage: f64,
}

pub fn leakage(rho: &DensityMatrix) -> f64 {
    let space = rho.space();
    let c = space.cutoff();
    (0..space.dim())
        .filter(|&i| {
            let (n1, n2) = space.occupations(i);
            n1 == c || n2 == c
        })
        .map(|i| rho.matrix()[(i, i)].re)
        .sum()
}

pub fn diagnostics(rho: &DensityMatrix) -> Diagnostics {
    let m = rho.matrix();
    Diagnostics {
        trace_deviation: (trace(m) - 1.0).norm(),
        hermiticity_defect: hermiticity_defect(m),
        min_eigenvalue: hermitian_eigenvalues(m).first().copied().unwrap_or(0.0),
        leakage: leakage(rho),
    }
}

/// `n` points spanning `[0, end]`.
pub fn linspace(end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Times `[0, π/g]` in 201 points with the dip time `π/4g` set exactly.
pub fn default_time_grid(g: f64) -> Vec<f64> {
    time_grid(PI / g, 201, g)
}

/// `n` points over `[0, tmax]`, with `π/4g` injected: it replaces a grid
/// point it coincides with up to roundoff and is inserted otherwise.
pub fn time_grid(tmax: f64, n: usize, g: f64) -> Vec<f64> {
    let mut grid = linspace(tmax, n);
    let dip = PI / (4.0 * g);
    if dip <= tmax {
        match grid.iter().position(|t| (t - dip).abs() <= 1e-12 * dip.max(1.0)) {
            Some(k) => grid[k] = dip,
            None => {
                grid.push(dip);
                grid.sort_by(|a, b| a.total_cmp(b));
            }
        }
    }
    grid
}

/// `γ₁/g` in 101 points over `[0, 1]`.
pub fn default_gamma_grid() -> Vec<f64> {
    linspace(1.0, 101)
}

/// Summary of one `γ₁` column of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnDiagnostics {
    /// Diagnostics of the state at the last valid time.
    pub last: Diagnostics,
    /// Largest leakage over the column.
    pub max_leakage: f64,
    /// Largest trace deviation over the column.
    pub max_trace_deviation: f64,
    pub working_cutoff: usize,
}

/// `P₁₁(t, γ₁)` starting from `|1,1⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceGrid {
    pub times: Vec<f64>,
    pub gamma1_over_g: Vec<f64>,
    /// `values[k][i]` at `gamma1_over_g[k]`, `times[i]`; NaN when invalid.
    pub values: Vec<Vec<f64>>,
    pub valid: Vec<Vec<bool>>,
    pub diagnostics: Vec<Option<ColumnDiagnostics>>,
    pub nbar: f64,
    pub gamma2: f64,
    pub g: f64,
    pub cutoff: usize,
}

impl CoincidenceGrid {
    pub fn cells(&self) -> usize {
        self.times.len() * self.gamma1_over_g.len()
    }

    pub fn invalid_cells(&self) -> usize {
        self.valid.iter().flatten().filter(|v| !**v).count()
    }

    pub fn invalid_fraction(&self) -> f64 {
        if self.cells() == 0 {
            0.0
        } else {
            self.invalid_cells() as f64 / self.cells() as f64
        }
    }

    /// Rows `(t, γ₁/g, P₁₁, valid)` ordered by `γ₁`, then `t`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, bool)> + '_ {
        self.gamma1_over_g.iter().enumerate().flat_map(move |(k, &gm)| {
            self.times
                .iter()
                .enumerate()
                .map(move |(i, &t)| (t, gm, self.values[k][i], self.valid[k][i]))
        })
    }

    /// Smallest valid value and its time over `t ≤ tmax` in column `k`.
    pub fn minimum(&self, k: usize, tmax: f64) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.values[k])
            .zip(&self.valid[k])
            .filter(|((t, _), ok)| **ok && **t <= tmax)
            .map(|((t, p), _)| (*t, *p))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Time of the first interior local minimum of column `k`.
    pub fn first_local_minimum(&self, k: usize) -> Option<f64> {
        let p = &self.values[k];
        (1..p.len().saturating_sub(1))
            .find(|&i| {
                self.valid[k][i - 1..=i + 1].iter().all(|v| *v) && p[i] < p[i - 1] && p[i] <= p[i + 1]
            })
            .map(|i| self.times[i])
    }
}

struct Column {
    values: Vec<f64>,
    valid: Vec<bool>,
    diagnostics: Option<ColumnDiagnostics>,
}

fn sweep_column(config: &SimConfig, times: &[f64], gamma1_over_g: f64) -> Column {
    let invalid = || Column { values: vec![f64::NAN; times.len()], valid: vec![false; times.len()], diagnostics: None };
    let cfg = SimConfig { gamma1: gamma1_over_g * config.g, ..*config };
    let space = match crate::fock::TwoModeSpace::new(cfg.cutoff) {
        Ok(s) => s,
        Err(_) => return invalid(),
    };
    let evolution = match number_state(space, 1, 1).and_then(|s| Evolution::new(&s.projector(), &cfg)) {
        Ok(e) => e,
        Err(_) => return invalid(),
    };
    let mut values = Vec::with_capacity(times.len());
    let mut valid = Vec::with_capacity(times.len());
    let mut last = None;
    let (mut max_leakage, mut max_trace) = (0.0_f64, 0.0_f64);
    for &t in times {
        match evolution.at(t).and_then(|rho| coincidence_rate(&rho).map(|p| (rho, p))) {
            Ok((rho, p)) => {
                values.push(p);
                valid.push(true);
                max_leakage = max_leakage.max(leakage(&rho));
                max_trace = max_trace.max((trace(rho.matrix()) - 1.0).norm());
                last = Some(rho);
            }
            Err(_) => {
                values.push(f64::NAN);
                valid.push(false);
            }
        }
    }
    let diagnostics = last.map(|rho| ColumnDiagnostics {
        last: diagnostics(&rho),
        max_leakage,
        max_trace_deviation: max_trace,
        working_cutoff: evolution.working_space().cutoff(),
    });
    Column { values, valid, diagnostics }
}

/// Evaluates `P₁₁` from `|1,1⟩` on the grid `times × gamma1_over_g`, with
/// `γ₂`, `n̄`, `g` and the cutoff taken from `config`. Columns run in
/// parallel on the current rayon pool when `parallel` is set; the result
/// does not depend on scheduling. Failures mark cells invalid.
pub fn hom_sweep(config: &SimConfig, times: &[f64], gamma1_over_g: &[f64], parallel: bool) -> Result<CoincidenceGrid> {
    config.validate()?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    if let Some(x) = gamma1_over_g.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("γ₁/g must be ≥ 0, got {x}")));
    }
    let columns: Vec<Column> = if parallel {
        gamma1_over_g.par_iter().map(|&x| sweep_column(config, times, x)).collect()
    } else {
        gamma1_over_g.iter().map(|&x| sweep_column(config, times, x)).collect()
    };
    let mut grid = CoincidenceGrid {
        times: times.to_vec(),
        gamma1_over_g: gamma1_over_g.to_vec(),
        values: Vec::with_capacity(columns.len()),
        valid: Vec::with_capacity(columns.len()),
        diagnostics: Vec::with_capacity(columns.len()),
        nbar: config.nbar,
        gamma2: config.gamma2,
        g: config.g,
        cutoff: config.cutoff,
    };
    for c in columns {
        grid.values.push(c.values);
        grid.valid.push(c.valid);
        grid.diagnostics.push(c.diagnostics);
    }
    Ok(grid)
}
