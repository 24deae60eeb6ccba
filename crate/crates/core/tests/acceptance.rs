//! Acceptance criteria, each checked against an oracle built here from dense
//! ladder matrices, closed forms or the brute-force integrator.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines as they are produced; they are also written straight
//! to stdout so that they appear in captured runs.

use coupled_modes::fock::{annihilator, number_state, DensityMatrix, Mode, TwoModeSpace};
use coupled_modes::linalg::{max_abs, schur_eigenvalues, trace_distance, CMatrix, C64};
use coupled_modes::observables::{
    coincidence_rate, default_gamma_grid, default_time_grid, hom_sweep, mode_occupation, CoincidenceGrid,
};
use coupled_modes::oracle::{integrate_times, IntegratorConfig};
use coupled_modes::sampling::{random_hermitian, random_rank2_mixture, restrict_to_total};
use coupled_modes::solver::{diagonalize, effective_hamiltonian, propagator, Evolution};
use coupled_modes::superop::{
    apply_j, apply_j_sum, apply_l, apply_s, conjugated_generator, g_offset, thermal_params, Sign, CONJUGATION_ORDER,
};
use coupled_modes::{Method, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::Write;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(n: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let passed = out.passed && in_time;
    let line = format!(
        "criterion {n} {name}: {} ({}; {:.2}s of {}s)\n",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    let mut stdout = std::io::stdout();
    let _ = stdout.write_all(line.as_bytes());
    let _ = stdout.flush();
    passed
}

fn config(g: f64, g1: f64, g2: f64, nbar: f64, cutoff: usize) -> SimConfig {
    SimConfig::new(g, g1, g2, nbar, cutoff).unwrap()
}

fn fock(cutoff: usize, n1: usize, n2: usize) -> DensityMatrix {
    number_state(TwoModeSpace::new(cutoff).unwrap(), n1, n2).unwrap().projector()
}

/// Trace distance on the larger of the two truncations.
fn distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let target = if a.space().cutoff() >= b.space().cutoff() { a.space() } else { b.space() };
    trace_distance(&a.space().transfer(a.matrix(), &target), &b.space().transfer(b.matrix(), &target))
}

fn ladder(space: TwoModeSpace, mode: Mode) -> (CMatrix, CMatrix) {
    let a = annihilator(space, mode).into_matrix();
    let ad = a.adjoint();
    (a, ad)
}

/// `−i(γ₁a₁†a₁ + γ₂a₂†a₂) + g(a₁†a₂ + a₂†a₁)` from ladder matrices.
fn dense_effective_hamiltonian(c: &SimConfig, space: TwoModeSpace) -> CMatrix {
    let (a1, a1d) = ladder(space, Mode::One);
    let (a2, a2d) = ladder(space, Mode::Two);
    let damping = (&a1d * &a1).scale(c.gamma1) + (&a2d * &a2).scale(c.gamma2);
    damping * C64::new(0.0, -1.0) + (&a1d * &a2 + &a2d * &a1).scale(c.g)
}

/// Closed-form lossless coincidence rate from `|1,1⟩`.
fn lossless_p11(g: f64, t: f64) -> f64 {
    (2.0 * g * t).cos().powi(2)
}

fn criterion_1() -> Outcome {
    let c = config(1.0, 0.0, 0.0, 0.0, 4);
    let evolution = Evolution::new(&fock(4, 1, 1), &c).unwrap();
    let dip = coincidence_rate(&evolution.at(FRAC_PI_4).unwrap()).unwrap();
    let closed_form = [0.1, 0.5, 1.0, 2.0]
        .iter()
        .map(|&t| (coincidence_rate(&evolution.at(t).unwrap()).unwrap() - lossless_p11(1.0, t)).abs())
        .fold(0.0, f64::max);
    Outcome {
        passed: dip <= 1e-8 && closed_form <= 1e-10,
        detail: format!("P11(π/4) = {dip:.3e}, closed-form deviation {closed_form:.1e}"),
    }
}

fn column(grid: &CoincidenceGrid, gamma1: f64) -> usize {
    grid.gamma1_over_g.iter().position(|&x| x == gamma1).unwrap()
}

fn criterion_2() -> Outcome {
    let times = default_time_grid(1.0);
    let gammas = default_gamma_grid();
    let cold = hom_sweep(&config(1.0, 0.0, 0.0, 0.0, 4), &times, &gammas, true).unwrap();
    let warm = hom_sweep(&config(1.0, 0.0, 0.0, 0.01, 6), &times, &gammas, true).unwrap();
    let invalid = cold.invalid_cells() + warm.invalid_cells();

    let (k0, k_half) = (column(&warm, 0.0), column(&warm, 0.5));
    let (_, cold_min) = cold.minimum(k0, FRAC_PI_2).unwrap();
    let (t_warm, warm_min) = warm.minimum(k0, FRAC_PI_2).unwrap();

    // The warm minimum itself against the brute-force integrator.
    let reference = integrate_times(&fock(6, 1, 1), &[t_warm], &config(1.0, 0.0, 0.0, 0.01, 6), &IntegratorConfig::default())
        .unwrap();
    let oracle_gap = (coincidence_rate(&reference[0]).unwrap() - warm_min).abs();

    let first_min = [&cold, &warm].map(|g| g.first_local_minimum(k_half));
    let bunching_early = first_min.iter().all(|m| m.is_some_and(|t| t <= FRAC_PI_4));
    Outcome {
        passed: invalid == 0 && warm_min > 0.0 && warm_min > cold_min && oracle_gap <= 1e-6 && bunching_early,
        detail: format!(
            "min P11 n̄=0: {cold_min:.3e}, n̄=0.01: {warm_min:.3e} (oracle gap {oracle_gap:.1e}); \
             first minimum at γ₁/g=0.5: n̄=0 {:?}, n̄=0.01 {:?}; invalid cells {invalid}",
            first_min[0], first_min[1]
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let times = [0.3, 1.0, 3.0];
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let nbar = [0.0, 0.01, 0.2][rng.gen_range(0..3)];
        let c = config(1.0, rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0), nbar, 6);
        let rho0 = random_rank2_mixture(TwoModeSpace::new(6).unwrap(), 2, &mut rng).unwrap();
        let evolution = Evolution::new(&rho0, &c).unwrap();
        let reference = integrate_times(&rho0, &times, &c, &IntegratorConfig::default()).unwrap();
        for (t, r) in times.iter().zip(&reference) {
            worst = worst.max(distance(&evolution.at(*t).unwrap(), r));
        }
    }
    Outcome { passed: worst <= 1e-6, detail: format!("max trace distance {worst:.3e} over 20 configs × 3 times") }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut identities = 0.0_f64;
    let mut dense_gap = 0.0_f64;
    for _ in 0..50 {
        let cutoff = rng.gen_range(2..=5);
        let s = TwoModeSpace::new(cutoff).unwrap();
        // One quantum of headroom so that raising never hits the cutoff.
        let rho = restrict_to_total(s, &random_hermitian(s.dim(), &mut rng), cutoff - 1);
        for mode in Mode::BOTH {
            let jm = |m: &CMatrix| apply_j(s, Sign::Minus, mode, m).unwrap();
            let jp = |m: &CMatrix| apply_j(s, Sign::Plus, mode, m).unwrap();
            let l = |m: &CMatrix| apply_l(s, mode, m).unwrap();

            let (a, ad) = ladder(s, mode);
            let n = &ad * &a;
            dense_gap = dense_gap
                .max(max_abs(&(jm(&rho) - (&a * &rho * &ad).scale(2.0))))
                .max(max_abs(&(jp(&rho) - (&ad * &rho * &a).scale(2.0))))
                .max(max_abs(&(l(&rho) - &n * &rho - &rho * &n)));

            let residuals = [
                jm(&jp(&rho)) - jp(&jm(&rho)) - (l(&rho) + &rho).scale(4.0),
                l(&jp(&rho)) - jp(&l(&rho)) - jp(&rho).scale(2.0),
                l(&jm(&rho)) - jm(&l(&rho)) + jm(&rho).scale(2.0),
            ];
            // su(1,1): A₀ = (L + 1)/2, A± = J±/2.
            let a0 = |m: &CMatrix| (l(m) + m).scale(0.5);
            let ap = |m: &CMatrix| jp(m).scale(0.5);
            let am = |m: &CMatrix| jm(m).scale(0.5);
            let closure = [
                a0(&ap(&rho)) - ap(&a0(&rho)) - ap(&rho),
                a0(&am(&rho)) - am(&a0(&rho)) + am(&rho),
                am(&ap(&rho)) - ap(&am(&rho)) - a0(&rho).scale(2.0),
            ];
            for r in residuals.iter().chain(&closure) {
                identities = identities.max(max_abs(r));
            }
        }
        for sign in [Sign::Plus, Sign::Minus] {
            let j = |m: &CMatrix| apply_j_sum(s, sign, m).unwrap();
            let sc = |m: &CMatrix| apply_s(s, m).unwrap();
            identities = identities.max(max_abs(&(j(&sc(&rho)) - sc(&j(&rho)))));
        }
    }
    Outcome {
        passed: identities <= 1e-10 && dense_gap <= 1e-12,
        detail: format!("max identity residual {identities:.3e}, max gap to dense ladder products {dense_gap:.1e}"),
    }
}

fn criterion_5() -> Outcome {
    let (g1, g2) = (0.3, 0.7);
    let sum = g1 + g2;
    let mut worst = 0.0_f64;
    for nbar in [0.0, 1e-3, 0.01, 0.5, 2.0] {
        let p = thermal_params(nbar, g1, g2).unwrap();
        let quadratic = |eta: f64| 4.0 * eta * eta * (1.0 + nbar) + 2.0 * eta * (1.0 + 2.0 * nbar) + nbar;
        let f = |eta: f64| (4.0 * eta + 1.0) * (1.0 + nbar) + nbar;
        let g = |eta: f64| 2.0 * sum * (nbar + 2.0 * eta * (1.0 + nbar));
        for r in [
            quadratic(p.eta_plus),
            quadratic(p.eta_minus),
            f(p.eta_plus) - 1.0,
            f(p.eta_minus) + 1.0,
            g(p.eta_plus),
            g(p.eta_minus) + 2.0 * sum,
            p.eta_plus + nbar / (2.0 * (1.0 + nbar)),
            p.chi - (1.0 + nbar) / 2.0,
            p.quadratic(p.eta_plus),
            p.f(p.eta_minus) + 1.0,
            g_offset(nbar, sum, p.eta_plus),
        ] {
            worst = worst.max(r.abs());
        }
    }
    Outcome { passed: worst <= 1e-12, detail: format!("max residual {worst:.3e}") }
}

fn criterion_6() -> Outcome {
    let s = TwoModeSpace::new(5).unwrap();
    let (mut cx, mut spectra, mut paths) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut regimes = Vec::new();
    for (g, delta) in [(1.0, 3.0), (1.0, 1.0), (1.0, 0.5), (1.0, 0.0)] {
        let c = config(g, 0.2, 0.2 + delta, 0.0, 5);
        let d = diagonalize(&c, s).unwrap();
        regimes.push(d.regime);
        cx = cx.max(d.c_x.norm());
        let h = dense_effective_hamiltonian(&c, s);
        for idx in s.sectors().iter().take(s.cutoff() + 1) {
            let block = CMatrix::from_fn(idx.len(), idx.len(), |r, q| h[(idx[r], idx[q])]);
            let reference = schur_eigenvalues(&block).unwrap();
            let mut ours: Vec<C64> = idx.iter().map(|&i| d.diagonal[i]).collect();
            // Greedy matching of the two multisets.
            for z in &reference {
                let (k, gap) = ours
                    .iter()
                    .enumerate()
                    .map(|(k, w)| (k, (w - z).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                spectra = spectra.max(gap);
                ours.swap_remove(k);
            }
        }
        for t in [0.3, 1.0, 3.0] {
            let a = propagator(&c, s, t, Method::Diagonalized).unwrap().matrix();
            let b = propagator(&c, s, t, Method::Direct).unwrap().matrix();
            paths = paths.max(max_abs(&(a - b)));
        }
    }
    // H_eff assembled from ladder matrices agrees with the library's.
    let c = config(1.0, 0.2, 1.2, 0.0, 5);
    let assembled = max_abs(&(dense_effective_hamiltonian(&c, s) - effective_hamiltonian(&c, s).into_matrix()));

    let eps = 1e-3;
    let at = |delta: f64| propagator(&config(1.0, 0.0, delta, 0.0, 4), TwoModeSpace::new(4).unwrap(), 1.5, Method::Direct)
        .unwrap()
        .matrix();
    let (below, centre, above) = (at(2.0 - eps), at(2.0), at(2.0 + eps));
    let jump = max_abs(&(&above - &below));
    let curvature = max_abs(&(&below + &above - centre.scale(2.0)));
    let continuous = jump <= 10.0 * eps && curvature <= 1e-4;

    use coupled_modes::solver::Regime;
    let both_regimes = regimes.contains(&Regime::Overdamped) && regimes.contains(&Regime::Underdamped);
    Outcome {
        passed: cx <= 1e-10 && spectra <= 1e-9 && paths <= 1e-9 && assembled <= 1e-14 && continuous && both_regimes,
        detail: format!(
            "c_x {cx:.1e}, spectra {spectra:.3e}, paths {paths:.3e}, EP jump {jump:.2e} curvature {curvature:.2e}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let s = TwoModeSpace::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for nbar in [0.0, 0.01, 0.5] {
        for _ in 0..4 {
            let c = config(1.0, rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), nbar, 8);
            let rho = restrict_to_total(s, &random_hermitian(s.dim(), &mut rng), 2);
            let h = dense_effective_hamiltonian(&c, s);
            let expected = (&h * &rho - &rho * h.adjoint()) * C64::new(0.0, -1.0);
            let out = conjugated_generator(s, &rho, &c, CONJUGATION_ORDER).unwrap();
            worst = worst.max(max_abs(&(out.value - expected)));
        }
    }
    Outcome { passed: worst <= 1e-8, detail: format!("max deviation {worst:.3e}") }
}

fn criterion_8() -> Outcome {
    let nbar = 0.2;
    let c = config(1.0, 0.5, 0.5, nbar, 8);
    let rho = Evolution::new(&fock(8, 1, 1), &c).unwrap().at(40.0).unwrap();
    // Untruncated geometric weights n̄ⁿ/(1+n̄)ⁿ⁺¹ per mode.
    let s = rho.space();
    let p = |n: usize| nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1);
    let thermal = CMatrix::from_fn(s.dim(), s.dim(), |i, j| {
        let (n1, n2) = s.occupations(i);
        C64::new(if i == j { p(n1) * p(n2) } else { 0.0 }, 0.0)
    });
    let occ = Mode::BOTH.map(|m| mode_occupation(&rho, m));
    let dist = trace_distance(rho.matrix(), &thermal);
    let occ_gap = occ.iter().map(|o| (o - nbar).abs()).fold(0.0, f64::max);
    Outcome {
        passed: occ_gap <= 1e-3 && dist <= 1e-3,
        detail: format!("occupations {:.6} {:.6}, trace distance {dist:.3e}", occ[0], occ[1]),
    }
}

#[test]
fn acceptance_criteria() {
    let results = [
        report(1, "HOM dip", Duration::from_secs(1), criterion_1),
        report(2, "finite-temperature degradation", Duration::from_secs(30), criterion_2),
        report(3, "closed form vs master-equation oracle", Duration::from_secs(60), criterion_3),
        report(4, "superoperator algebra", Duration::from_secs(5), criterion_4),
        report(5, "transformation parameters", Duration::from_secs(1), criterion_5),
        report(6, "diagonalization", Duration::from_secs(5), criterion_6),
        report(7, "conjugated generator", Duration::from_secs(5), criterion_7),
        report(8, "thermalization", Duration::from_secs(10), criterion_8),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(k, _)| k + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
