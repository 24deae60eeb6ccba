//! Dense complex linear-algebra helpers shared by the solver, the oracle and
//! the diagnostics.
//!
//! The matrix exponential is the scaling-and-squaring algorithm with
//! diagonal Padé approximants of degree 3, 5, 7, 9 and 13 (Higham, 2005).
//! Degree selection uses the published 1-norm thresholds θ_m.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Maximum-modulus entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm_sqr())).sqrt()
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `‖m − m†‖_max`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Trace distance `½‖a − b‖₁` between two Hermitian matrices of equal size.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

const SCHUR_MAX_ITERATIONS: usize = 10_000;

/// Eigenvalues of a general complex matrix from its Schur form.
///
/// The unshifted decomposition can stall on structured Hermitian input (zero
/// diagonal, equal off-diagonals), so a failed attempt is retried on a fixed
/// unitary similarity of `m`. Returns `None` if both attempts fail.
pub fn schur_eigenvalues(m: &CMatrix) -> Option<Vec<C64>> {
    let n = m.nrows();
    if let Some(s) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITERATIONS) {
        return Some(s.eigenvalues()?.iter().copied().collect());
    }
    let k = CMatrix::from_fn(n, n, |i, j| {
        C64::new(((i + 1) * (j + 2)) as f64 / (n * n) as f64, (i as f64 - j as f64) / n as f64)
    });
    let q = expm(&((&k + k.adjoint()) * C64::new(0.0, 0.5)));
    let s = nalgebra::Schur::try_new(&q * m * q.adjoint(), f64::EPSILON, SCHUR_MAX_ITERATIONS)?;
    Some(s.eigenvalues()?.iter().copied().collect())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// # Panics
/// Panics if `a` is not square.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = norm_one(a);
    if norm == 0.0 {
        return CMatrix::identity(n, n);
    }

    let ident = CMatrix::identity(n, n);
    let a2 = a * a;
    if norm <= THETA_9 {
        let (u, v) = if norm <= THETA_3 {
            pade_low(a, &a2, &ident, &PADE_3)
        } else if norm <= THETA_5 {
            pade_low(a, &a2, &ident, &PADE_5)
        } else if norm <= THETA_7 {
            pade_low(a, &a2, &ident, &PADE_7)
        } else {
            pade_low(a, &a2, &ident, &PADE_9)
        };
        return pade_solve(&u, &v);
    }

    let s = ((norm / THETA_13).log2().ceil()).max(0.0) as i32;
    let scale = 2f64.powi(-s);
    let a = a.scale(scale);
    let a2 = a2.scale(scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE_13;

    let inner_u = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]));
    let u = &a
        * (inner_u + a6.scale(b[7]) + a4.scale(b[5]) + a2.scale(b[3]) + ident.scale(b[1]));
    let inner_v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]));
    let v = inner_v + a6.scale(b[6]) + a4.scale(b[4]) + a2.scale(b[2]) + ident.scale(b[0]);

    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_low(a: &CMatrix, a2: &CMatrix, ident: &CMatrix, b: &[f64]) -> (CMatrix, CMatrix) {
    let mut odd = ident.scale(b[1]);
    let mut even = ident.scale(b[0]);
    let mut power = ident.clone();
    let mut k = 2;
    while k < b.len() {
        power = &power * a2;
        even += power.scale(b[k]);
        if k + 1 < b.len() {
            odd += power.scale(b[k + 1]);
        }
        k += 2;
    }
    (a * odd, even)
}

fn pade_solve(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for norms below θ")
}
