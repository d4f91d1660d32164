//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls the library's own evaluation paths: qubit quantities are
//! built from explicit Kronecker products and projectors, Gaussian ones from
//! hand-written symplectic matrices and numerical gain optimization.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steering::qubit::{DensityMatrix, Pauli, PauliString};

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Site 1 is the leftmost Kronecker factor.
pub fn kron_all(factors: &[CMat]) -> CMat {
    factors
        .iter()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, f| acc.kronecker(f))
}

pub fn dense(p: &PauliString) -> CMat {
    let m = kron_all(&p.factors().iter().map(|&f| pauli_matrix(f)).collect::<Vec<_>>());
    m * c(p.sign() as f64, 0.0)
}

pub fn expect(rho: &DensityMatrix, op: &CMat) -> f64 {
    (rho.entries() * op).trace().re
}

/// `<D^2> - <D>^2` with `D = T - P` as a dense matrix.
pub fn diff_variance(rho: &DensityMatrix, t: &PauliString, p: &PauliString) -> f64 {
    let d = dense(t) - dense(p);
    let mean = expect(rho, &d);
    expect(rho, &(&d * &d)) - mean * mean
}

/// Projector onto outcome `s` (+1 or -1) of Pauli `p` on one qubit.
pub fn projector(p: Pauli, s: f64) -> CMat {
    let id = pauli_matrix(Pauli::I);
    (id + pauli_matrix(p) * c(s, 0.0)) * c(0.5, 0.0)
}

/// `sum_a P(a) Var(T | a)` by enumerating every joint outcome `a` of the
/// group measurements and conditioning explicitly.
pub fn conditional_variance_bruteforce(
    rho: &DensityMatrix,
    n: usize,
    group: &[usize],
    settings: &[Pauli],
    target: &PauliString,
) -> f64 {
    let t = dense(target);
    let t2 = &t * &t;
    let mut total = 0.0;
    for code in 0..(1usize << group.len()) {
        let mut factors = vec![pauli_matrix(Pauli::I); n];
        for (slot, (&site, &setting)) in group.iter().zip(settings).enumerate() {
            let s = if code >> slot & 1 == 1 { -1.0 } else { 1.0 };
            factors[site - 1] = projector(setting, s);
        }
        let proj = kron_all(&factors);
        let prob = expect(rho, &proj);
        if prob <= 1e-15 {
            continue;
        }
        let m1 = expect(rho, &(&proj * &t)) / prob;
        let m2 = expect(rho, &(&proj * &t2)) / prob;
        total += prob * (m2 - m1 * m1);
    }
    total
}

/// `rho` with qubits relabelled: new site `k` carries old site `perm[k-1]`.
pub fn permute_qubits(rho: &DensityMatrix, perm: &[usize]) -> DensityMatrix {
    let n = rho.n_qubits();
    let dim = 1usize << n;
    let map = |new_idx: usize| {
        let mut old = 0usize;
        for (k, &src) in perm.iter().enumerate() {
            let bit = new_idx >> (n - 1 - k) & 1;
            old |= bit << (n - src);
        }
        old
    };
    let e = rho.entries();
    let entries = DMatrix::from_fn(dim, dim, |r, col| e[(map(r), map(col))]);
    DensityMatrix::new(n, entries).unwrap()
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    // Real 2d x 2d embedding of a Hermitian matrix has the same spectrum, doubled.
    let d = m.nrows();
    let real = DMatrix::from_fn(2 * d, 2 * d, |r, col| {
        let z = m[(r % d, col % d)];
        match (r < d, col < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    real.symmetric_eigenvalues().min()
}

// ---- Gaussian ----

pub fn gaussian_beamsplitter(n: usize, i: usize, j: usize, t: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
    for q in 0..2 {
        let (xi, xj) = (2 * (i - 1) + q, 2 * (j - 1) + q);
        s[(xi, xi)] = a;
        s[(xi, xj)] = b;
        s[(xj, xi)] = b;
        s[(xj, xj)] = -a;
    }
    s
}

/// Squeezes x by `e^{-r}` (or p when `p_squeezed`).
pub fn gaussian_squeezer(n: usize, mode: usize, r: f64, p_squeezed: bool) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (fx, fp) = if p_squeezed { (r.exp(), (-r).exp()) } else { ((-r).exp(), r.exp()) };
    s[(2 * (mode - 1), 2 * (mode - 1))] = fx;
    s[(2 * (mode - 1) + 1, 2 * (mode - 1) + 1)] = fp;
    s
}

/// CV-GHZ covariance assembled directly from the defining circuit.
pub fn cv_ghz_covariance(r: f64) -> DMatrix<f64> {
    let s = gaussian_beamsplitter(3, 2, 3, 0.5)
        * gaussian_beamsplitter(3, 1, 2, 1.0 / 3.0)
        * gaussian_squeezer(3, 3, r, false)
        * gaussian_squeezer(3, 2, r, false)
        * gaussian_squeezer(3, 1, r, true);
    &s * s.transpose()
}

pub fn quadratic(cov: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (v.transpose() * cov * v)[(0, 0)]
}

/// Minimizes `Var(t - sum_i g_i m_i)` over gains using central-difference
/// gradients and Hessians with damped Newton steps.
pub fn fd_min_conditional_variance(
    cov: &DMatrix<f64>,
    target: &DVector<f64>,
    measured: &[DVector<f64>],
) -> f64 {
    let k = measured.len();
    let f = |g: &DVector<f64>| {
        let mut v = target.clone();
        for (gi, m) in g.iter().zip(measured) {
            v -= m * *gi;
        }
        quadratic(cov, &v)
    };
    let h = 1e-3;
    let mut g = DVector::zeros(k);
    for _ in 0..6 {
        let mut grad = DVector::zeros(k);
        let mut hess = DMatrix::zeros(k, k);
        for a in 0..k {
            let mut gp = g.clone();
            gp[a] += h;
            let mut gm = g.clone();
            gm[a] -= h;
            grad[a] = (f(&gp) - f(&gm)) / (2.0 * h);
            for b in 0..k {
                let shift = |da: f64, db: f64| {
                    let mut x = g.clone();
                    x[a] += da;
                    x[b] += db;
                    f(&x)
                };
                hess[(a, b)] =
                    (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) / (4.0 * h * h);
            }
        }
        let damped = hess + DMatrix::identity(k, k) * 1e-12;
        let step = damped.pseudo_inverse(1e-10).unwrap() * grad;
        g -= step;
    }
    f(&g)
}

pub fn unit(dim: usize, idx: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[idx] = 1.0;
    v
}

/// `cos(a) x_mode + sin(a) p_mode` as a phase-space vector.
pub fn quadrature(n: usize, mode: usize, angle: f64) -> DVector<f64> {
    unit(2 * n, 2 * (mode - 1)) * angle.cos() + unit(2 * n, 2 * (mode - 1) + 1) * angle.sin()
}
