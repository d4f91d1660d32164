use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::symplectic;
use crate::error::{Result, SteeringError};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Gaussian state of `n_modes` bosonic modes.
///
/// Quadratures are ordered `(x1, p1, .., xN, pN)`; the vacuum covariance is
/// the identity, so `Var(x) Var(p) >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty principle.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || dim % 2 == 1 || cov.ncols() != dim {
            return Err(SteeringError::invalid(format!(
                "covariance must be 2N x 2N, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != dim {
            return Err(SteeringError::DimensionMismatch {
                expected: dim,
                actual: mean.len(),
            });
        }
        if cov.iter().chain(mean.iter()).any(|v| !v.is_finite()) {
            return Err(SteeringError::invalid("non-finite moment"));
        }
        let state = Self {
            n_modes: dim / 2,
            mean,
            cov,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(SteeringError::invalid("need at least one mode"));
        }
        Ok(Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn validate(&self) -> Result<()> {
        let asym = (&self.cov - self.cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(SteeringError::Unphysical(format!(
                "covariance not symmetric (deviation {asym:e})"
            )));
        }
        let nu = self.min_symplectic_eigenvalue();
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(SteeringError::Unphysical(format!(
                "symplectic eigenvalue {nu} < 1"
            )));
        }
        Ok(())
    }

    /// Symplectic eigenvalues in ascending order.
    ///
    /// With `V = L L^T`, they are the singular values of `L^T Omega L`, which
    /// come in equal pairs. A covariance that is not positive definite yields
    /// zeros.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let Some(chol) = sym.cholesky() else {
            return vec![0.0; self.n_modes];
        };
        let l = chol.l();
        let m = l.transpose() * symplectic::omega(self.n_modes) * &l;
        let mut nu: Vec<f64> = m.singular_values().iter().copied().collect();
        nu.sort_by(|a, b| a.total_cmp(b));
        nu.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.n_modes {
            return Err(SteeringError::invalid(format!(
                "mode {mode} outside 1..={}",
                self.n_modes
            )));
        }
        Ok(())
    }

    /// `mean -> S mean`, `V -> S V S^T`.
    pub fn apply_symplectic(&self, s: &DMatrix<f64>) -> Result<Self> {
        let dim = 2 * self.n_modes;
        if s.nrows() != dim || s.ncols() != dim {
            return Err(SteeringError::DimensionMismatch {
                expected: dim,
                actual: s.nrows(),
            });
        }
        let defect = symplectic::symplectic_defect(s);
        if defect > 1e-10 {
            return Err(SteeringError::invalid(format!(
                "transform is not symplectic (defect {defect:e})"
            )));
        }
        Ok(self.transformed(s))
    }

    fn transformed(&self, s: &DMatrix<f64>) -> Self {
        let cov = s * &self.cov * s.transpose();
        Self {
            n_modes: self.n_modes,
            mean: s * &self.mean,
            cov: (&cov + cov.transpose()) * 0.5,
        }
    }

    pub fn squeeze(&self, mode: usize, r: f64, angle: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if r.is_nan() || r < 0.0 || !r.is_finite() || !angle.is_finite() {
            return Err(SteeringError::invalid(format!(
                "squeezing r={r}, angle={angle} invalid"
            )));
        }
        Ok(self.transformed(&symplectic::squeezer(self.n_modes, mode, r, angle)))
    }

    pub fn rotate(&self, mode: usize, angle: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !angle.is_finite() {
            return Err(SteeringError::invalid("rotation angle must be finite"));
        }
        Ok(self.transformed(&symplectic::rotation(self.n_modes, mode, angle)))
    }

    pub fn beamsplitter(&self, i: usize, j: usize, transmissivity: f64) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(SteeringError::invalid("beamsplitter needs two distinct modes"));
        }
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(SteeringError::invalid(format!(
                "transmissivity {transmissivity} outside [0, 1]"
            )));
        }
        Ok(self.transformed(&symplectic::beamsplitter(
            self.n_modes,
            i,
            j,
            transmissivity,
        )))
    }

    /// Pure loss: mixes `mode` with vacuum at transmissivity `eta` and discards
    /// the ancilla.
    pub fn loss_channel(&self, mode: usize, eta: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(SteeringError::invalid(format!(
                "efficiency {eta} outside [0, 1]"
            )));
        }
        let a = 2 * (mode - 1);
        let scale = eta.sqrt();
        let mut cov = self.cov.clone();
        let mut mean = self.mean.clone();
        for q in a..a + 2 {
            mean[q] *= scale;
            for k in 0..2 * self.n_modes {
                if !(a..a + 2).contains(&k) {
                    cov[(q, k)] *= scale;
                    cov[(k, q)] *= scale;
                }
            }
        }
        for r in a..a + 2 {
            for c in a..a + 2 {
                cov[(r, c)] = eta * self.cov[(r, c)] + if r == c { 1.0 - eta } else { 0.0 };
            }
        }
        Ok(Self {
            n_modes: self.n_modes,
            mean,
            cov,
        })
    }

    /// Appends `count` vacuum modes after the existing ones.
    pub fn with_vacuum_modes(&self, count: usize) -> Self {
        let n = self.n_modes + count;
        let mut cov = DMatrix::identity(2 * n, 2 * n);
        cov.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.cov);
        let mut mean = DVector::zeros(2 * n);
        mean.rows_mut(0, 2 * self.n_modes).copy_from(&self.mean);
        Self {
            n_modes: n,
            mean,
            cov,
        }
    }

    /// Reorders modes so that new mode `k` is old mode `order[k-1]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_modes];
        if order.len() != self.n_modes {
            return Err(SteeringError::DimensionMismatch {
                expected: self.n_modes,
                actual: order.len(),
            });
        }
        for &m in order {
            self.check_mode(m)?;
            if std::mem::replace(&mut seen[m - 1], true) {
                return Err(SteeringError::invalid(format!("mode {m} repeated")));
            }
        }
        let index = |q: usize| 2 * (order[q / 2] - 1) + q % 2;
        let dim = 2 * self.n_modes;
        Ok(Self {
            n_modes: self.n_modes,
            mean: DVector::from_fn(dim, |q, _| self.mean[index(q)]),
            cov: DMatrix::from_fn(dim, dim, |r, c| self.cov[(index(r), index(c))]),
        })
    }

    /// Random zero-mean pure state: passive network, single-mode squeezers,
    /// passive network.
    pub fn random_pure<R: Rng + ?Sized>(n_modes: usize, max_r: f64, rng: &mut R) -> Result<Self> {
        let mut state = Self::vacuum(n_modes)?;
        state = state.random_passive(rng);
        let squeeze = Uniform::new_inclusive(0.0, max_r);
        for mode in 1..=n_modes {
            state = state.squeeze(mode, squeeze.sample(rng), 0.0)?;
        }
        Ok(state.random_passive(rng))
    }

    fn random_passive<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let phase = Uniform::new(0.0, std::f64::consts::TAU);
        let mut state = self.clone();
        for mode in 1..=self.n_modes {
            state = state.transformed(&symplectic::rotation(self.n_modes, mode, phase.sample(rng)));
        }
        for i in 1..=self.n_modes {
            for j in (i + 1)..=self.n_modes {
                let t = rng.gen::<f64>();
                state = state.transformed(&symplectic::beamsplitter(self.n_modes, i, j, t));
                let m = if rng.gen::<bool>() { i } else { j };
                state = state.transformed(&symplectic::rotation(self.n_modes, m, phase.sample(rng)));
            }
        }
        state
    }
}

/// Three-mode CV GHZ state: mode 1 squeezed in p, modes 2 and 3 squeezed in
/// x, then beamsplitters (1,2) at T = 1/3 and (2,3) at T = 1/2.
///
/// `Var(x_j - x_k) = 2 e^{-2r}` and `Var(p1 + p2 + p3) = 3 e^{-2r}`.
pub fn cv_ghz(r: f64) -> Result<GaussianState> {
    if r.is_nan() || r < 0.0 || !r.is_finite() {
        return Err(SteeringError::invalid(format!("squeezing {r} must be finite and >= 0")));
    }
    GaussianState::vacuum(3)?
        .squeeze(1, r, std::f64::consts::FRAC_PI_2)?
        .squeeze(2, r, 0.0)?
        .squeeze(3, r, 0.0)?
        .beamsplitter(1, 2, 1.0 / 3.0)?
        .beamsplitter(2, 3, 0.5)
}

/// `cv_ghz(r)` with modes 2 and 3 tapped by beamsplitters of transmissivity
/// `eta` against vacuum ancillas 4 and 5.
///
/// Modes 2 and 3 of the result are the transmitted beams; modes 4 and 5 are
/// the eavesdropper's reflected beams.
pub fn eavesdrop_scenario(r: f64, eta: f64) -> Result<GaussianState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(SteeringError::invalid(format!("efficiency {eta} outside [0, 1]")));
    }
    cv_ghz(r)?
        .with_vacuum_modes(2)
        .beamsplitter(2, 4, eta)?
        .beamsplitter(3, 5, eta)
}
