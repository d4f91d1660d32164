use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::pauli::{check_site, PauliString};
use super::MAX_QUBITS;
use crate::error::{Result, SteeringError};

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

fn check_n(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(SteeringError::invalid(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Normalized state vector. Site 1 is the most significant bit and `|0>` is spin up.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(SteeringError::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SteeringError::invalid(format!("squared norm {norm} != 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(SteeringError::invalid(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_n(n_qubits)?;
        let mut amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(SteeringError::DimensionMismatch {
                expected: self.n_qubits,
                actual: obs.n_qubits(),
            });
        }
        let action = obs.masks();
        let value: Complex64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.amplitudes[i ^ action.x_mask].conj() * action.phase(i) * a)
            .sum();
        Ok(value.re)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let psi = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries: &psi * psi.adjoint(),
        }
    }
}

/// `(|0..0> - |1..1>) / sqrt 2`.
pub fn ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(SteeringError::invalid(format!("GHZ needs n >= 2, got {n}")));
    }
    check_n(n)?;
    let dim = 1usize << n;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[dim - 1] = Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(PureState {
        n_qubits: n,
        amplitudes,
    })
}

/// Density operator on `n_qubits` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(SteeringError::DimensionMismatch {
                expected: dim,
                actual: entries.nrows().max(entries.ncols()),
            });
        }
        let rho = Self { n_qubits, entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            entries: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// `G G^dag / Tr(G G^dag)` for a complex Gaussian `G` with `rank` columns.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Result<Self> {
        check_n(n_qubits)?;
        if rank == 0 {
            return Err(SteeringError::invalid("rank must be positive"));
        }
        let dim = 1usize << n_qubits;
        let g = DMatrix::from_fn(dim, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let mut entries = &g * g.adjoint();
        let trace = entries.trace();
        entries /= trace;
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Checks the density-operator invariants at the crate tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm_err = (&self.entries - self.entries.adjoint()).camax();
        if herm_err > HERMITIAN_TOL {
            return Err(SteeringError::Unphysical(format!(
                "not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let trace = self.entries.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(SteeringError::Unphysical(format!("trace {trace} != 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(SteeringError::Unphysical(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_min_eigenvalue(&self.entries)
    }

    /// `Tr(rho P)`.
    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(SteeringError::DimensionMismatch {
                expected: self.n_qubits,
                actual: obs.n_qubits(),
            });
        }
        let action = obs.masks();
        let value: Complex64 = (0..self.dim())
            .map(|i| self.entries[(i, i ^ action.x_mask)] * action.phase(i))
            .sum();
        Ok(value.re)
    }

    /// Probability of basis index `i` (diagonal entry).
    pub fn population(&self, index: usize) -> f64 {
        self.entries[(index, index)].re
    }

    /// `p rho + (1 - p) I / 2^n`.
    pub fn depolarize_global(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SteeringError::invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        let dim = self.dim();
        let mut entries = &self.entries * Complex64::new(p, 0.0);
        let fill = Complex64::new((1.0 - p) / dim as f64, 0.0);
        for i in 0..dim {
            entries[(i, i)] += fill;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            entries,
        })
    }

    /// Applies the single-site channel `rho -> sum_k K rho K^dag` on `site`.
    ///
    /// The Kraus operators must satisfy `sum_k K^dag K = I`.
    pub fn apply_site_kraus(&self, site: usize, kraus: &[Matrix2<Complex64>]) -> Result<Self> {
        check_site(self.n_qubits, site)?;
        let completeness = kraus
            .iter()
            .fold(Matrix2::zeros(), |acc, k| acc + k.adjoint() * k);
        if (completeness - Matrix2::identity()).camax() > 1e-10 {
            return Err(SteeringError::invalid("Kraus operators are not trace preserving"));
        }
        let dim = self.dim();
        let bit = 1usize << (self.n_qubits - site);
        let mut out = DMatrix::zeros(dim, dim);
        for k in kraus {
            // (K rho K^dag)_{ij} = sum_{ab} K_{i_s a} rho_{i[a], j[b]} conj(K_{j_s b})
            for i in 0..dim {
                let is = usize::from(i & bit != 0);
                for j in 0..dim {
                    let js = usize::from(j & bit != 0);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..2 {
                        let ia = if a == 1 { i | bit } else { i & !bit };
                        for b in 0..2 {
                            let jb = if b == 1 { j | bit } else { j & !bit };
                            acc += k[(is, a)] * self.entries[(ia, jb)] * k[(js, b)].conj();
                        }
                    }
                    out[(i, j)] += acc;
                }
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            entries: out,
        })
    }

    pub fn apply_site_unitary(&self, site: usize, u: &Matrix2<Complex64>) -> Result<Self> {
        self.apply_site_kraus(site, std::slice::from_ref(u))
    }

    /// Phase damping with flip probability `p` on `site`.
    pub fn dephase(&self, site: usize, p: f64) -> Result<Self> {
        check_probability(p)?;
        let z = Matrix2::new(one(), zero(), zero(), -one());
        let id = Matrix2::identity();
        self.apply_site_kraus(
            site,
            &[id * Complex64::new((1.0 - p).sqrt(), 0.0), z * Complex64::new(p.sqrt(), 0.0)],
        )
    }

    /// Amplitude damping towards `|0>` with decay probability `gamma` on `site`.
    pub fn amplitude_damp(&self, site: usize, gamma: f64) -> Result<Self> {
        check_probability(gamma)?;
        let k0 = Matrix2::new(one(), zero(), zero(), Complex64::new((1.0 - gamma).sqrt(), 0.0));
        let k1 = Matrix2::new(zero(), Complex64::new(gamma.sqrt(), 0.0), zero(), zero());
        self.apply_site_kraus(site, &[k0, k1])
    }

    /// Partial transpose over the listed sites.
    pub fn partial_transpose(&self, sites: &[usize]) -> Result<DMatrix<Complex64>> {
        let mut mask = 0usize;
        for &s in sites {
            check_site(self.n_qubits, s)?;
            mask |= 1usize << (self.n_qubits - s);
        }
        let dim = self.dim();
        Ok(DMatrix::from_fn(dim, dim, |i, j| {
            let swap = (i ^ j) & mask;
            self.entries[(i ^ swap, j ^ swap)]
        }))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SteeringError::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub(crate) fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

impl From<PureState> for DensityMatrix {
    fn from(psi: PureState) -> Self {
        psi.to_density()
    }
}

/// Random single-qubit unitary from a Haar-distributed quaternion.
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (a, b, c, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    Matrix2::new(
        Complex64::new(a, b),
        Complex64::new(c, d),
        Complex64::new(-c, d),
        Complex64::new(a, -b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ghz_amplitudes() {
        let psi = ghz(3).unwrap();
        let a = psi.amplitudes();
        assert!((a[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[7].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(a[1..7].iter().all(|z| z.norm() == 0.0));
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);

        let psi2 = ghz(2).unwrap();
        let nonzero: Vec<usize> = psi2
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero, vec![0, 3]);
        assert!(ghz(1).is_err());
    }

    #[test]
    fn pure_and_mixed_expectations_agree() {
        let psi = ghz(3).unwrap();
        let rho = psi.to_density();
        for s in ["+XYY", "+ZII", "-YXY", "+ZZI", "+III"] {
            let obs: PauliString = s.parse().unwrap();
            let e1 = psi.expectation(&obs).unwrap();
            let e2 = rho.expectation(&obs).unwrap();
            assert!((e1 - e2).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn depolarize_bounds() {
        let rho = ghz(3).unwrap().to_density();
        assert_eq!(rho.depolarize_global(1.0).unwrap(), rho);
        let mixed = rho.depolarize_global(0.0).unwrap();
        let mm = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((mixed.entries() - mm.entries()).camax() < 1e-15);
        assert!(rho.depolarize_global(1.5).is_err());
        assert!(rho.depolarize_global(-0.1).is_err());
    }

    #[test]
    fn rejects_unphysical() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(1, m),
            Err(SteeringError::Unphysical(_))
        ));
        assert!(PureState::new(1, vec![one(), one()]).is_err());
        assert!(PureState::new(2, vec![one()]).is_err());
    }

    #[test]
    fn channels_stay_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rho = DensityMatrix::random(3, 2, &mut rng).unwrap();
        for site in 1..=3 {
            rho = rho.dephase(site, 0.3).unwrap();
            rho = rho.amplitude_damp(site, 0.2).unwrap();
            rho = rho.apply_site_unitary(site, &random_unitary2(&mut rng)).unwrap();
            rho.validate().unwrap();
        }
    }

    #[test]
    fn partial_transpose_detects_bell_entanglement() {
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = PureState::new(2, vec![amp, zero(), zero(), amp]).unwrap();
        let pt = bell.to_density().partial_transpose(&[2]).unwrap();
        assert!((hermitian_min_eigenvalue(&pt) + 0.5).abs() < 1e-12);
        let prod = PureState::basis(2, 1).unwrap().to_density();
        assert!(hermitian_min_eigenvalue(&prod.partial_transpose(&[2]).unwrap()) > -1e-12);
    }
}
