use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SteeringError};

/// Single-site Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Spin component of a steered qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub fn pauli(self) -> Pauli {
        match self {
            SpinAxis::X => Pauli::X,
            SpinAxis::Y => Pauli::Y,
            SpinAxis::Z => Pauli::Z,
        }
    }
}

/// Signed tensor product of single-site Paulis.
///
/// `factors[0]` acts on site 1, which is the most significant bit of a basis
/// index. The operator squares to the identity, so its spectrum is `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>, negative: bool) -> Result<Self> {
        if factors.is_empty() {
            return Err(SteeringError::invalid("Pauli string needs at least one site"));
        }
        Ok(Self { factors, negative })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits], false)
    }

    /// `pauli` on `site` (1-based), identity elsewhere.
    pub fn single(n_qubits: usize, site: usize, pauli: Pauli) -> Result<Self> {
        check_site(n_qubits, site)?;
        let mut factors = vec![Pauli::I; n_qubits];
        factors[site - 1] = pauli;
        Self::new(factors, false)
    }

    /// Product of `settings[i]` on `sites[i]`, identity elsewhere.
    pub fn on_sites(n_qubits: usize, sites: &[usize], settings: &[Pauli]) -> Result<Self> {
        if sites.len() != settings.len() {
            return Err(SteeringError::DimensionMismatch {
                expected: sites.len(),
                actual: settings.len(),
            });
        }
        let mut factors = vec![Pauli::I; n_qubits];
        for (&site, &p) in sites.iter().zip(settings) {
            check_site(n_qubits, site)?;
            if factors[site - 1] != Pauli::I {
                return Err(SteeringError::OverlappingSupport(site));
            }
            factors[site - 1] = p;
        }
        Self::new(factors, false)
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.negative = sign < 0;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn factor(&self, site: usize) -> Pauli {
        self.factors[site - 1]
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// Sites (1-based) carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|p| *p == Pauli::I)
    }

    /// Product of two strings acting on disjoint sites.
    pub fn times_disjoint(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != other.n_qubits() {
            return Err(SteeringError::DimensionMismatch {
                expected: self.n_qubits(),
                actual: other.n_qubits(),
            });
        }
        let mut factors = self.factors.clone();
        for (i, (&a, &b)) in self.factors.iter().zip(&other.factors).enumerate() {
            match (a, b) {
                (_, Pauli::I) => {}
                (Pauli::I, b) => factors[i] = b,
                _ => return Err(SteeringError::OverlappingSupport(i + 1)),
            }
        }
        PauliString::new(factors, self.negative != other.negative)
    }

    pub(crate) fn masks(&self) -> BasisAction {
        let n = self.n_qubits();
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        let mut n_y = 0u32;
        for (i, p) in self.factors.iter().enumerate() {
            let bit = 1usize << (n - 1 - i);
            match p {
                Pauli::I => {}
                Pauli::X => x_mask |= bit,
                Pauli::Y => {
                    x_mask |= bit;
                    z_mask |= bit;
                    n_y += 1;
                }
                Pauli::Z => z_mask |= bit,
            }
        }
        // Y = i X Z, so the string is sign * i^{n_y} * X^x Z^z.
        let mut base = match n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if self.negative {
            base = -base;
        }
        BasisAction { x_mask, z_mask, base }
    }
}

/// `P|i> = phase(i) |i ^ x_mask>`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BasisAction {
    pub x_mask: usize,
    pub z_mask: usize,
    pub base: Complex64,
}

impl BasisAction {
    #[inline]
    pub fn phase(&self, index: usize) -> Complex64 {
        if (index & self.z_mask).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }
}

pub(crate) fn check_site(n_qubits: usize, site: usize) -> Result<()> {
    if site == 0 || site > n_qubits {
        return Err(SteeringError::invalid(format!(
            "site {site} outside 1..={n_qubits}"
        )));
    }
    Ok(())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for p in &self.factors {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = SteeringError;

    /// Accepts an optional `+`/`-` followed by one label per site, e.g. `-YYI`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let factors = body
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| SteeringError::Parse(format!("bad Pauli label {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.len() > super::MAX_QUBITS {
            return Err(SteeringError::Parse(format!(
                "{} sites exceeds the {}-qubit cap",
                factors.len(),
                super::MAX_QUBITS
            )));
        }
        PauliString::new(factors, negative).map_err(|e| SteeringError::Parse(e.to_string()))
    }
}

/// Predictor measured by all sites other than `n` for spin component `axis`
/// of site `n` on `ghz(n)`.
pub fn ghz_predictor(n: usize, axis: SpinAxis) -> Result<PauliString> {
    ghz_predictor_for(n, n, axis)
}

/// Predictor for `axis` of `target` built from the GHZ stabilizer group.
///
/// For x and y targets the other sites carry Y, except that the last of them
/// switches to X when needed to make the total Y count even. Such strings are
/// stabilizers of `(|0..0> - |1..1>)/sqrt 2` with eigenvalue `-(-1)^{k/2}`
/// for `k` Y factors; for odd `n` and target `n` this reproduces
/// `(-1)^{(n+1)/2} Y..Y` and `(-1)^{(n+1)/2} Y..Y X`. The z component is
/// predicted by Z on the last other site.
pub fn ghz_predictor_for(n: usize, target: usize, axis: SpinAxis) -> Result<PauliString> {
    if n < 2 {
        return Err(SteeringError::invalid("GHZ predictors need n >= 2"));
    }
    check_site(n, target)?;
    let others: Vec<usize> = (1..=n).filter(|&s| s != target).collect();
    let last = *others.last().expect("n >= 2");
    let mut factors = vec![Pauli::I; n];
    if axis == SpinAxis::Z {
        factors[last - 1] = Pauli::Z;
        return PauliString::new(factors, false);
    }
    for &s in &others {
        factors[s - 1] = Pauli::Y;
    }
    let mut n_y = others.len() + usize::from(axis == SpinAxis::Y);
    if n_y % 2 == 1 {
        factors[last - 1] = Pauli::X;
        n_y -= 1;
    }
    let eigenvalue_negative = (n_y / 2) & 1 == 0;
    PauliString::new(factors, eigenvalue_negative)
}
