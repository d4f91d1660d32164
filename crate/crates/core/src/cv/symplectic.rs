//! Symplectic matrices in the `(x1, p1, .., xN, pN)` ordering.

use nalgebra::DMatrix;

/// Block-diagonal form `Omega` with `[[0, 1], [-1, 0]]` per mode.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// Max-entry deviation of `S Omega S^T` from `Omega`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let w = omega(n);
    (s * &w * s.transpose() - w).amax()
}

/// Squeezing by `r` along the axis rotated by `angle` from x.
///
/// At angle 0 the x quadrature shrinks by `e^{-r}`.
pub fn squeezer(n_modes: usize, mode: usize, r: f64, angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    let (shrink, grow) = ((-r).exp(), r.exp());
    // R(angle) diag(shrink, grow) R(angle)^T
    let block = [
        [c * c * shrink + s * s * grow, c * s * (shrink - grow)],
        [c * s * (shrink - grow), s * s * shrink + c * c * grow],
    ];
    embed_single(n_modes, mode, block)
}

/// Phase-space rotation `x -> x cos + p sin`, `p -> -x sin + p cos`.
pub fn rotation(n_modes: usize, mode: usize, angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    embed_single(n_modes, mode, [[c, s], [-s, c]])
}

/// `x_i' = sqrt(T) x_i + sqrt(1-T) x_j`, `x_j' = sqrt(1-T) x_i - sqrt(T) x_j`, same for p.
pub fn beamsplitter(n_modes: usize, i: usize, j: usize, transmissivity: f64) -> DMatrix<f64> {
    let t = transmissivity.sqrt();
    let r = (1.0 - transmissivity).sqrt();
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (a, b) = (2 * (i - 1), 2 * (j - 1));
    for q in 0..2 {
        s[(a + q, a + q)] = t;
        s[(a + q, b + q)] = r;
        s[(b + q, a + q)] = r;
        s[(b + q, b + q)] = -t;
    }
    s
}

fn embed_single(n_modes: usize, mode: usize, block: [[f64; 2]; 2]) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let a = 2 * (mode - 1);
    for r in 0..2 {
        for c in 0..2 {
            s[(a + r, a + c)] = block[r][c];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_symplectic() {
        for &(r, a) in &[(0.0, 0.0), (0.7, 0.3), (2.0, -1.1)] {
            assert!(symplectic_defect(&squeezer(3, 2, r, a)) < 1e-10);
            assert!(symplectic_defect(&rotation(3, 1, a)) < 1e-10);
        }
        for &t in &[0.0, 0.2, 1.0 / 3.0, 0.5, 1.0] {
            assert!(symplectic_defect(&beamsplitter(3, 1, 3, t)) < 1e-10);
        }
    }
}
