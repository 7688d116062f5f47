//! Density matrices on the truncated number basis.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, unit-trace state on the first `dim` number states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    elements: Array2<C64>,
}

impl DensityMatrix {
    /// Validate and wrap an explicit matrix.
    pub fn from_matrix(elements: Array2<C64>) -> Result<Self> {
        Self::from_matrix_with_trace_tol(elements, TRACE_TOL)
    }

    /// Like [`Self::from_matrix`] with a caller-chosen trace tolerance.
    /// Integrated states carry honest truncation leakage in their trace;
    /// the trajectory records report it rather than hiding it behind a
    /// renormalization.
    pub fn from_matrix_with_trace_tol(elements: Array2<C64>, trace_tol: f64) -> Result<Self> {
        let dim = elements.nrows();
        if dim != elements.ncols() || dim == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and nonempty, got {}x{}",
                elements.nrows(),
                elements.ncols()
            )));
        }
        let herm = linalg::hermiticity_error(&elements);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |rho - rho^dag| = {herm:.3e}"
            )));
        }
        let tr = linalg::trace(&elements);
        if (tr - C64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from 1 beyond {trace_tol:.0e}"
            )));
        }
        Ok(Self { dim, elements })
    }

    /// The pure number state |n><n|.
    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidState(format!(
                "fock level {n} does not fit in dimension {dim}"
            )));
        }
        let mut m = Array2::zeros((dim, dim));
        m[[n, n]] = C64::new(1.0, 0.0);
        Ok(Self { dim, elements: m })
    }

    /// Diagonal state from a population vector (renormalized exactly).
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        let dim = p.len();
        if dim == 0 {
            return Err(Error::InvalidState("empty population vector".into()));
        }
        if p.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
            return Err(Error::InvalidState(
                "populations must be nonnegative and finite".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "populations sum to {sum}, expected 1 within 1e-9"
            )));
        }
        let mut m = Array2::zeros((dim, dim));
        for (n, &x) in p.iter().enumerate() {
            m[[n, n]] = C64::new(x.max(0.0) / sum, 0.0);
        }
        Ok(Self { dim, elements: m })
    }

    /// Truncated Gibbs state diag(r^n)/Z with r = (coth - 1)/(coth + 1).
    pub fn thermal_gibbs(dim: usize, coth_factor: f64) -> Result<Self> {
        if dim == 0 || !(coth_factor >= 1.0) {
            return Err(Error::InvalidState(format!(
                "need dim >= 1 and coth >= 1, got dim={dim}, coth={coth_factor}"
            )));
        }
        let r = (coth_factor - 1.0) / (coth_factor + 1.0);
        let mut weights = Vec::with_capacity(dim);
        let mut w = 1.0;
        for _ in 0..dim {
            weights.push(w);
            w *= r;
        }
        let z: f64 = weights.iter().sum();
        let mut m = Array2::zeros((dim, dim));
        for (n, &x) in weights.iter().enumerate() {
            m[[n, n]] = C64::new(x / z, 0.0);
        }
        Ok(Self { dim, elements: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.elements
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.elements
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.elements)
    }

    /// Tr rho^2 (real by Hermiticity); equals sum |rho_mn|^2.
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    /// <N> = sum n rho_nn.
    pub fn mean_n(&self) -> f64 {
        (0..self.dim)
            .map(|n| n as f64 * self.elements[[n, n]].re)
            .sum()
    }

    /// <N^2> = sum n^2 rho_nn.
    pub fn mean_n2(&self) -> f64 {
        (0..self.dim)
            .map(|n| (n as f64) * (n as f64) * self.elements[[n, n]].re)
            .sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.elements[[n, n]].re).collect()
    }

    /// Population of the two highest number states.
    pub fn top_population(&self) -> f64 {
        let d = self.dim;
        if d >= 2 {
            self.elements[[d - 1, d - 1]].re + self.elements[[d - 2, d - 2]].re
        } else {
            self.elements[[d - 1, d - 1]].re
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.elements)
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.elements)
    }

    /// Trace-norm distance ||rho - other||_1 (sum of absolute eigenvalues
    /// of the Hermitian difference).
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.elements - &other.elements;
        linalg::trace_norm_hermitian(&diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_state_moments() {
        let rho = DensityMatrix::fock(8, 3).unwrap();
        assert_eq!(rho.mean_n(), 3.0);
        assert_eq!(rho.mean_n2(), 9.0);
        assert_eq!(rho.purity(), 1.0);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::fock(3, 3).is_err());
    }

    #[test]
    fn gibbs_moments_match_geometric_series() {
        // coth = 2 -> r = 1/3; infinite-range <N> = r/(1-r) = 1/2
        let rho = DensityMatrix::thermal_gibbs(40, 2.0).unwrap();
        assert!((rho.mean_n() - 0.5).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(1.0, 0.0);
        m[[0, 1]] = C64::new(0.5, 0.0);
        assert!(DensityMatrix::from_matrix(m).is_err());

        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(0.7, 0.0);
        assert!(DensityMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn trace_distance_between_fock_states() {
        let a = DensityMatrix::fock(4, 0).unwrap();
        let b = DensityMatrix::fock(4, 1).unwrap();
        assert!((a.trace_distance(&b) - 2.0).abs() < 1e-12);
        assert!(a.trace_distance(&a) < 1e-14);
    }

    #[test]
    fn populations_validation() {
        assert!(DensityMatrix::from_populations(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_populations(&[0.9, 0.2]).is_err());
        assert!(DensityMatrix::from_populations(&[1.2, -0.2]).is_err());
    }
}
