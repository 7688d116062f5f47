//! Small dense complex linear-algebra kernels.
//!
//! Only what the simulator needs: Hermitian eigenvalues (cyclic Jacobi),
//! LU solves with partial pivoting, and inverse iteration for the
//! near-null vector of an (almost) singular matrix. Everything is plain
//! Rust over `ndarray` so the crate builds for wasm targets without a
//! BLAS/LAPACK backend.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Hermitian part (m + m^dagger) / 2.
pub fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    let md = dagger(m);
    (m + &md) * C64::new(0.5, 0.0)
}

pub fn trace(m: &Array2<C64>) -> C64 {
    m.diag().iter().sum()
}

/// Largest elementwise modulus.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest elementwise modulus of a - b.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest deviation from Hermiticity, max |m - m^dagger|.
pub fn hermiticity_error(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi sweeps.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let (vals, _) = jacobi_hermitian(a, false);
    vals
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matrix whose columns are the matching orthonormal eigenvectors.
pub fn hermitian_eig(a: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let (vals, vecs) = jacobi_hermitian(a, true);
    (vals, vecs.expect("vectors requested"))
}

pub fn min_eigenvalue(a: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(a)
        .first()
        .copied()
        .unwrap_or(f64::NAN)
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(a).iter().map(|x| x.abs()).sum()
}

fn jacobi_hermitian(a: &Array2<C64>, want_vectors: bool) -> (Vec<f64>, Option<Array2<C64>>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = hermitize(a);
    let mut v = want_vectors.then(|| Array2::<C64>::eye(n));

    let scale: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 60;

    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[[p, q]];
                let gn = g.norm();
                if gn <= tol / (n as f64) {
                    continue;
                }
                let alpha = m[[p, p]].re;
                let beta = m[[q, q]].re;
                let phase = g / gn;
                let w = (alpha - beta) / (2.0 * gn);
                let t = if w >= 0.0 {
                    1.0 / (w + (1.0 + w * w).sqrt())
                } else {
                    -1.0 / (-w + (1.0 + w * w).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_conj_phase = phase.conj() * s; // s e^{-i phi}
                let s_phase = phase * s; // s e^{+i phi}

                // columns: M <- M U
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = mkp * c + mkq * s_conj_phase;
                    m[[k, q]] = mkq * c - mkp * s_phase;
                }
                // rows: M <- U^dagger M
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = mpk * c + mqk * s_phase;
                    m[[q, k]] = mqk * c - mpk * s_conj_phase;
                }
                // round-off cleanup on the zeroed pair
                let fix = C64::new(0.5, 0.0) * (m[[p, q]] + m[[q, p]].conj());
                m[[p, q]] = fix;
                m[[q, p]] = fix.conj();

                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let vkp = vm[[k, p]];
                        let vkq = vm[[k, q]];
                        vm[[k, p]] = vkp * c + vkq * s_conj_phase;
                        vm[[k, q]] = vkq * c - vkp * s_phase;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = v.map(|vm| {
        let mut out = Array2::<C64>::zeros((n, n));
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                out[[k, new_col]] = vm[[k, old_col]];
            }
        }
        out
    });
    (vals, vecs)
}

/// LU factorization with partial pivoting.
pub struct LuFactor {
    lu: Array2<C64>,
    piv: Vec<usize>,
    min_pivot: f64,
}

impl LuFactor {
    /// Factor a square matrix. Exactly zero pivots are replaced by a tiny
    /// value so that inverse iteration on singular matrices stays usable;
    /// `min_pivot` records how close to singular the factorization came.
    pub fn new(a: &Array2<C64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::SingularMatrix("matrix not square".into()));
        }
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        let scale = max_abs(a).max(1.0);
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut pmax = 0.0;
            let mut prow = k;
            for i in k..n {
                let v = lu[[i, k]].norm();
                if v > pmax {
                    pmax = v;
                    prow = i;
                }
            }
            if prow != k {
                for j in 0..n {
                    let tmp = lu[[k, j]];
                    lu[[k, j]] = lu[[prow, j]];
                    lu[[prow, j]] = tmp;
                }
            }
            piv.push(prow);
            let mut pivot = lu[[k, k]];
            if pivot.norm() == 0.0 {
                pivot = C64::new(1e-307 * scale.max(1e-300), 0.0);
                lu[[k, k]] = pivot;
            }
            min_pivot = min_pivot.min(pivot.norm());
            for i in (k + 1)..n {
                let factor = lu[[i, k]] / pivot;
                lu[[i, k]] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[[k, j]];
                    lu[[i, j]] -= sub;
                }
            }
        }
        Ok(Self { lu, piv, min_pivot })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &Array1<C64>) -> Array1<C64> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        let mut x = b.clone();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                let tmp = x[k];
                x[k] = x[p];
                x[p] = tmp;
            }
            for i in (k + 1)..n {
                let sub = self.lu[[i, k]] * x[k];
                x[i] -= sub;
            }
        }
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                let sub = self.lu[[k, j]] * x[j];
                x[k] -= sub;
            }
            x[k] /= self.lu[[k, k]];
        }
        x
    }
}

fn norm2(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inverse iteration towards the eigenvector of smallest |eigenvalue|.
///
/// Returns the unit vector and the residual |A v|. Intended for matrices
/// with a (near-)zero eigenvalue well separated from the rest of the
/// spectrum, where a couple of iterations suffice.
pub fn near_null_vector(a: &Array2<C64>, max_iter: usize) -> Result<(Array1<C64>, f64)> {
    let n = a.nrows();
    let lu = LuFactor::new(a)?;
    let mut v: Array1<C64> = Array1::from_elem(n, C64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter.max(1) {
        let w = lu.solve(&v);
        let norm = norm2(&w);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::SingularMatrix(
                "inverse iteration produced a non-finite vector".into(),
            ));
        }
        v = w.mapv(|z| z / norm);
        let av = a.dot(&v);
        let r = norm2(&av);
        if r >= residual * 0.999 {
            residual = r.min(residual);
            break;
        }
        residual = r;
    }
    Ok((v, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_diagonal_matrix() {
        let a = array![
            [c(3.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-1.0, 0.0)]
        ];
        let vals = hermitian_eigenvalues(&a);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_pauli_y_like_block() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let a = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        let vals = hermitian_eigenvalues(&a);
        assert!(vals[0].abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eig_residuals_on_pseudorandom_hermitian() {
        // deterministic scrambled Hermitian matrix
        let n = 9;
        let mut a = Array2::<C64>::zeros((n, n));
        let mut x = 0.123456_f64;
        let mut next = || {
            x = (x * 997.0 + 0.31).fract();
            x - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = c(next(), next());
            }
        }
        let a = hermitize(&a);
        let (vals, vecs) = hermitian_eig(&a);
        let sum: f64 = vals.iter().sum();
        assert!((sum - trace(&a).re).abs() < 1e-12);
        for (k, &lambda) in vals.iter().enumerate() {
            let v = vecs.column(k).to_owned();
            let av = a.dot(&v);
            let dev: f64 = av
                .iter()
                .zip(v.iter())
                .map(|(x, y)| (x - y * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(dev < 1e-12, "residual {dev} for eigenvalue {lambda}");
        }
        // orthonormality
        let gram = dagger(&vecs).dot(&vecs);
        let dev = max_abs_diff(&gram, &Array2::eye(n));
        assert!(dev < 1e-12);
    }

    #[test]
    fn lu_solves_linear_system() {
        let a = array![
            [c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)],
            [c(1.0, -1.0), c(3.0, 0.0), c(0.5, 0.0)],
            [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]
        ];
        let xtrue = array![c(1.0, 2.0), c(-0.5, 0.25), c(0.0, -1.0)];
        let b = a.dot(&xtrue);
        let lu = LuFactor::new(&a).unwrap();
        let x = lu.solve(&b);
        let dev: f64 = x
            .iter()
            .zip(xtrue.iter())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn near_null_vector_of_rank_deficient_matrix() {
        // A = diag(0, 1, 2) rotated by nothing: null vector is e0.
        let a = array![
            [c(1e-14, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
        ];
        let (v, res) = near_null_vector(&a, 10).unwrap();
        assert!(res < 1e-12);
        assert!((v[0].norm() - 1.0).abs() < 1e-10);
    }
}
