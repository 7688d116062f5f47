//! Truncated Fock-space matrix representations of the ladder operators
//! and their deformed counterparts.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::deformation::DeformationSpec;
use crate::error::{Error, Result};
use crate::linalg::{dagger, max_abs_diff};

/// Annihilation operator on the first `dim` number states:
/// a[n-1, n] = sqrt(n).
pub fn annihilation(dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Creation operator, the conjugate transpose of [`annihilation`].
pub fn creation(dim: usize) -> Array2<C64> {
    dagger(&annihilation(dim))
}

/// Number operator diag(0, 1, ..., dim-1), exact.
pub fn number(dim: usize) -> Array2<C64> {
    let mut n = Array2::zeros((dim, dim));
    for k in 0..dim {
        n[[k, k]] = C64::new(k as f64, 0.0);
    }
    n
}

/// Truncated matrices for a, a^dag, N, f(N) and the deformed ladder
/// operators A = a f(N) = f(N+1) a, A^dag = A^dagger.
#[derive(Debug, Clone)]
pub struct FockOperators {
    pub dim: usize,
    pub a: Array2<C64>,
    pub a_dag: Array2<C64>,
    pub n_op: Array2<C64>,
    /// f(n) for n = 0..dim-1.
    pub f_of_n: Array1<f64>,
    pub a_def: Array2<C64>,
    pub a_def_dag: Array2<C64>,
}

/// Maximum deviations found by [`FockOperators::check_commutators`].
#[derive(Debug, Clone, Copy)]
pub struct CommutatorReport {
    /// max |([A, A^dag])_{mn} - ([n+1]-[n]) delta_{mn}| over the interior
    /// block m, n <= dim-2. The top level is corrupted by truncation and
    /// excluded.
    pub deformed_interior: f64,
    /// largest |[n+1] - [n]| over the interior; brackets grow like
    /// sinh(n tau), so deviations are meaningful relative to this scale
    pub interior_scale: f64,
    /// max |[A, N] - A| over the full matrix.
    pub a_number: f64,
    /// max |[A^dag, N] + A^dag| over the full matrix.
    pub a_dag_number: f64,
}

impl CommutatorReport {
    /// Interior deviation in units of the bracket scale (floored at 1).
    pub fn deformed_interior_relative(&self) -> f64 {
        self.deformed_interior / self.interior_scale.max(1.0)
    }
}

impl FockOperators {
    /// Build the operator set at truncation `dim`. The deformation must be
    /// evaluable up to n = dim (the shifted diagonal f(N+1) reaches f(dim)).
    pub fn build(spec: &DeformationSpec, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "fock dimension must be at least 2, got {dim}"
            )));
        }
        spec.validate_up_to(dim)?;

        let a = annihilation(dim);
        let a_dag = creation(dim);
        let n_op = number(dim);

        let mut f_of_n = Array1::zeros(dim);
        for n in 0..dim {
            f_of_n[n] = spec.eval_f(n)?;
        }

        // both factorizations of the deformed operator
        let mut a_f = a.clone();
        for n in 0..dim {
            let f = C64::new(f_of_n[n], 0.0);
            for m in 0..dim {
                a_f[[m, n]] *= f;
            }
        }
        let mut f_shift_a = a.clone();
        for m in 0..dim {
            let f = C64::new(spec.eval_f(m + 1)?, 0.0);
            for n in 0..dim {
                f_shift_a[[m, n]] *= f;
            }
        }
        let dev = max_abs_diff(&a_f, &f_shift_a);
        debug_assert!(
            dev <= 1e-14,
            "a f(N) and f(N+1) a disagree by {dev}"
        );

        let a_def_dag = dagger(&a_f);
        Ok(Self {
            dim,
            a,
            a_dag,
            n_op,
            f_of_n,
            a_def: a_f,
            a_def_dag,
        })
    }

    /// Verify the deformed commutation relations on the truncated matrices.
    pub fn check_commutators(&self, spec: &DeformationSpec) -> CommutatorReport {
        let dim = self.dim;
        let comm = self.a_def.dot(&self.a_def_dag) - self.a_def_dag.dot(&self.a_def);
        let mut deformed_interior: f64 = 0.0;
        let mut interior_scale: f64 = 0.0;
        for m in 0..dim.saturating_sub(1) {
            for n in 0..dim.saturating_sub(1) {
                let expected = if m == n {
                    spec.eval_box(n + 1) - spec.eval_box(n)
                } else {
                    0.0
                };
                interior_scale = interior_scale.max(expected.abs());
                deformed_interior =
                    deformed_interior.max((comm[[m, n]] - C64::new(expected, 0.0)).norm());
            }
        }

        // [X, N] with integer-diagonal N is X scaled entrywise by (n - m),
        // which is exact in floating point.
        let a_number = commutator_with_number_dev(&self.a_def, 1.0);
        let a_dag_number = commutator_with_number_dev(&self.a_def_dag, -1.0);

        CommutatorReport {
            deformed_interior,
            interior_scale,
            a_number,
            a_dag_number,
        }
    }
}

/// max |[X, N] - sign * X| where N = diag(0..dim-1).
fn commutator_with_number_dev(x: &Array2<C64>, sign: f64) -> f64 {
    let dim = x.nrows();
    let mut dev: f64 = 0.0;
    for m in 0..dim {
        for n in 0..dim {
            let comm = x[[m, n]] * C64::new(n as f64 - m as f64, 0.0);
            dev = dev.max((comm - x[[m, n]] * C64::new(sign, 0.0)).norm());
        }
    }
    dev
}
