//! The deformed master-equation generator.
//!
//! Two independent evaluation routes are provided and cross-checked
//! everywhere:
//!
//! * [`DeformedLiouvillian::apply`] assembles the right-hand side from
//!   the truncated operator matrices exactly as the operator-form
//!   equation is written (commutator plus the D1, D1*, D2 +/- lambda
//!   groups with f-shifted diagonal factors);
//! * [`DeformedLiouvillian::apply_number_rep`] evaluates the elementwise
//!   recursion for d rho_mn / dt, where out-of-range indices contribute
//!   zero.
//!
//! The generator deforms only the dissipative part; the Hamiltonian
//! commutator -i omega [N, rho] stays undeformed.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::deformation::DeformationSpec;
use crate::environment::EnvironmentCoefficients;
use crate::error::{Error, Result};
use crate::fock::FockOperators;
use crate::linalg;
use crate::state::DensityMatrix;

/// Dense vectorization above this dimension is refused (D^2 x D^2 storage).
pub const VECTORIZATION_DIM_CAP: usize = 64;

#[derive(Debug, Clone)]
struct DissipatorMatrices {
    /// f(N+1) a
    c1l: Array2<C64>,
    /// a^dag f(N+1)
    c1r: Array2<C64>,
    /// f(N) a^dag
    c2l: Array2<C64>,
    /// a f(N)
    c2r: Array2<C64>,
    /// f(N-1) f(N) a^dag a^dag
    m1l: Array2<C64>,
    /// a^dag a^dag f(N+1) f(N+2)
    m1r: Array2<C64>,
    /// f(N+1) f(N+2) a a
    m2l: Array2<C64>,
    /// a a f(N-1) f(N)
    m2r: Array2<C64>,
}

/// Precomputed right-hand-side map rho -> d rho / dt.
#[derive(Debug, Clone)]
pub struct DeformedLiouvillian {
    spec: DeformationSpec,
    ops: FockOperators,
    env: EnvironmentCoefficients,
    /// f(n) for n = -1 ..= dim+1, index shifted by one. f(-1) and
    /// f(dim+1) only ever multiply structurally zero matrix entries;
    /// they are padded with 1 (inertness is asserted by tests).
    fpad: Vec<f64>,
    /// n f(n)^2
    k1: Vec<f64>,
    /// (n+1) f(n+1)^2, including the top entry dim * f(dim)^2
    k2: Vec<f64>,
    mats: DissipatorMatrices,
}

fn diag_times(d: &[f64], m: &Array2<C64>) -> Array2<C64> {
    let n = m.nrows();
    let mut out = m.clone();
    for i in 0..n {
        let f = C64::new(d[i], 0.0);
        for j in 0..n {
            out[[i, j]] *= f;
        }
    }
    out
}

fn times_diag(m: &Array2<C64>, d: &[f64]) -> Array2<C64> {
    let n = m.nrows();
    let mut out = m.clone();
    for j in 0..n {
        let f = C64::new(d[j], 0.0);
        for i in 0..n {
            out[[i, j]] *= f;
        }
    }
    out
}

impl DeformedLiouvillian {
    pub fn new(spec: &DeformationSpec, env: &EnvironmentCoefficients, dim: usize) -> Result<Self> {
        let ops = FockOperators::build(spec, dim)?;
        let mut fpad = vec![1.0; dim + 3];
        for n in 0..=dim {
            fpad[n + 1] = spec.eval_f(n)?;
        }
        Ok(Self::assemble(spec.clone(), ops, env.clone(), fpad))
    }

    /// Test-only constructor perturbing the inert padded values f(-1) and
    /// f(dim+1) to demonstrate they cannot influence the dynamics.
    #[doc(hidden)]
    pub fn with_inert_padding(
        spec: &DeformationSpec,
        env: &EnvironmentCoefficients,
        dim: usize,
        f_minus_one: f64,
        f_top: f64,
    ) -> Result<Self> {
        let ops = FockOperators::build(spec, dim)?;
        let mut fpad = vec![1.0; dim + 3];
        for n in 0..=dim {
            fpad[n + 1] = spec.eval_f(n)?;
        }
        fpad[0] = f_minus_one;
        fpad[dim + 2] = f_top;
        Ok(Self::assemble(spec.clone(), ops, env.clone(), fpad))
    }

    fn assemble(
        spec: DeformationSpec,
        ops: FockOperators,
        env: EnvironmentCoefficients,
        fpad: Vec<f64>,
    ) -> Self {
        let dim = ops.dim;
        let f = |j: isize| fpad[(j + 1) as usize];

        let k1: Vec<f64> = (0..dim)
            .map(|n| n as f64 * f(n as isize) * f(n as isize))
            .collect();
        let k2: Vec<f64> = (0..dim)
            .map(|n| (n + 1) as f64 * f(n as isize + 1) * f(n as isize + 1))
            .collect();

        let f_shift = |s: isize| -> Vec<f64> { (0..dim).map(|n| f(n as isize + s)).collect() };
        let f0 = f_shift(0);
        let f1 = f_shift(1);
        let prod_m1_0: Vec<f64> = (0..dim)
            .map(|n| f(n as isize - 1) * f(n as isize))
            .collect();
        let prod_1_2: Vec<f64> = (0..dim)
            .map(|n| f(n as isize + 1) * f(n as isize + 2))
            .collect();

        let adag2 = ops.a_dag.dot(&ops.a_dag);
        let a2 = ops.a.dot(&ops.a);

        let mats = DissipatorMatrices {
            c1l: diag_times(&f1, &ops.a),
            c1r: times_diag(&ops.a_dag, &f1),
            c2l: diag_times(&f0, &ops.a_dag),
            c2r: times_diag(&ops.a, &f0),
            m1l: diag_times(&prod_m1_0, &adag2),
            m1r: times_diag(&adag2, &prod_1_2),
            m2l: diag_times(&prod_1_2, &a2),
            m2r: times_diag(&a2, &prod_m1_0),
        };

        Self {
            spec,
            ops,
            env,
            fpad,
            k1,
            k2,
            mats,
        }
    }

    pub fn dim(&self) -> usize {
        self.ops.dim
    }

    pub fn spec(&self) -> &DeformationSpec {
        &self.spec
    }

    pub fn env(&self) -> &EnvironmentCoefficients {
        &self.env
    }

    pub fn ops(&self) -> &FockOperators {
        &self.ops
    }

    fn f_at(&self, j: isize) -> f64 {
        self.fpad[(j + 1) as usize]
    }

    /// Coarse upper estimate of the generator's spectral scale: the
    /// largest diagonal decay coefficient plus the D1 coupling and the
    /// fastest commutator rotation. The deformation amplifies the top
    /// rates like f^2(D), so a fixed step chosen from lambda alone can
    /// sit outside the stability region.
    pub fn stiffness_scale(&self) -> f64 {
        let cp = self.env.d2 + self.env.lambda;
        let cm = self.env.d2 - self.env.lambda;
        let k1max = self.k1.iter().cloned().fold(0.0, f64::max);
        let k2max = self.k2.iter().cloned().fold(0.0, f64::max);
        let mut scale = cp * k1max + cm.abs() * k2max;
        scale += 2.0 * self.env.d1.norm() * k1max.max(k2max);
        scale += self.env.omega * (self.dim() as f64 - 1.0);
        scale
    }

    /// Operator-form right-hand side on a raw matrix (hot path; the
    /// dimension must match).
    pub fn apply_matrix(&self, rho: &Array2<C64>) -> Array2<C64> {
        let dim = self.dim();
        assert_eq!(rho.nrows(), dim);
        assert_eq!(rho.ncols(), dim);
        let omega = self.env.omega;
        let cp = self.env.d2 + self.env.lambda;
        let cm = self.env.d2 - self.env.lambda;

        let j1 = self.mats.c1l.dot(rho).dot(&self.mats.c1r);
        let j2 = self.mats.c2l.dot(rho).dot(&self.mats.c2r);

        let mut out = Array2::<C64>::zeros((dim, dim));
        for m in 0..dim {
            for n in 0..dim {
                let ham = C64::new(0.0, -omega * (m as f64 - n as f64)) * rho[[m, n]];
                let decay = 0.5
                    * (cp * (self.k1[m] + self.k1[n]) + cm * (self.k2[m] + self.k2[n]));
                out[[m, n]] = ham - C64::new(decay, 0.0) * rho[[m, n]]
                    + C64::new(cp, 0.0) * j1[[m, n]]
                    + C64::new(cm, 0.0) * j2[[m, n]];
            }
        }

        let d1 = self.env.d1;
        if d1 != C64::new(0.0, 0.0) {
            let half_d1 = 0.5 * d1;
            let half_d1c = 0.5 * d1.conj();
            let t1 = self.mats.m1l.dot(rho);
            let t2 = rho.dot(&self.mats.m1r);
            let t3 = self.mats.c2l.dot(rho).dot(&self.mats.c1r);
            let t4 = self.mats.m2l.dot(rho);
            let t5 = rho.dot(&self.mats.m2r);
            let t6 = self.mats.c1l.dot(rho).dot(&self.mats.c2r);
            for m in 0..dim {
                for n in 0..dim {
                    out[[m, n]] += half_d1
                        * (t1[[m, n]] + t2[[m, n]] - 2.0 * t3[[m, n]])
                        + half_d1c * (t4[[m, n]] + t5[[m, n]] - 2.0 * t6[[m, n]]);
                }
            }
        }
        out
    }

    /// Operator-form right-hand side d rho / dt.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<Array2<C64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        Ok(self.apply_matrix(rho.matrix()))
    }

    /// Emit every contribution of the elementwise recursion for
    /// d rho_mn / dt as (m', n', coefficient); indices outside the
    /// truncation contribute nothing.
    fn stencil(&self, m: usize, n: usize, mut emit: impl FnMut(usize, usize, C64)) {
        let dim = self.dim();
        let omega = self.env.omega;
        let cp = self.env.d2 + self.env.lambda;
        let cm = self.env.d2 - self.env.lambda;
        let d1 = self.env.d1;
        let d1c = d1.conj();
        let f = |j: isize| self.f_at(j);
        let mi = m as isize;
        let ni = n as isize;
        let mf = m as f64;
        let nf = n as f64;

        let diag = C64::new(
            -0.5 * (cp * (self.k1[m] + self.k1[n]) + cm * (self.k2[m] + self.k2[n])),
            -omega * (mf - nf),
        );
        emit(m, n, diag);

        if m + 1 < dim && n + 1 < dim {
            let c = cp * ((mf + 1.0) * (nf + 1.0)).sqrt() * f(mi + 1) * f(ni + 1);
            emit(m + 1, n + 1, C64::new(c, 0.0));
        }
        if m >= 1 && n >= 1 {
            let c = cm * (mf * nf).sqrt() * f(mi) * f(ni);
            emit(m - 1, n - 1, C64::new(c, 0.0));
        }
        if d1 != C64::new(0.0, 0.0) {
            if m >= 1 && n + 1 < dim {
                let c = (mf * (nf + 1.0)).sqrt() * f(mi) * f(ni + 1);
                emit(m - 1, n + 1, -d1 * c);
            }
            if m + 1 < dim && n >= 1 {
                let c = ((mf + 1.0) * nf).sqrt() * f(mi + 1) * f(ni);
                emit(m + 1, n - 1, -d1c * c);
            }
            if n + 2 < dim {
                let c = ((nf + 1.0) * (nf + 2.0)).sqrt() * f(ni + 1) * f(ni + 2);
                emit(m, n + 2, 0.5 * d1 * c);
            }
            if m >= 2 {
                let c = (mf * (mf - 1.0)).sqrt() * f(mi - 1) * f(mi);
                emit(m - 2, n, 0.5 * d1 * c);
            }
            if m + 2 < dim {
                let c = ((mf + 1.0) * (mf + 2.0)).sqrt() * f(mi + 1) * f(mi + 2);
                emit(m + 2, n, 0.5 * d1c * c);
            }
            if n >= 2 {
                let c = (nf * (nf - 1.0)).sqrt() * f(ni - 1) * f(ni);
                emit(m, n - 2, 0.5 * d1c * c);
            }
        }
    }

    /// Number-representation right-hand side on a raw matrix.
    pub fn apply_number_rep_matrix(&self, rho: &Array2<C64>) -> Array2<C64> {
        let dim = self.dim();
        assert_eq!(rho.nrows(), dim);
        assert_eq!(rho.ncols(), dim);
        let mut out = Array2::<C64>::zeros((dim, dim));
        for m in 0..dim {
            for n in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                self.stencil(m, n, |mp, np, coeff| {
                    acc += coeff * rho[[mp, np]];
                });
                out[[m, n]] = acc;
            }
        }
        out
    }

    /// Number-representation right-hand side d rho / dt.
    pub fn apply_number_rep(&self, rho: &DensityMatrix) -> Result<Array2<C64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        Ok(self.apply_number_rep_matrix(rho.matrix()))
    }

    /// Column-stacked dense matrix L with vec(d rho/dt) = L vec(rho),
    /// vec index alpha = m + n * dim.
    pub fn vectorized_matrix(&self) -> Result<Array2<C64>> {
        let dim = self.dim();
        if dim > VECTORIZATION_DIM_CAP {
            return Err(Error::DimensionTooLarge {
                dim,
                cap: VECTORIZATION_DIM_CAP,
            });
        }
        let d2 = dim * dim;
        let mut l = Array2::<C64>::zeros((d2, d2));
        for m in 0..dim {
            for n in 0..dim {
                let row = m + n * dim;
                self.stencil(m, n, |mp, np, coeff| {
                    l[[row, mp + np * dim]] += coeff;
                });
            }
        }
        Ok(l)
    }

    /// Steady state extracted from the vectorized generator by inverse
    /// iteration towards the (near-)null vector, hermitized and
    /// trace-normalized.
    pub fn stationary_state(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let l = self.vectorized_matrix()?;
        let (v, _residual) = linalg::near_null_vector(&l, 40)?;
        let mut rho = Array2::<C64>::zeros((dim, dim));
        for n in 0..dim {
            for m in 0..dim {
                rho[[m, n]] = v[m + n * dim];
            }
        }
        let rho = linalg::hermitize(&rho);
        let tr = linalg::trace(&rho);
        if tr.norm() < 1e-12 {
            return Err(Error::SingularMatrix(
                "stationary vector has (near-)zero trace".into(),
            ));
        }
        let rho = rho.mapv(|z| z / tr);
        DensityMatrix::from_matrix(rho)
    }

    /// Expectation values (<N>, <N^2>) time derivatives from the
    /// generator: Tr[N L(rho)] and Tr[N^2 L(rho)].
    pub fn moment_derivatives(&self, rho: &DensityMatrix) -> Result<(f64, f64)> {
        let rhs = self.apply(rho)?;
        let dim = self.dim();
        let mut dn = 0.0;
        let mut dn2 = 0.0;
        for k in 0..dim {
            dn += k as f64 * rhs[[k, k]].re;
            dn2 += (k as f64) * (k as f64) * rhs[[k, k]].re;
        }
        Ok((dn, dn2))
    }
}

/// Trace functional applied to the vectorized derivative: the inner
/// product <vec(I), L vec(rho)>, i.e. Tr(d rho/dt) for the column-stacked
/// convention.
pub fn vectorized_trace_of(l: &Array2<C64>, rho: &Array2<C64>) -> C64 {
    let dim = rho.nrows();
    let mut v = Array1::<C64>::zeros(dim * dim);
    for n in 0..dim {
        for m in 0..dim {
            v[m + n * dim] = rho[[m, n]];
        }
    }
    let lv = l.dot(&v);
    let mut tr = C64::new(0.0, 0.0);
    for k in 0..dim {
        tr += lv[k + k * dim];
    }
    tr
}
