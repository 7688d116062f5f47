//! Diagonal (population) dynamics: the birth-death chain over number
//! states, its transition rates, geometric steady state, detailed
//! balance, and the thermal Boltzmann form.
//!
//! The truncation boundary is reflecting (t_plus(D-1) = 0) so the chain
//! conserves probability exactly; pick D so the steady state puts
//! negligible mass on the top level.

use crate::deformation::DeformationSpec;
use crate::environment::EnvironmentCoefficients;
use crate::error::{Error, Result};

/// Probability vector over the first D number states.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    p: Vec<f64>,
}

impl PopulationVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidState("empty population vector".into()));
        }
        if p.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
            return Err(Error::InvalidState(
                "populations must be nonnegative within 1e-12".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "populations sum to {sum}, expected 1 within 1e-9"
            )));
        }
        Ok(Self { p })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn mean_n(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, &x)| n as f64 * x).sum()
    }
}

/// Transition rates out of level n:
/// t_plus(n) = (D2 - lambda)(n+1) f^2(n+1), t_minus(n) = (D2 + lambda) n f^2(n).
/// For q-deformations these are (D2 - lambda)[n+1] and (D2 + lambda)[n].
pub fn rates(spec: &DeformationSpec, env: &EnvironmentCoefficients, n: usize) -> (f64, f64) {
    let up = (env.d2 - env.lambda).max(0.0) * spec.eval_box(n + 1);
    let down = (env.d2 + env.lambda) * spec.eval_box(n);
    (up, down)
}

/// dP/dt of the birth-death chain, with the reflecting boundary
/// t_plus(D-1) = 0. The entries sum to zero exactly (telescoping).
pub fn population_rhs(
    spec: &DeformationSpec,
    env: &EnvironmentCoefficients,
    p: &PopulationVector,
) -> Vec<f64> {
    let dim = p.dim();
    let pv = p.as_slice();
    let mut out = vec![0.0; dim];
    // pairwise net flows between adjacent levels keep the sum exactly zero
    for n in 0..dim.saturating_sub(1) {
        let (up_n, _) = rates(spec, env, n);
        let (_, down_n1) = rates(spec, env, n + 1);
        let flow = up_n * pv[n] - down_n1 * pv[n + 1];
        out[n] -= flow;
        out[n + 1] += flow;
    }
    out
}

/// The geometric ratio r = (D2 - lambda)/(D2 + lambda) of the steady
/// state; zero at T = 0.
pub fn steady_ratio(env: &EnvironmentCoefficients) -> f64 {
    env.steady_ratio()
}

/// Steady state P(n) = P(0) r^n, normalized over the truncated range.
/// Independent of the deformation: the deformation argument is accepted
/// for interface symmetry and deliberately unused beyond validation.
pub fn steady_state(
    spec: &DeformationSpec,
    env: &EnvironmentCoefficients,
    dim: usize,
) -> Result<PopulationVector> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    spec.validate_up_to(dim)?;
    if env.d2 < env.lambda * (1.0 - 1e-12) {
        return Err(Error::NonContractive {
            d2: env.d2,
            lambda: env.lambda,
        });
    }
    let r = steady_ratio(env);
    let mut p = Vec::with_capacity(dim);
    let mut w = 1.0;
    for _ in 0..dim {
        p.push(w);
        w *= r;
    }
    let z: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= z;
    }
    PopulationVector::new(p)
}

/// P(0) of the infinite-range geometric distribution, 1 - r.
pub fn steady_p0_infinite(env: &EnvironmentCoefficients) -> f64 {
    1.0 - steady_ratio(env)
}

/// Max residual of the detailed-balance condition
/// t_minus(n) P(n) = t_plus(n-1) P(n-1) over n = 1..D-1.
pub fn detailed_balance_report(
    spec: &DeformationSpec,
    env: &EnvironmentCoefficients,
    p: &PopulationVector,
) -> f64 {
    let pv = p.as_slice();
    let mut worst = 0.0f64;
    for n in 1..p.dim() {
        let (_, down) = rates(spec, env, n);
        let (up_prev, _) = rates(spec, env, n - 1);
        worst = worst.max((down * pv[n] - up_prev * pv[n - 1]).abs());
    }
    worst
}

/// Truncated partition sum Z(n_max) = sum_{n=0}^{n_max} e^{-theta (2n+1)};
/// converges to 1/(2 sinh theta).
pub fn partition_function(theta: f64, n_max: usize) -> f64 {
    (0..=n_max)
        .map(|n| (-theta * (2 * n + 1) as f64).exp())
        .sum()
}

pub fn partition_function_closed(theta: f64) -> f64 {
    1.0 / (2.0 * theta.sinh())
}

/// Boltzmann weights e^{-theta(2n+1)} normalized over the truncated
/// range (the common e^{-theta} cancels).
pub fn boltzmann_populations(theta: f64, dim: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..dim).map(|n| (-theta * (2 * n + 1) as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// RK4 integration of the population chain; returns the final vector.
pub fn integrate_populations(
    spec: &DeformationSpec,
    env: &EnvironmentCoefficients,
    p0: &PopulationVector,
    t_final: f64,
    dt: f64,
) -> Result<PopulationVector> {
    assert!(dt > 0.0 && t_final >= 0.0);
    let n_steps = (t_final / dt).ceil().max(0.0) as usize;
    let dt = if n_steps > 0 { t_final / n_steps as f64 } else { dt };
    let dim = p0.dim();
    let mut p = p0.as_slice().to_vec();
    let rhs_of = |v: &[f64]| -> Vec<f64> {
        let wrapped = PopulationVector { p: v.to_vec() };
        population_rhs(spec, env, &wrapped)
    };
    for _ in 0..n_steps {
        let k1 = rhs_of(&p);
        let mid1: Vec<f64> = (0..dim).map(|i| p[i] + 0.5 * dt * k1[i]).collect();
        let k2 = rhs_of(&mid1);
        let mid2: Vec<f64> = (0..dim).map(|i| p[i] + 0.5 * dt * k2[i]).collect();
        let k3 = rhs_of(&mid2);
        let end: Vec<f64> = (0..dim).map(|i| p[i] + dt * k3[i]).collect();
        let k4 = rhs_of(&end);
        for i in 0..dim {
            p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    PopulationVector::new(p)
}
