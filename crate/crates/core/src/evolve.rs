//! Fixed-step RK4 integration of d rho/dt = L(rho) with per-sample
//! diagnostics.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::DeformedLiouvillian;
use crate::linalg;
use crate::moments::full_moment_rhs;
use crate::state::DensityMatrix;

/// Diagnostics sampled along a trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub trace: f64,
    pub purity: f64,
    #[serde(rename = "mean_N")]
    pub mean_n: f64,
    #[serde(rename = "mean_N2")]
    pub mean_n2: f64,
    pub min_eig: f64,
    /// population of the two highest number states
    pub top_pop: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// None selects 0.01/lambda capped by 0.1/omega.
    pub dt: Option<f64>,
    pub sample_every: usize,
    /// re-hermitize rho at sample points when drift exceeds 1e-12
    pub re_hermitize: bool,
    /// warn when the top two populations exceed this bound
    pub leakage_tol: f64,
    /// warn when the minimum eigenvalue drops below -positivity_tol
    pub positivity_tol: f64,
    /// bound on the t = 0 step-halving discrepancy; a coarse sanity
    /// check against gross instability, not an accuracy control
    pub step_check_tol: f64,
    /// keep every sampled state, not just the final one
    pub store_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            t_final: 0.0,
            dt: None,
            sample_every: 1,
            re_hermitize: true,
            leakage_tol: 1e-8,
            positivity_tol: 1e-8,
            step_check_tol: 1e-4,
            store_states: false,
        }
    }
}

#[derive(Debug)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub final_state: DensityMatrix,
    pub states: Option<Vec<(f64, DensityMatrix)>>,
    /// number of re-hermitizations applied during the run
    pub rehermitizations: usize,
    /// true when top_pop exceeded the leakage tolerance at any sample
    pub leakage_flagged: bool,
    /// the step size actually used
    pub dt: f64,
}

/// 0.01/lambda capped by 0.1/omega, further capped by the reciprocal of
/// the generator's stiffness estimate so strongly deformed runs stay
/// inside the RK4 stability region.
pub fn default_dt(liouvillian: &DeformedLiouvillian) -> f64 {
    let env = liouvillian.env();
    (0.01 / env.lambda)
        .min(0.1 / env.omega)
        .min(1.0 / liouvillian.stiffness_scale())
}

fn rk4_step(l: &DeformedLiouvillian, rho: &Array2<C64>, dt: f64) -> Array2<C64> {
    let k1 = l.apply_matrix(rho);
    let k2 = l.apply_matrix(&(rho + &(&k1 * C64::new(0.5 * dt, 0.0))));
    let k3 = l.apply_matrix(&(rho + &(&k2 * C64::new(0.5 * dt, 0.0))));
    let k4 = l.apply_matrix(&(rho + &(&k3 * C64::new(dt, 0.0))));
    rho + &((k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
        * C64::new(dt / 6.0, 0.0))
}

fn record_of(t: f64, rho: &Array2<C64>) -> TrajectoryRecord {
    let dim = rho.nrows();
    let trace = linalg::trace(rho).re;
    let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    let mut mean_n = 0.0;
    let mut mean_n2 = 0.0;
    for k in 0..dim {
        let p = rho[[k, k]].re;
        mean_n += k as f64 * p;
        mean_n2 += (k as f64) * (k as f64) * p;
    }
    let top_pop = if dim >= 2 {
        rho[[dim - 1, dim - 1]].re + rho[[dim - 2, dim - 2]].re
    } else {
        rho[[dim - 1, dim - 1]].re
    };
    let min_eig = linalg::min_eigenvalue(rho);
    TrajectoryRecord {
        t,
        trace,
        purity,
        mean_n,
        mean_n2,
        min_eig,
        top_pop,
    }
}

/// Integrate the master equation from `rho0` to `t_final`.
///
/// The step is validated once at t = 0 by comparing one step at dt with
/// two steps at dt/2; a larger-than-tolerated discrepancy aborts with
/// [`Error::StepUnstable`]. dt is then rounded so the grid lands exactly
/// on t_final.
pub fn integrate(
    l: &DeformedLiouvillian,
    rho0: &DensityMatrix,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            got: rho0.dim(),
        });
    }
    if opts.t_final < 0.0 || !opts.t_final.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_final must be finite and nonnegative, got {}",
            opts.t_final
        )));
    }
    let sample_every = opts.sample_every.max(1);

    let mut records = Vec::new();
    let mut states = opts.store_states.then(Vec::new);

    if opts.t_final == 0.0 {
        let rec = record_of(0.0, rho0.matrix());
        records.push(rec);
        if let Some(s) = states.as_mut() {
            s.push((0.0, rho0.clone()));
        }
        return Ok(Trajectory {
            records,
            final_state: rho0.clone(),
            states,
            rehermitizations: 0,
            leakage_flagged: false,
            dt: 0.0,
        });
    }

    let dt_req = match opts.dt {
        Some(dt) if dt > 0.0 && dt.is_finite() => dt,
        Some(dt) => {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {dt}"
            )))
        }
        None => default_dt(l),
    };
    let n_steps = (opts.t_final / dt_req).ceil().max(1.0) as usize;
    let dt = opts.t_final / n_steps as f64;
    log::info!(
        "integrating {n_steps} steps of dt = {dt:.3e} (stiffness scale {:.3e})",
        l.stiffness_scale()
    );
    if n_steps > 1_000_000 {
        log::warn!(
            "{n_steps} steps requested; strong deformation at large dimension makes the generator stiff, consider a smaller truncation or horizon"
        );
    }

    // one-shot step-halving validation at t = 0
    let one = rk4_step(l, rho0.matrix(), dt);
    let half = rk4_step(l, &rk4_step(l, rho0.matrix(), 0.5 * dt), 0.5 * dt);
    let discrepancy = linalg::max_abs_diff(&one, &half);
    if discrepancy > opts.step_check_tol {
        return Err(Error::StepUnstable {
            discrepancy,
            tol: opts.step_check_tol,
        });
    }

    let mut rho = rho0.matrix().clone();
    let mut rehermitizations = 0usize;
    let mut leakage_flagged = false;
    let mut positivity_flagged = false;

    let mut sample = |step: usize,
                      rho: &mut Array2<C64>,
                      records: &mut Vec<TrajectoryRecord>,
                      states: &mut Option<Vec<(f64, DensityMatrix)>>|
     -> Result<()> {
        let t = step as f64 * dt;
        if opts.re_hermitize {
            let drift = linalg::hermiticity_error(rho);
            if drift > 1e-12 {
                *rho = linalg::hermitize(rho);
                rehermitizations += 1;
                log::debug!("re-hermitized at t = {t:.6} (drift {drift:.3e})");
            }
        }
        let rec = record_of(t, rho);
        // purity of a physical state never exceeds 1; runaway values or
        // non-finite entries mean the fixed step left the stability region
        if !rec.trace.is_finite() || !rec.purity.is_finite() || rec.purity > 2.0 {
            return Err(Error::Diverged { t });
        }
        if rec.top_pop > opts.leakage_tol && !leakage_flagged {
            leakage_flagged = true;
            log::warn!(
                "truncation leakage: top-level population {:.3e} exceeds {:.1e} at t = {t:.6}; consider a larger dimension",
                rec.top_pop,
                opts.leakage_tol
            );
        }
        if rec.min_eig < -opts.positivity_tol && !positivity_flagged {
            positivity_flagged = true;
            log::warn!(
                "positivity diagnostic: minimum eigenvalue {:.3e} below -{:.1e} at t = {t:.6}",
                rec.min_eig,
                opts.positivity_tol
            );
        }
        if let Some(s) = states.as_mut() {
            // leakage is flagged, not fatal: admit the observed drift
            let tol = 1e-6f64.max(2.0 * (rec.trace - 1.0).abs());
            s.push((t, DensityMatrix::from_matrix_with_trace_tol(rho.clone(), tol)?));
        }
        records.push(rec);
        Ok(())
    };

    sample(0, &mut rho, &mut records, &mut states)?;
    for step in 1..=n_steps {
        rho = rk4_step(l, &rho, dt);
        if step % sample_every == 0 || step == n_steps {
            sample(step, &mut rho, &mut records, &mut states)?;
        }
    }

    let final_trace = linalg::trace(&rho);
    let final_tol = 1e-6f64.max(2.0 * (final_trace - C64::new(1.0, 0.0)).norm());
    let final_state =
        DensityMatrix::from_matrix_with_trace_tol(linalg::hermitize(&rho), final_tol)?;
    Ok(Trajectory {
        records,
        final_state,
        states,
        rehermitizations,
        leakage_flagged,
        dt,
    })
}

/// Both sides of the thermal moment equations evaluated on one state:
/// `lhs` from the generator (Tr[N L(rho)], Tr[N^2 L(rho)]), `rhs` from
/// the closed expectation-value expressions.
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
}

impl MomentCheck {
    pub fn max_deviation(&self) -> f64 {
        (self.lhs.0 - self.rhs.0)
            .abs()
            .max((self.lhs.1 - self.rhs.1).abs())
    }
}

/// Compare d<N>/dt and d<N^2>/dt computed through the generator against
/// the expectation-value form. Requires thermal coefficients.
pub fn moment_consistency_check(
    l: &DeformedLiouvillian,
    rho: &DensityMatrix,
) -> Result<MomentCheck> {
    let lhs = l.moment_derivatives(rho)?;
    let rhs = full_moment_rhs(rho, l.spec(), l.env())?;
    Ok(MomentCheck {
        lhs,
        rhs: (rhs.mean_n, rhs.mean_n2),
    })
}
