//! Browser bindings: three interactive views onto the simulator.
//!
//! Everything crosses the boundary as JSON strings so the page stays a
//! single static file plus the wasm-pack output. The `*_impl` functions
//! hold the logic and stay JsValue-free so they test on any host.

use wasm_bindgen::prelude::*;

use dlindblad_core::config::SimConfig;
use dlindblad_core::evolve::{integrate, EvolveOptions};
use dlindblad_core::moments::{moment_curve_family, MomentState};
use dlindblad_core::populations::{
    boltzmann_populations, detailed_balance_report, rates, steady_ratio, steady_state,
};
use dlindblad_core::{DeformationSpec, DeformedLiouvillian, EnvironmentCoefficients, Temperature};

/// Browser runs stay interactive below these sizes.
const MAX_DIM: usize = 40;
const MAX_STEPS: f64 = 200_000.0;

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

fn spec_from(kind: &str, tau: f64, table: Option<Vec<f64>>) -> Result<DeformationSpec, String> {
    let spec = match kind {
        "none" => return Ok(DeformationSpec::identity()),
        "q-real" => DeformationSpec::q_real(tau),
        "q-phase" => DeformationSpec::q_phase(tau),
        "q-taylor" => DeformationSpec::q_taylor(tau),
        "table" => DeformationSpec::table(table.unwrap_or_default()),
        other => return Err(format!("unknown deformation kind {other:?}")),
    };
    spec.map_err(|e| e.to_string())
}

fn moment_curves_impl(
    tau_sq: f64,
    n0: f64,
    n2_0: f64,
    t_max: f64,
    points: usize,
) -> Result<String, String> {
    if !(t_max > 0.0) || !(2..=5000).contains(&points) {
        return Err("need t_max > 0 and 2 <= points <= 5000".into());
    }
    if !(0.0..=0.5).contains(&tau_sq) {
        return Err("tau^2 must lie in [0, 0.5]".into());
    }
    if n2_0 < n0 * n0 {
        return Err("need <N^2> >= <N>^2".into());
    }
    let fam = moment_curve_family(&MomentState::new(n0, n2_0), tau_sq, t_max, points);
    serde_json::to_string(&fam).map_err(|e| e.to_string())
}

fn run_trajectory_impl(config_json: &str) -> Result<String, String> {
    let config: SimConfig = SimConfig::from_json(config_json).map_err(|e| e.to_string())?;
    config.validate_shape().map_err(|e| e.to_string())?;
    if config.fock_dim > MAX_DIM {
        return Err(format!("fock_dim capped at {MAX_DIM} in the browser"));
    }
    let spec = config.deformation.build().map_err(|e| e.to_string())?;
    let env = config.environment.build().map_err(|e| e.to_string())?;
    let l = DeformedLiouvillian::new(&spec, &env, config.fock_dim).map_err(|e| e.to_string())?;
    let rho0 = config
        .initial_state
        .build(config.fock_dim)
        .map_err(|e| e.to_string())?;
    let mut opts: EvolveOptions = config.evolve_options();
    let dt = opts
        .dt
        .unwrap_or_else(|| dlindblad_core::evolve::default_dt(&l));
    if opts.t_final / dt > MAX_STEPS {
        return Err(format!(
            "t_final/dt = {:.0} steps exceeds the browser cap {MAX_STEPS}",
            opts.t_final / dt
        ));
    }
    opts.dt = Some(dt);
    let traj = integrate(&l, &rho0, &opts).map_err(|e| e.to_string())?;
    let doc = serde_json::json!({
        "records": traj.records,
        "final_populations": traj.final_state.populations(),
        "leakage_flagged": traj.leakage_flagged,
        "dt": traj.dt,
        "stiffness_scale": l.stiffness_scale(),
    });
    serde_json::to_string(&doc).map_err(|e| e.to_string())
}

fn steady_distribution_impl(
    lambda: f64,
    coth: f64,
    dim: usize,
    kind: &str,
    tau: f64,
) -> Result<String, String> {
    if !(2..=64).contains(&dim) {
        return Err("dimension must lie in 2..=64".into());
    }
    let spec = spec_from(kind, tau, None)?;
    let env = EnvironmentCoefficients::thermal(1.0, lambda, Temperature::CothFactor(coth))
        .map_err(|e| e.to_string())?;
    let p = steady_state(&spec, &env, dim).map_err(|e| e.to_string())?;
    let residual = detailed_balance_report(&spec, &env, &p);
    let boltzmann = if coth == 1.0 {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        v
    } else {
        let theta = 0.5 * ((coth + 1.0) / (coth - 1.0)).ln();
        boltzmann_populations(theta, dim)
    };
    let mut rates_up = Vec::with_capacity(dim);
    let mut rates_down = Vec::with_capacity(dim);
    for n in 0..dim {
        let (up, down) = rates(&spec, &env, n);
        rates_up.push(up);
        rates_down.push(down);
    }
    let doc = serde_json::json!({
        "ratio": steady_ratio(&env),
        "populations": p.as_slice(),
        "boltzmann": boltzmann,
        "rates_up": rates_up,
        "rates_down": rates_down,
        "detailed_balance_residual": residual,
    });
    serde_json::to_string(&doc).map_err(|e| e.to_string())
}

/// Leading-order moment curves (real-q, phase, undeformed) on a
/// lambda*t grid; returns the curve family as JSON.
#[wasm_bindgen]
pub fn moment_curves(
    tau_sq: f64,
    n0: f64,
    n2_0: f64,
    t_max: f64,
    points: usize,
) -> Result<String, JsValue> {
    moment_curves_impl(tau_sq, n0, n2_0, t_max, points).map_err(|e| JsValue::from_str(&e))
}

/// Integrate a full simulation config (same JSON schema as the CLI) and
/// return the sampled trajectory records plus the final populations.
#[wasm_bindgen]
pub fn run_trajectory(config_json: &str) -> Result<String, JsValue> {
    run_trajectory_impl(config_json).map_err(|e| JsValue::from_str(&e))
}

/// Steady-state view: the geometric distribution (deformation
/// independent), the per-level transition rates (deformation dependent),
/// the detailed-balance residual and the Boltzmann comparison.
#[wasm_bindgen]
pub fn steady_distribution(
    lambda: f64,
    coth: f64,
    dim: usize,
    kind: &str,
    tau: f64,
) -> Result<String, JsValue> {
    steady_distribution_impl(lambda, coth, dim, kind, tau).map_err(|e| JsValue::from_str(&e))
}
