//! Subcommand implementations.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use dlindblad_core::config::{
    EnvironmentConfig, OutputConfig, OutputFormat, SimConfig,
};
use dlindblad_core::evolve::{integrate, moment_consistency_check};
use dlindblad_core::generator::DeformedLiouvillian;
use dlindblad_core::linalg::{dagger, max_abs_diff, trace};
use dlindblad_core::moments::{
    integrate_truncated, moment_curve_family, solve_t0, solve_t0_leading, MomentState,
};
use dlindblad_core::populations::{
    boltzmann_populations, detailed_balance_report, steady_p0_infinite, steady_ratio,
    steady_state,
};
use dlindblad_core::state::DensityMatrix;
use dlindblad_core::{DeformationSpec, EnvironmentCoefficients};

use crate::fmt;

/// Failure modes mapped onto process exit codes: usage/parse errors
/// exit 1, validation and physics errors exit 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Physics(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Physics(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Physics(m) => m,
        }
    }
}

impl From<dlindblad_core::Error> for Failure {
    fn from(e: dlindblad_core::Error) -> Self {
        Failure::Physics(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn load_config(path: &Path) -> Result<SimConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let config = SimConfig::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    config.validate_shape()?;
    Ok(config)
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).map_err(|e| {
            Failure::Usage(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Raw coefficient tuple (omega, lambda, D_qq, D_pp, D_pq) extracted
/// without admissibility checks, so the validation report can show the
/// margins even for rejected input.
fn raw_coefficients(env: &EnvironmentConfig) -> Result<(f64, f64, f64, f64, f64), Failure> {
    Ok(match env {
        EnvironmentConfig::Thermal {
            omega,
            lambda,
            temperature,
        } => {
            let coth = temperature.build()?.coth_factor()?;
            (
                *omega,
                *lambda,
                0.5 * lambda * coth / omega,
                0.5 * lambda * omega * coth,
                0.0,
            )
        }
        EnvironmentConfig::Diffusion {
            omega,
            lambda,
            d_qq,
            d_pp,
            d_pq,
        } => (*omega, *lambda, *d_qq, *d_pp, *d_pq),
        EnvironmentConfig::Couplings { omega, couplings } => {
            let mut d_qq = 0.0;
            let mut d_pp = 0.0;
            let mut cross = C64::new(0.0, 0.0);
            for c in couplings {
                let a = C64::new(c[0], c[1]);
                let b = C64::new(c[2], c[3]);
                d_qq += 0.5 * a.norm_sqr();
                d_pp += 0.5 * b.norm_sqr();
                cross += a.conj() * b;
            }
            (*omega, -cross.im, d_qq, d_pp, -0.5 * cross.re)
        }
    })
}

pub fn cmd_validate(config_path: &Path) -> CmdResult {
    let config = load_config(config_path)?;
    let (omega, lambda, d_qq, d_pp, d_pq) = raw_coefficients(&config.environment)?;
    let mut all_ok = true;
    let mut check = |label: &str, ok: bool, margin: f64| {
        println!(
            "{label}: {} (margin {})",
            if ok { "PASS" } else { "FAIL" },
            fmt::float(margin)
        );
        all_ok &= ok;
    };

    check("dissipation lambda > 0", lambda > 0.0, lambda);
    check("constraint (i) D_pp > 0", d_pp > 0.0, d_pp);
    check("constraint (ii) D_qq > 0", d_qq > 0.0, d_qq);
    let uncertainty = d_pp * d_qq - d_pq * d_pq - lambda * lambda / 4.0;
    check(
        "constraint (iii) D_pp*D_qq - D_pq^2 >= lambda^2/4",
        uncertainty >= 0.0,
        uncertainty,
    );
    let d2 = omega * d_qq + d_pp / omega;
    check("contractivity D2 >= lambda", d2 >= lambda, d2 - lambda);

    match config
        .deformation
        .build()
        .and_then(|spec| spec.validate_up_to(config.fock_dim))
    {
        Ok(()) => println!(
            "deformation valid up to n = {}: PASS",
            config.fock_dim
        ),
        Err(e) => {
            println!("deformation valid up to n = {}: FAIL ({e})", config.fock_dim);
            all_ok = false;
        }
    }

    if all_ok {
        Ok(())
    } else {
        Err(Failure::Physics("validation failed".into()))
    }
}

struct SimulationSetup {
    spec: DeformationSpec,
    env: EnvironmentCoefficients,
    liouvillian: DeformedLiouvillian,
    rho0: DensityMatrix,
}

fn build_setup(config: &SimConfig) -> Result<SimulationSetup, Failure> {
    let spec = config.deformation.build()?;
    let env = config.environment.build()?;
    let liouvillian = DeformedLiouvillian::new(&spec, &env, config.fock_dim)?;
    let rho0 = config.initial_state.build(config.fock_dim)?;
    Ok(SimulationSetup {
        spec,
        env,
        liouvillian,
        rho0,
    })
}

fn run_simulation(config: &SimConfig, out: Option<&Path>, format: OutputFormat) -> CmdResult {
    let setup = build_setup(config)?;
    let opts = config.evolve_options();
    let traj = integrate(&setup.liouvillian, &setup.rho0, &opts)?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Csv => {
            fmt::write_csv_header(
                &mut w,
                &["t", "trace", "purity", "mean_N", "mean_N2", "min_eig", "top_pop"],
            )?;
            for r in &traj.records {
                fmt::write_csv_row(
                    &mut w,
                    &[r.t, r.trace, r.purity, r.mean_n, r.mean_n2, r.min_eig, r.top_pop],
                )?;
            }
        }
        OutputFormat::Json => {
            let records: Vec<serde_json::Value> = traj
                .records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "t": r.t,
                        "trace": r.trace,
                        "purity": r.purity,
                        "mean_N": r.mean_n,
                        "mean_N2": r.mean_n2,
                        "min_eig": r.min_eig,
                        "top_pop": r.top_pop,
                    })
                })
                .collect();
            let m = traj.final_state.matrix();
            let final_state: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[[i, j]].re, m[[i, j]].im]).collect())
                .collect();
            let doc = serde_json::json!({
                "records": records,
                "final_state": final_state,
                "rehermitizations": traj.rehermitizations,
                "leakage_flagged": traj.leakage_flagged,
                "dt": traj.dt,
            });
            serde_json::to_writer_pretty(&mut w, &doc)
                .map_err(|e| Failure::Physics(format!("serialization failed: {e}")))?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn resolve_output(
    config: &SimConfig,
    out_flag: Option<&Path>,
    format_flag: Option<OutputFormat>,
) -> (Option<PathBuf>, OutputFormat) {
    let from_config: Option<&OutputConfig> = config.output.as_ref();
    let path = out_flag
        .map(Path::to_path_buf)
        .or_else(|| from_config.map(|o| PathBuf::from(&o.path)));
    let format = format_flag
        .or_else(|| from_config.map(|o| o.format))
        .unwrap_or(OutputFormat::Csv);
    (path, format)
}

/// Apply a `--sweep key=value` override to a parsed configuration.
fn apply_override(config: &mut SimConfig, key: &str, value: &str) -> Result<(), Failure> {
    let parse_f64 = || -> Result<f64, Failure> {
        value
            .parse::<f64>()
            .map_err(|e| Failure::Usage(format!("sweep value {value:?} for {key}: {e}")))
    };
    match key {
        "lambda" => {
            let v = parse_f64()?;
            match &mut config.environment {
                EnvironmentConfig::Thermal { lambda, .. }
                | EnvironmentConfig::Diffusion { lambda, .. } => *lambda = v,
                EnvironmentConfig::Couplings { .. } => {
                    return Err(Failure::Usage(
                        "lambda cannot be overridden for coupling-form environments".into(),
                    ))
                }
            }
        }
        "omega" => {
            let v = parse_f64()?;
            match &mut config.environment {
                EnvironmentConfig::Thermal { omega, .. }
                | EnvironmentConfig::Diffusion { omega, .. }
                | EnvironmentConfig::Couplings { omega, .. } => *omega = v,
            }
        }
        "coth" => {
            let v = parse_f64()?;
            match &mut config.environment {
                EnvironmentConfig::Thermal { temperature, .. } => {
                    *temperature =
                        dlindblad_core::config::TemperatureConfig::Coth { coth: v };
                }
                _ => {
                    return Err(Failure::Usage(
                        "coth override requires a thermal environment".into(),
                    ))
                }
            }
        }
        "theta" => {
            let v = parse_f64()?;
            match &mut config.environment {
                EnvironmentConfig::Thermal { temperature, .. } => {
                    *temperature =
                        dlindblad_core::config::TemperatureConfig::Theta { theta: v };
                }
                _ => {
                    return Err(Failure::Usage(
                        "theta override requires a thermal environment".into(),
                    ))
                }
            }
        }
        "tau" => config.deformation.tau = Some(parse_f64()?),
        "t_final" => config.t_final = parse_f64()?,
        "dt" => config.dt = Some(parse_f64()?),
        "fock_dim" => {
            config.fock_dim = value.parse::<usize>().map_err(|e| {
                Failure::Usage(format!("sweep value {value:?} for fock_dim: {e}"))
            })?;
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown sweep key {other:?} (supported: lambda, omega, coth, theta, tau, t_final, dt, fock_dim)"
            )))
        }
    }
    Ok(())
}

fn sweep_path(base: &Path, key: &str, value: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}.{key}={value}{ext}"))
}

pub fn cmd_simulate(
    config_path: &Path,
    out_flag: Option<&Path>,
    format_flag: Option<OutputFormat>,
    sweep: Option<&str>,
) -> CmdResult {
    let config = load_config(config_path)?;
    let (out, format) = resolve_output(&config, out_flag, format_flag);

    let Some(sweep) = sweep else {
        return run_simulation(&config, out.as_deref(), format);
    };

    let (key, values) = sweep
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("sweep must look like key=v1,v2, got {sweep:?}")))?;
    let values: Vec<&str> = values.split(',').filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(Failure::Usage("sweep needs at least one value".into()));
    }
    let out = out.ok_or_else(|| {
        Failure::Usage("sweeps write one file per value; provide --out or an output block".into())
    })?;

    // validate every override before spawning workers
    let mut jobs = Vec::new();
    for value in &values {
        let mut cfg = config.clone();
        apply_override(&mut cfg, key, value)?;
        jobs.push((cfg, sweep_path(&out, key, value)));
    }
    let results: Vec<CmdResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(cfg, path)| scope.spawn(move || run_simulation(cfg, Some(path), format)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for r in results {
        r?;
    }
    Ok(())
}

pub fn cmd_moments(
    config_path: &Path,
    out_flag: Option<&Path>,
    format_flag: Option<OutputFormat>,
) -> CmdResult {
    let config = load_config(config_path)?;
    let (out, format) = resolve_output(&config, out_flag, format_flag);
    if format == OutputFormat::Json {
        return Err(Failure::Usage("moments emits CSV only".into()));
    }
    let setup = build_setup(&config)?;
    let coth = setup.env.coth_factor.ok_or(Failure::Physics(
        "moment dynamics require thermal coefficients (a temperature block)".into(),
    ))?;
    let tau_sq = setup.spec.tau_sq_signed().ok_or(Failure::Physics(
        "moment dynamics need a tau-parameterized deformation (not a table)".into(),
    ))?;
    let lambda = setup.env.lambda;
    let s0 = MomentState::of(&setup.rho0);
    let dt = config.dt.unwrap_or(1e-3 / lambda);
    let path = integrate_truncated(lambda, tau_sq, coth, &s0, config.t_final, dt);

    let mut w = out_writer(out.as_deref())?;
    let zero_temperature = coth == 1.0;
    if zero_temperature {
        fmt::write_csv_header(
            &mut w,
            &[
                "t",
                "mean_N",
                "mean_N2",
                "mean_N_exact",
                "mean_N2_exact",
                "mean_N_leading",
                "mean_N2_leading",
            ],
        )?;
    } else {
        fmt::write_csv_header(&mut w, &["t", "mean_N", "mean_N2"])?;
    }
    let stride = config.sample_every.max(1);
    let last = path.len() - 1;
    for (i, (t, s)) in path.iter().enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        if zero_temperature {
            let exact = solve_t0(lambda, tau_sq, &s0, *t);
            let lead = solve_t0_leading(lambda, tau_sq, &s0, *t);
            fmt::write_csv_row(
                &mut w,
                &[
                    *t,
                    s.mean_n,
                    s.mean_n2,
                    exact.mean_n,
                    exact.mean_n2,
                    lead.mean_n,
                    lead.mean_n2,
                ],
            )?;
        } else {
            fmt::write_csv_row(&mut w, &[*t, s.mean_n, s.mean_n2])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_fig1(
    out: Option<&Path>,
    n0: f64,
    n2_0: f64,
    tau_sq: f64,
    t_max: f64,
    points: usize,
) -> CmdResult {
    if points < 2 || t_max <= 0.0 {
        return Err(Failure::Usage(
            "need at least two grid points and a positive t-max".into(),
        ));
    }
    let fam = moment_curve_family(&MomentState::new(n0, n2_0), tau_sq, t_max, points);
    let mut w = out_writer(out)?;
    fmt::write_csv_header(
        &mut w,
        &[
            "t",
            "qreal_N",
            "qphase_N",
            "undeformed_N",
            "qreal_N2",
            "qphase_N2",
            "undeformed_N2",
        ],
    )?;
    for i in 0..fam.lambda_t.len() {
        fmt::write_csv_row(
            &mut w,
            &[
                fam.lambda_t[i],
                fam.qreal_n[i],
                fam.qphase_n[i],
                fam.undeformed_n[i],
                fam.qreal_n2[i],
                fam.qphase_n2[i],
                fam.undeformed_n2[i],
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_steady(config_path: &Path, out_flag: Option<&Path>) -> CmdResult {
    let config = load_config(config_path)?;
    let spec = config.deformation.build()?;
    let env = config.environment.build()?;
    let p = steady_state(&spec, &env, config.fock_dim)?;
    let ratio = steady_ratio(&env);
    let residual = detailed_balance_report(&spec, &env, &p);
    let boltzmann_match = env.coth_factor.map(|coth| {
        let reference = if coth == 1.0 {
            let mut v = vec![0.0; config.fock_dim];
            v[0] = 1.0;
            v
        } else {
            let theta = 0.5 * ((coth + 1.0) / (coth - 1.0)).ln();
            boltzmann_populations(theta, config.fock_dim)
        };
        p.as_slice()
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    });
    let doc = serde_json::json!({
        "ratio": ratio,
        "populations": p.as_slice(),
        "detailed_balance_residual": residual,
        "boltzmann_match": boltzmann_match,
        "p0_truncated": p.as_slice()[0],
        "p0_infinite": steady_p0_infinite(&env),
    });
    let mut w = out_writer(out_flag)?;
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(|e| Failure::Physics(format!("serialization failed: {e}")))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let mut g = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[[i, j]] = C64::new(re, im);
        }
    }
    let rho = g.dot(&dagger(&g));
    let tr = trace(&rho);
    DensityMatrix::from_matrix(rho.mapv(|z| z / tr)).expect("gram construction is a valid state")
}

fn random_density_interior(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let inner = random_density(rng, dim - 1);
    let mut m = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim - 1 {
        for j in 0..dim - 1 {
            m[[i, j]] = inner.matrix()[[i, j]];
        }
    }
    DensityMatrix::from_matrix(m).expect("embedding preserves validity")
}

pub fn cmd_crosscheck(config_path: &Path, seed: u64) -> CmdResult {
    let config = load_config(config_path)?;
    if config.fock_dim > 16 {
        return Err(Failure::Physics(format!(
            "crosscheck runs dense oracles; fock_dim must be <= 16, got {}",
            config.fock_dim
        )));
    }
    let setup = build_setup(&config)?;
    let l = &setup.liouvillian;
    let dim = config.fock_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_ok = true;
    let mut report = |name: &str, dev: f64, tol: f64| {
        let ok = dev < tol;
        all_ok &= ok;
        println!(
            "check {name}: max deviation {} (tolerance {}): {}",
            fmt::float(dev),
            fmt::float(tol),
            if ok { "PASS" } else { "FAIL" }
        );
    };

    // operator form vs elementwise recursion
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let rho = random_density(&mut rng, dim);
        let a = l.apply(&rho)?;
        let b = l.apply_number_rep(&rho)?;
        dev = dev.max(max_abs_diff(&a, &b));
    }
    report("generator equivalence", dev, 1e-12);

    // dense vectorization against the direct action
    let lmat = l.vectorized_matrix()?;
    let mut dev = 0.0f64;
    for _ in 0..5 {
        let rho = random_density(&mut rng, dim);
        let direct = l.apply(&rho)?;
        let mut v = ndarray::Array1::<C64>::zeros(dim * dim);
        for n in 0..dim {
            for m in 0..dim {
                v[m + n * dim] = rho.matrix()[[m, n]];
            }
        }
        let lv = lmat.dot(&v);
        for n in 0..dim {
            for m in 0..dim {
                dev = dev.max((lv[m + n * dim] - direct[[m, n]]).norm());
            }
        }
    }
    report("vectorized generator", dev, 1e-12);

    // moment-equation consistency (thermal only)
    if setup.env.coth_factor.is_some() {
        let mut dev = 0.0f64;
        for _ in 0..20 {
            let rho = random_density_interior(&mut rng, dim);
            let check = moment_consistency_check(l, &rho)?;
            dev = dev.max(check.max_deviation());
        }
        report("moment-equation consistency", dev, 1e-10);
    } else {
        println!("check moment-equation consistency: SKIPPED (requires thermal coefficients)");
    }

    // integrated dynamics against the leading-order closed form
    let tau_sq = setup.spec.tau_sq_signed();
    match (setup.env.coth_factor, tau_sq) {
        (Some(coth), Some(tau_sq)) if coth == 1.0 && tau_sq.abs() <= 0.2 => {
            let s0 = MomentState::of(&setup.rho0);
            if s0.mean_n < 1e-9 {
                println!("check dynamics vs leading order: SKIPPED (initial state has no excitation)");
            } else {
                let lambda = setup.env.lambda;
                let opts = dlindblad_core::EvolveOptions {
                    t_final: 1.0 / lambda,
                    dt: Some(1e-3 / lambda),
                    sample_every: 50,
                    ..Default::default()
                };
                let traj = integrate(l, &setup.rho0, &opts)?;
                let mut dev = 0.0f64;
                for rec in &traj.records {
                    let lead = solve_t0_leading(lambda, tau_sq, &s0, rec.t);
                    dev = dev.max((rec.mean_n - lead.mean_n).abs() / lead.mean_n.abs().max(1e-6));
                }
                // regression bound frozen at tau^2 = 0.2 (measured 1.58e-2);
                // the deviation scales with tau^2, the 1e-6 floor covers the
                // undeformed limit where the closed form is exact
                let tol = 1e-6 + 2.5e-2 * (tau_sq.abs() / 0.2);
                report("dynamics vs leading order", dev, tol);
            }
        }
        _ => println!(
            "check dynamics vs leading order: SKIPPED (requires T = 0 and |tau^2| <= 0.2)"
        ),
    }

    if all_ok {
        Ok(())
    } else {
        Err(Failure::Physics("crosscheck failed".into()))
    }
}
