//! Scenario dispatch: builds library inputs from a parsed config, runs the
//! matching operation, writes report and CSV artifacts, and maps outcomes to
//! exit codes (0 pass, 1 not certified / infeasible / bound violated,
//! 2 usage or runtime error).

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use majorant::*;
use std::result::Result;

use crate::config::*;
use crate::report::{write_with, Report};
use crate::CliError;

/// Command-line overrides applied on top of the config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub horizon: Option<f64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub exit: i32,
    pub report: Report,
    pub out_dir: PathBuf,
}

fn apply_overrides(config: &mut ScenarioConfig, overrides: &Overrides) {
    if let Some(seed) = overrides.seed {
        config.numerics.seed = seed;
    }
    if let Some(grid) = overrides.grid {
        config.numerics.grid = Some(grid);
    }
    if let Some(horizon) = overrides.horizon {
        config.numerics.horizon = Some(horizon);
    }
}

fn out_dir(config: &ScenarioConfig, overrides: &Overrides) -> PathBuf {
    if let Some(out) = &overrides.out {
        return out.clone();
    }
    if let Some(dir) = config.output.as_ref().and_then(|o| o.dir.as_ref()) {
        return PathBuf::from(dir);
    }
    PathBuf::from("out").join(&config.name)
}

fn grid_spec(numerics: &NumericsBlock) -> GridSpec {
    GridSpec {
        points: numerics.grid.unwrap_or(2001),
        spacing: match numerics.grid_spacing {
            Some(GridSpacingConfig::Log) => GridSpacing::Log,
            _ => GridSpacing::Uniform,
        },
        slack_tolerance: numerics.slack_tolerance.unwrap_or(0.0),
    }
}

fn integrate_opts(numerics: &NumericsBlock) -> IntegrateOpts {
    IntegrateOpts {
        rtol: numerics.rtol.unwrap_or(1e-10),
        atol: numerics.atol.unwrap_or(1e-12),
        ..IntegrateOpts::default()
    }
}

fn horizon_of(config: &ScenarioConfig) -> f64 {
    config.numerics.horizon.unwrap_or(100.0)
}

/// Runs one scenario and writes its artifacts under the resolved output
/// directory.
pub fn run_scenario(
    config: &ScenarioConfig,
    overrides: &Overrides,
) -> Result<Outcome, CliError> {
    let mut config = config.clone();
    apply_overrides(&mut config, overrides);
    config.validate()?;
    let dir = out_dir(&config, overrides);

    let mut outcome = match config.kind {
        Kind::Certify => run_certify(&config, &dir)?,
        Kind::Simulate => run_simulate(&config, &dir)?,
        Kind::Design => run_design_scenario(&config, &dir)?,
        Kind::Discrete => run_discrete(&config, &dir)?,
        Kind::Compare => run_compare(&config)?,
        Kind::Blowup => run_blowup(&config, &dir)?,
    };
    outcome.report.push("exit", outcome.exit);
    outcome.report.write(&dir.join("report.txt"))?;
    Ok(Outcome {
        out_dir: dir,
        ..outcome
    })
}

fn build_problem(config: &ScenarioConfig, horizon: f64) -> Result<InequalityProblem, CliError> {
    let block = config.problem.as_ref().expect("validated");
    Ok(InequalityProblem::new(
        block.gamma.build()?,
        block.alpha.build()?,
        block.beta.build()?,
        block.g0,
        horizon,
    )?)
}

fn run_certify(config: &ScenarioConfig, dir: &Path) -> Result<Outcome, CliError> {
    let horizon = horizon_of(config);
    let problem = build_problem(config, horizon)?;
    let mu = config.majorant.as_ref().expect("validated").build()?;
    let cert = verify_certificate(&problem, &mu, &grid_spec(&config.numerics))?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("horizon", horizon);
    report.extend(cert.to_key_values());
    write_with(&dir.join("slack.csv"), |w| cert.write_slack_csv(w))?;

    // Cross-validation: the worst-case equality solution must respect the
    // bound whenever the certificate verified.
    let cross_tol = config.numerics.cross_tolerance.unwrap_or(1e-9);
    let mut exit = if cert.verified { 0 } else { 1 };
    if cert.verified {
        let opts = integrate_opts(&config.numerics);
        let traj = integrate_comparison(&problem, problem.g0, horizon, &opts)?;
        let check = check_trajectory_bound(&traj, &mu, cross_tol)?;
        report.push("cross_check", if check.pass { "pass" } else { "fail" });
        report.push("cross_max_violation", check.max_violation);
        report.push("trajectory_status", &traj.status);
        write_with(&dir.join("trajectory.csv"), |w| traj.write_csv(w))?;
        if !check.pass {
            exit = 1;
        }
    } else {
        report.push("cross_check", "skipped");
    }
    Ok(Outcome {
        exit,
        report,
        out_dir: dir.to_path_buf(),
    })
}

fn build_system(block: &SystemBlock) -> Result<EvolutionSystem, CliError> {
    let dim = block.dim;
    let flat: Vec<f64> = block.a.iter().flatten().copied().collect();
    let a = DMatrix::from_row_slice(dim, dim, &flat);
    let u0 = DVector::from_vec(block.u0.clone());

    let f = block.f;
    let nonlin = move |_t: f64, u: &DVector<f64>| match f {
        SystemNonlinConfig::Zero => DVector::zeros(u.len()),
        SystemNonlinConfig::NormPower { c, p } => u * (c * u.norm().powf(p - 1.0)),
        SystemNonlinConfig::ScalarPower { c, p } => {
            let x: f64 = u[0];
            let v = if p.fract() == 0.0 {
                x.powi(p as i32)
            } else {
                x.signum() * x.abs().powf(p)
            };
            DVector::from_vec(vec![c * v])
        }
    };
    if matches!(block.f, SystemNonlinConfig::ScalarPower { .. }) && dim != 1 {
        return Err(CliError::Validation {
            field: "system.f".into(),
            message: "scalar-power nonlinearity requires dim = 1".into(),
        });
    }

    let forcing = block.b.clone();
    match &forcing {
        ForcingConfig::Zero => {}
        ForcingConfig::Constant { values } | ForcingConfig::ExpDecay { values, .. } => {
            if values.len() != dim {
                return Err(CliError::Validation {
                    field: "system.b".into(),
                    message: format!("expected {dim} entries, got {}", values.len()),
                });
            }
        }
    }
    let b = move |t: f64| match &forcing {
        ForcingConfig::Zero => DVector::zeros(dim),
        ForcingConfig::Constant { values } => DVector::from_vec(values.clone()),
        ForcingConfig::ExpDecay { values, k } => {
            DVector::from_vec(values.clone()) * (-k * t).exp()
        }
    };

    let mut system = EvolutionSystem::new(dim, move |_| a.clone(), nonlin, b, u0)?;
    if let Some(gamma) = &block.gamma {
        system = system.with_declared_gamma(gamma.build()?);
    }
    Ok(system)
}

fn run_simulate(config: &ScenarioConfig, dir: &Path) -> Result<Outcome, CliError> {
    let horizon = horizon_of(config);
    let block = config.system.as_ref().expect("validated");
    let system = build_system(block)?;
    let traj = integrate_system(&system, horizon, &integrate_opts(&config.numerics))?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("horizon", horizon);
    report.push("status", &traj.status);
    report.push("samples", traj.times.len());
    report.push("steps_accepted", traj.steps_accepted);
    if let Some(n) = traj.norms.last() {
        report.push("final_norm", n);
    }
    let mut exit = if traj.is_completed() { 0 } else { 1 };

    if system.declared_gamma.is_some() {
        let samples = config.numerics.samples.unwrap_or(1000);
        let check = system.sample_dissipativity(horizon, samples, config.numerics.seed)?;
        let pass = check.pass(1e-9);
        report.push("dissipativity_samples", check.samples);
        report.push("dissipativity_max_residual", check.max_residual);
        report.push("dissipativity", if pass { "pass" } else { "fail" });
        if !pass {
            exit = 1;
        }
    }

    if let Some(mu_config) = &config.majorant {
        let mu = mu_config.build()?;
        let tol = config.numerics.cross_tolerance.unwrap_or(1e-9);
        let check = check_trajectory_bound(&traj, &mu, tol)?;
        report.push("bound", mu.bound_expr());
        report.push("bound_check", if check.pass { "pass" } else { "fail" });
        report.push("bound_max_violation", check.max_violation);
        if !check.pass {
            exit = 1;
        }
    }

    write_with(&dir.join("trajectory.csv"), |w| traj.write_csv(w))?;
    Ok(Outcome {
        exit,
        report,
        out_dir: dir.to_path_buf(),
    })
}

/// What a designer produced, normalized for reports and sweeps.
pub struct DesignRun {
    pub feasible: bool,
    pub violation: Option<Violation>,
    /// Margin of the tightest sufficient condition (negative when violated).
    pub margin: f64,
    pub u0_radius: Option<f64>,
    pub bound_at_horizon: Option<f64>,
    pub extras: Vec<(String, String)>,
    /// Certificate pair for cross-verification, when one exists.
    pub cross: Option<(InequalityProblem, Majorant)>,
}

fn req(block: &DesignBlock, value: Option<f64>, name: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Validation {
        field: format!("design.{name}"),
        message: format!("required for theorem \"{}\"", block.theorem),
    })
}

fn kv(key: &str, value: impl std::fmt::Display) -> (String, String) {
    (key.to_string(), value.to_string())
}

/// Runs the designer named in the block. `horizon` is only used to evaluate
/// the guaranteed bound for the report.
pub fn run_design(block: &DesignBlock, horizon: f64) -> Result<DesignRun, CliError> {
    match block.theorem {
        Theorem::ExponentialRate => {
            let k = req(block, block.k, "k")?;
            let c0 = req(block, block.c0, "c0")?;
            let p = req(block, block.p, "p")?;
            let epsilon = req(block, block.epsilon, "epsilon")?;
            let d = design_exponential_rate(k, c0, p, epsilon)?;
            Ok(DesignRun {
                feasible: true,
                violation: None,
                margin: 0.0,
                u0_radius: Some(d.u0_radius),
                bound_at_horizon: Some(d.bound_at(horizon)),
                extras: vec![kv("lambda", d.lambda), kv("b", d.b)],
                cross: Some((d.worst_case_problem(horizon)?, d.majorant())),
            })
        }
        Theorem::DataDependentRate => {
            let c0 = req(block, block.c0, "c0")?;
            let p = req(block, block.p, "p")?;
            let u0_norm = req(block, block.u0_norm, "u0_norm")?;
            let k = req(block, block.k, "k")?;
            let margin = k - c0 * u0_norm.powf(p - 1.0);
            match check_data_dependent_rate(c0, p, u0_norm, k)? {
                Design::Feasible(d) => {
                    let cross = if u0_norm > 0.0 {
                        let problem = InequalityProblem::new(
                            TimeFunction::Constant(k),
                            Nonlinearity::power_law(c0, p)?,
                            TimeFunction::zero(),
                            u0_norm,
                            horizon,
                        )?;
                        let mu = Majorant::exponential(1.0 / u0_norm, d.rate)?;
                        Some((problem, mu))
                    } else {
                        None
                    };
                    Ok(DesignRun {
                        feasible: true,
                        violation: None,
                        margin,
                        u0_radius: None,
                        bound_at_horizon: Some(d.bound_at(horizon)),
                        extras: vec![kv("rate", d.rate), kv("amplitude", d.amplitude)],
                        cross,
                    })
                }
                Design::Infeasible(v) => Ok(DesignRun {
                    feasible: false,
                    violation: Some(v),
                    margin,
                    u0_radius: None,
                    bound_at_horizon: None,
                    extras: vec![],
                    cross: None,
                }),
            }
        }
        Theorem::PowerRate => {
            let c1 = req(block, block.c1, "c1")?;
            let q1 = req(block, block.q1, "q1")?;
            let c0 = req(block, block.c0, "c0")?;
            let p = req(block, block.p, "p")?;
            let epsilon = req(block, block.epsilon, "epsilon")?;
            let nu = c1 - epsilon;
            let margin = (1.0 - q1).min((p - 1.0) * nu - q1);
            match design_power_rate(c1, q1, c0, p, epsilon)? {
                Design::Feasible(d) => Ok(DesignRun {
                    feasible: true,
                    violation: None,
                    margin,
                    u0_radius: Some(d.u0_radius),
                    bound_at_horizon: Some(d.bound_at(horizon)),
                    extras: vec![kv("lambda", d.lambda), kv("nu", d.nu)],
                    cross: Some((d.worst_case_problem(horizon)?, d.majorant())),
                }),
                Design::Infeasible(v) => Ok(DesignRun {
                    feasible: false,
                    violation: Some(v),
                    margin,
                    u0_radius: None,
                    bound_at_horizon: None,
                    extras: vec![],
                    cross: None,
                }),
            }
        }
        Theorem::ForcedPowerRate => {
            let c0 = req(block, block.c0, "c0")?;
            let c2 = req(block, block.c2, "c2")?;
            let p = req(block, block.p, "p")?;
            let q1 = req(block, block.q1, "q1")?;
            let q2 = req(block, block.q2, "q2")?;
            let nu = req(block, block.nu, "nu")?;
            let c1 = req(block, block.c1, "c1")?;
            let margin = (1.0 - q1)
                .min(q2 - nu - q1)
                .min(nu * (p - 1.0) - q1)
                .min(c1 - forced_minimal_budget(c0, c2, p) - nu);
            match design_forced_power_rate(c0, c2, p, q1, q2, nu, c1)? {
                Design::Feasible(d) => Ok(DesignRun {
                    feasible: true,
                    violation: None,
                    margin,
                    u0_radius: Some(d.u0_radius),
                    bound_at_horizon: Some(d.bound_at(horizon)),
                    extras: vec![kv("lambda0", d.lambda0), kv("hmin", d.hmin)],
                    cross: Some((d.worst_case_problem(horizon)?, d.majorant())),
                }),
                Design::Infeasible(v) => Ok(DesignRun {
                    feasible: false,
                    violation: Some(v),
                    margin,
                    u0_radius: None,
                    bound_at_horizon: None,
                    extras: vec![
                        kv("lambda0", forced_optimal_amplitude(c0, c2, p)),
                        kv("hmin", forced_minimal_budget(c0, c2, p)),
                    ],
                    cross: None,
                }),
            }
        }
        Theorem::BoundedOrbit => {
            let c1 = req(block, block.c1, "c1")?;
            let c2 = req(block, block.c2, "c2")?;
            let m1 = req(block, block.m1, "m1")?;
            let m2 = req(block, block.m2, "m2")?;
            let p = req(block, block.p, "p")?;
            let g0 = req(block, block.g0, "g0")?;
            let d_param = 1.0 / (2.0 * g0);
            let n = m1.min(m2) - 1.0;
            let margin = n.min(n - c1 - c2 * d_param.powf(1.0 - p));
            match design_bounded_orbit(c1, c2, m1, m2, p, g0)? {
                Design::Feasible(d) => Ok(DesignRun {
                    feasible: true,
                    violation: None,
                    margin,
                    u0_radius: Some(d.g0),
                    bound_at_horizon: Some(d.bound_at(horizon)),
                    extras: vec![
                        kv("d", d.d),
                        kv("lambda", d.lambda),
                        kv("n", d.n),
                        kv("residual", d.residual),
                        kv("sup_bound", d.sup_bound),
                    ],
                    cross: Some((d.worst_case_problem(horizon)?, d.majorant())),
                }),
                Design::Infeasible(v) => Ok(DesignRun {
                    feasible: false,
                    violation: Some(v),
                    margin,
                    u0_radius: None,
                    bound_at_horizon: None,
                    extras: vec![kv("d", d_param), kv("n", n)],
                    cross: None,
                }),
            }
        }
        Theorem::MixedEnvelopes => {
            let alpha0 = req(block, block.alpha0, "alpha0")?;
            let lambda = req(block, block.lambda, "lambda")?;
            let k = req(block, block.k, "k")?;
            let kprime = req(block, block.kprime, "kprime")?;
            let nu_beta = req(block, block.nu_beta, "nu_beta")?;
            let gamma = req(block, block.gamma, "gamma")?;
            let half = (gamma - k) / 2.0;
            let margin = (half - alpha0 / lambda).min(half - lambda * nu_beta);
            match check_mixed_envelopes(alpha0, lambda, k, kprime, nu_beta, gamma)? {
                Design::Feasible(d) => Ok(DesignRun {
                    feasible: true,
                    violation: None,
                    margin,
                    u0_radius: Some(d.max_initial),
                    bound_at_horizon: Some(d.bound_at(horizon)),
                    extras: vec![kv("decay_rate", d.k), kv("max_initial", d.max_initial)],
                    cross: Some((d.worst_case_problem(horizon)?, d.majorant())),
                }),
                Design::Infeasible(v) => Ok(DesignRun {
                    feasible: false,
                    violation: Some(v),
                    margin,
                    u0_radius: None,
                    bound_at_horizon: None,
                    extras: vec![],
                    cross: None,
                }),
            }
        }
    }
}

fn run_design_scenario(config: &ScenarioConfig, dir: &Path) -> Result<Outcome, CliError> {
    let horizon = horizon_of(config);
    let block = config.design.as_ref().expect("validated");
    let run = run_design(block, horizon)?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("theorem", block.theorem);
    report.push("feasible", run.feasible);
    report.push("condition_margin", run.margin);
    for (k, v) in &run.extras {
        report.push(k.clone(), v);
    }
    if let Some(r) = run.u0_radius {
        report.push("u0_radius", r);
    }
    if let Some(v) = &run.violation {
        report.push("violated_condition", v.condition.name());
        report.push("violation", v);
    }
    if let Some(b) = run.bound_at_horizon {
        report.push("bound_at_horizon", b);
    }

    // Feasible designs are cross-verified as certificates over the horizon.
    if let Some((problem, mu)) = &run.cross {
        let cert = verify_certificate(problem, mu, &grid_spec(&config.numerics))?;
        report.push("bound", mu.bound_expr());
        report.push("cross_min_slack", cert.min_slack);
        report.push(
            "cross_check",
            if cert.min_slack >= -1e-12 && cert.initial_ok {
                "pass"
            } else {
                "fail"
            },
        );
        write_with(&dir.join("slack.csv"), |w| cert.write_slack_csv(w))?;
    }

    let exit = if run.feasible { 0 } else { 1 };
    Ok(Outcome {
        exit,
        report,
        out_dir: dir.to_path_buf(),
    })
}

fn run_discrete(config: &ScenarioConfig, dir: &Path) -> Result<Outcome, CliError> {
    let block = config.discrete.as_ref().expect("validated");
    let h: Vec<f64> = match &block.h {
        SeqConfig::Scalar(v) => {
            let steps = block.steps.ok_or_else(|| CliError::Validation {
                field: "discrete.steps".into(),
                message: "required when h is a single number".into(),
            })?;
            vec![*v; steps]
        }
        SeqConfig::List(vs) => {
            if let Some(steps) = block.steps {
                if steps != vs.len() {
                    return Err(CliError::Validation {
                        field: "discrete.h".into(),
                        message: format!("steps = {steps} but h lists {} entries", vs.len()),
                    });
                }
            }
            vs.clone()
        }
        SeqConfig::Fn(_) => {
            return Err(CliError::Validation {
                field: "discrete.h".into(),
                message: "step sizes must be literal (number or list)".into(),
            })
        }
    };
    let n = h.len();
    let mut times = Vec::with_capacity(n + 1);
    times.push(0.0);
    for hi in &h {
        times.push(times.last().unwrap() + hi);
    }
    let gamma = block.gamma.expand(n, &times, "discrete.gamma")?;
    let beta = block.beta.expand(n, &times, "discrete.beta")?;
    let problem = DiscreteProblem::new(h, gamma, beta, block.alpha.build()?, block.g0)?;

    let cert_block = config.certificate.as_ref().expect("validated");
    let mu = match &cert_block.mu {
        MuConfig::Values { values } => values.clone(),
        MuConfig::Family(family) => {
            let majorant = family.build()?;
            times
                .iter()
                .map(|t| majorant.eval(*t).map_err(CliError::from))
                .collect::<Result<_, _>>()?
        }
    };
    let cert = DiscreteCertificate::new(mu)?;
    let result = verify_discrete_certificate(&problem, &cert)?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("steps", n);
    report.push("verified", result.verified);
    report.push("initial_ok", result.initial_ok);
    report.push("min_slack", result.min_slack);
    report.push("bound_holds", result.bound_holds);
    report.push("max_bound_violation", result.max_bound_violation);
    write_with(&dir.join("discrete.csv"), |w| result.write_csv(w))?;

    let exit = if result.verified && result.bound_holds {
        0
    } else {
        1
    };
    Ok(Outcome {
        exit,
        report,
        out_dir: dir.to_path_buf(),
    })
}

fn run_compare(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let horizon = horizon_of(config);
    let block = config.compare.as_ref().expect("validated");
    let f = block.f;
    let g = block.g;
    let verdict = check_comparison(
        move |t, x| f.eval(t, x),
        move |t, x| g.eval(t, x),
        block.phi0,
        block.psi0,
        horizon,
        &integrate_opts(&config.numerics),
    )?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("horizon", horizon);
    report.push("holds", verdict.holds);
    report.push("max_gap_violation", verdict.max_gap_violation);
    report.push("tolerance", verdict.tolerance);
    Ok(Outcome {
        exit: if verdict.holds { 0 } else { 1 },
        report,
        out_dir: PathBuf::new(),
    })
}

fn run_blowup(config: &ScenarioConfig, dir: &Path) -> Result<Outcome, CliError> {
    let horizon = horizon_of(config);
    let block = config.blowup.as_ref().expect("validated");
    let (c, u0) = (block.c, block.u0);
    let ivp = ScalarIVP::new(move |_, x: f64| c * x * x * x, u0, 0.0, horizon);
    let traj = integrate_scalar(&ivp, &integrate_opts(&config.numerics))?;

    let mut report = Report::new(&config.name, config.kind);
    report.push("c", c);
    report.push("u0", u0);
    report.push("horizon", horizon);
    report.push("status", &traj.status);

    let tol = config.numerics.blowup_tolerance.unwrap_or(1e-3);
    let exit = if c > 0.0 {
        let oracle = cubic_blowup_time(c, u0)?;
        report.push("tb_oracle", oracle);
        match &traj.status {
            TrajectoryStatus::BlowUp { tb_estimate } => {
                let gap = (tb_estimate - oracle).abs();
                report.push("tb_estimate", tb_estimate);
                report.push("tb_gap", gap);
                report.push("tb_tolerance", tol);
                if gap <= tol {
                    0
                } else {
                    1
                }
            }
            _ => 1,
        }
    } else {
        // Stable branch: the solution exists globally and decays.
        if traj.is_completed() {
            0
        } else {
            1
        }
    };
    write_with(&dir.join("trajectory.csv"), |w| traj.write_csv(w))?;
    Ok(Outcome {
        exit,
        report,
        out_dir: dir.to_path_buf(),
    })
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Applies `value` to the named scalar parameter of the config.
pub fn apply_parameter(
    config: &mut ScenarioConfig,
    name: &str,
    value: f64,
) -> Result<(), CliError> {
    let unknown = || CliError::UnknownParameter {
        name: name.to_string(),
    };
    match config.kind {
        Kind::Design => {
            let block = config.design.as_mut().expect("validated");
            let slot = match name {
                "k" => &mut block.k,
                "c0" => &mut block.c0,
                "p" => &mut block.p,
                "epsilon" => &mut block.epsilon,
                "c1" => &mut block.c1,
                "c2" => &mut block.c2,
                "q1" => &mut block.q1,
                "q2" => &mut block.q2,
                "nu" => &mut block.nu,
                "m1" => &mut block.m1,
                "m2" => &mut block.m2,
                "g0" => &mut block.g0,
                "u0_norm" => &mut block.u0_norm,
                "alpha0" => &mut block.alpha0,
                "lambda" => &mut block.lambda,
                "kprime" => &mut block.kprime,
                "nu_beta" => &mut block.nu_beta,
                "gamma" => &mut block.gamma,
                _ => return Err(unknown()),
            };
            *slot = Some(value);
            Ok(())
        }
        Kind::Certify => {
            if name == "g0" {
                config.problem.as_mut().expect("validated").g0 = value;
                return Ok(());
            }
            match (config.majorant.as_mut().expect("validated"), name) {
                (MajorantConfig::Exponential { lambda, .. }, "lambda") => *lambda = value,
                (MajorantConfig::Exponential { b, .. }, "b") => *b = value,
                (MajorantConfig::Power { lambda, .. }, "lambda") => *lambda = value,
                (MajorantConfig::Power { nu, .. }, "nu") => *nu = value,
                (MajorantConfig::ShiftedInversePower { d, .. }, "d") => *d = value,
                (MajorantConfig::ShiftedInversePower { lambda, .. }, "lambda") => {
                    *lambda = value
                }
                (MajorantConfig::ShiftedInversePower { n, .. }, "n") => *n = value,
                _ => return Err(unknown()),
            }
            Ok(())
        }
        _ => Err(CliError::Validation {
            field: "kind".into(),
            message: format!("sweep supports design and certify scenarios, not {}", config.kind),
        }),
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: usize,
    pub out_dir: PathBuf,
}

/// Runs the scenario once per parameter value and writes `summary.csv` with
/// columns `value,feasible,min_slack_or_residual,u0_radius,bound_at_horizon`.
pub fn run_sweep(
    config: &ScenarioConfig,
    parameter: &str,
    values: &[f64],
    overrides: &Overrides,
) -> Result<SweepOutcome, CliError> {
    let mut base = config.clone();
    apply_overrides(&mut base, overrides);
    base.validate()?;
    let dir = out_dir(&base, overrides);
    let horizon = horizon_of(&base);

    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut csv = String::from("value,feasible,min_slack_or_residual,u0_radius,bound_at_horizon\n");
    for value in values {
        let mut instance = base.clone();
        apply_parameter(&mut instance, parameter, *value)?;
        match instance.kind {
            Kind::Design => {
                let run = run_design(instance.design.as_ref().expect("validated"), horizon)?;
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    value,
                    run.feasible,
                    run.margin,
                    fmt(run.u0_radius),
                    fmt(run.bound_at_horizon),
                ));
            }
            Kind::Certify => {
                let problem = build_problem(&instance, horizon)?;
                let mu = instance.majorant.as_ref().expect("validated").build()?;
                let cert = verify_certificate(&problem, &mu, &grid_spec(&instance.numerics))?;
                csv.push_str(&format!(
                    "{},{},{},,{}\n",
                    value,
                    cert.verified,
                    cert.min_slack,
                    cert.bound_at_horizon(),
                ));
            }
            _ => unreachable!("apply_parameter rejects other kinds"),
        }
    }
    crate::report::write_text(&dir.join("summary.csv"), &csv)?;
    Ok(SweepOutcome {
        rows: values.len(),
        out_dir: dir,
    })
}

// ---------------------------------------------------------------------------
// Batches
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct BatchOutcome {
    /// `(scenario file stem, exit code)` in file-name order.
    pub rows: Vec<(String, i32)>,
    pub exit: i32,
}

/// Runs every `*.toml` scenario in `dir`, one worker per scenario, writing
/// each scenario's artifacts under `<out>/<stem>/`.
pub fn run_batch(dir: &Path, overrides: &Overrides) -> Result<BatchOutcome, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            source: e,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    paths.sort();

    let base_out = overrides
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));
    let one = |path: &PathBuf| -> (String, i32) {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let per_scenario = Overrides {
            out: Some(base_out.join(&stem)),
            ..overrides.clone()
        };
        let exit = match ScenarioConfig::from_path(path)
            .and_then(|config| run_scenario(&config, &per_scenario))
        {
            Ok(outcome) => outcome.exit,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                2
            }
        };
        (stem, exit)
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<(String, i32)> = {
        use rayon::prelude::*;
        paths.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(String, i32)> = paths.iter().map(one).collect();

    let exit = rows.iter().map(|(_, e)| *e).max().unwrap_or(0).min(2);
    Ok(BatchOutcome { rows, exit })
}
