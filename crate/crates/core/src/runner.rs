//! Experiment orchestration behind the command-line front end: each command
//! builds its models, runs the relevant modules, writes one schema-versioned
//! JSON report (plus CSV trajectories where applicable), and yields an exit
//! code.
//!
//! Exit semantics: 0 when the observed outcome matches the documented
//! expectation (for the negative results this means the predicted failure was
//! observed), 2 for config errors, 3 for numeric failures, 4 when a report
//! criterion fails. `--strict-pass` inverts the negative-result convention:
//! the command then succeeds only if the positive property (test passed, no
//! logarithms, no loop shift) holds.

use crate::config::{Command, ConfigError, RunConfig};
use crate::dim4;
use crate::dynamics::{drift_report, integrate_with, IntegrateOptions, Trajectory};
use crate::frobenius::{
    perturbation_first_order, perturbation_setup, PerturbationCase, PerturbationReport,
};
use crate::lax;
use crate::liepoisson::{
    displayed_field_discrepancies, invariants_of, KirchhoffModel, ModelCase, ObservableKind,
    PhaseState,
};
use crate::monodromy;
use crate::painleve;
use crate::report::{cmatrix, cpair, cvec, report_envelope, to_canonical_json};
use crate::scalar::{c64, C64};
use nalgebra::DVector;
use serde_json::{json, Value};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunnerError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 2,
            RunnerError::Numeric(_) => 3,
            RunnerError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunnerError::Config(_) => "config",
            RunnerError::Numeric(_) => "numeric",
            RunnerError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunnerOptions {
    pub out_dir: PathBuf,
    pub strict_pass: bool,
}

impl Default for RunnerOptions {
    fn default() -> Self {
        RunnerOptions {
            out_dir: PathBuf::from("."),
            strict_pass: false,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report_path: PathBuf,
    pub report_json: String,
    pub exit_code: i32,
    /// All hard criteria in the report passed.
    pub criteria_pass: bool,
    /// Observed outcome matched the documented expectation.
    pub expected_matched: bool,
}

/// Hard-criteria accumulator rendered into the report.
#[derive(Default)]
struct Criteria {
    rows: Vec<Value>,
    all_pass: bool,
}

impl Criteria {
    fn new() -> Self {
        Criteria { rows: Vec::new(), all_pass: true }
    }

    fn check_le(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        let passed = value <= threshold;
        self.all_pass &= passed;
        self.rows.push(json!({
            "name": name,
            "value": value,
            "threshold": threshold,
            "passed": passed,
        }));
        passed
    }

    fn check_bool(&mut self, name: &str, passed: bool) -> bool {
        self.all_pass &= passed;
        self.rows.push(json!({"name": name, "passed": passed}));
        passed
    }

    fn to_value(&self) -> Value {
        Value::Array(self.rows.clone())
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> RunnerError {
    RunnerError::Numeric(e.to_string())
}

pub fn run(config: &RunConfig, opts: &RunnerOptions) -> Result<RunOutcome, RunnerError> {
    config.validate()?;
    let (body, criteria_pass, expected_matched, positive_pass) = match config.command {
        Command::Simulate => run_simulate(config, opts)?,
        Command::Painleve => run_painleve(config)?,
        Command::Perturb => run_perturb(config)?,
        Command::Monodromy => run_monodromy(config)?,
        Command::LaxCheck => run_lax_check(config, opts)?,
        Command::E4Check => run_e4_check(config)?,
        Command::All => run_all(config)?,
    };
    let envelope = report_envelope(config.command.label(), body);
    let text = to_canonical_json(&envelope);

    std::fs::create_dir_all(&opts.out_dir)?;
    let report_path = match &config.output.json {
        Some(p) => {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                opts.out_dir.join(p)
            }
        }
        None => opts.out_dir.join(format!("{}.json", config.command.label())),
    };
    std::fs::write(&report_path, &text)?;

    let ok = if opts.strict_pass { positive_pass } else { expected_matched && criteria_pass };
    Ok(RunOutcome {
        report_path,
        report_json: text,
        exit_code: if ok { 0 } else { 4 },
        criteria_pass,
        expected_matched,
    })
}

fn model_echo(config: &RunConfig) -> Value {
    match &config.model {
        Some(m) => serde_json::to_value(m).unwrap_or(Value::Null),
        None => Value::Null,
    }
}

fn write_csv(
    opts: &RunnerOptions,
    config: &RunConfig,
    name: &str,
    traj: &Trajectory,
    model: &KirchhoffModel,
) -> Result<PathBuf, RunnerError> {
    let dir = match &config.output.csv_dir {
        Some(d) => {
            let d = PathBuf::from(d);
            if d.is_absolute() {
                d
            } else {
                opts.out_dir.join(d)
            }
        }
        None => opts.out_dir.clone(),
    };
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(name);
    std::fs::write(&path, traj.to_csv(model.dim().coord_names()))?;
    Ok(path)
}

type CommandResult = (Value, bool, bool, bool);
type BTable = Vec<((usize, usize, usize), C64)>;

fn run_simulate(config: &RunConfig, opts: &RunnerOptions) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let sim = config.simulate.clone().unwrap_or_default();
    let x0 = sim.initial_state(model.dim())?;
    let path = sim.build_path()?;
    let tol = config.numeric.tol;
    let integ_opts = IntegrateOptions {
        precision: config.numeric.precision,
        max_sample_spacing: sim.sample_spacing,
    };
    let traj = integrate_with(&model, &x0, &path, tol, &integ_opts).map_err(numeric)?;
    let obs = invariants_of(&model);
    let drift = drift_report(&traj, &obs, tol);

    let mut criteria = Criteria::new();
    for (d, o) in drift.per_observable.iter().zip(obs.iter()) {
        if o.kind != ObservableKind::InvariantRelation {
            criteria.check_bool(&format!("conserved({})", d.name), d.conserved);
        }
    }
    let csv_path = write_csv(opts, config, "simulate_trajectory.csv", &traj, &model)?;
    let body = json!({
        "model": model_echo(config),
        "seed": config.numeric.seed,
        "tolerance": tol,
        "integration_stats": traj.stats,
        "drift": serde_json::to_value(&drift).unwrap(),
        "csv": csv_path.to_string_lossy(),
        "hard_criteria": criteria.to_value(),
    });
    let pass = criteria.all_pass;
    Ok((body, pass, pass, pass))
}

fn balance_value(model: &KirchhoffModel, b: &painleve::BalanceResult) -> Value {
    json!({
        "residue": cvec(&b.residue),
        "degenerate": b.degenerate,
        "residual": b.residual,
        "free_parameter_count": b.free_parameter_count,
        "kowalevski_exponents": Value::Array(b.jacobian_spectrum.iter().map(|&e| cpair(e)).collect()),
        "family_membership": painleve::family_membership(model, &b.residue)
            .map(|m| serde_json::to_value(&m).unwrap())
            .unwrap_or(Value::Null),
    })
}

fn run_painleve(config: &RunConfig) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let section = config.painleve.clone().unwrap_or_default();
    let seed = config.numeric.seed;
    let verdict = painleve::verdict(&model, section.n_starts, seed);

    let mut criteria = Criteria::new();
    let mut worst_residual = 0.0f64;
    for b in &verdict.balances {
        let scale = 1.0 + b.residue.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(2);
        worst_residual = worst_residual.max(b.residual / scale);
    }
    criteria.check_le("balance_residuals(scaled)", worst_residual, 1e-10);

    // <M0, p0> = (b3 - b1) p3^2 identity on the axially symmetric case
    let mut identity_max: Option<f64> = None;
    if let ModelCase::KirchhoffE3 { b1, b3, .. } = model.case() {
        let eps = *b3 - *b1;
        let mut worst = 0.0f64;
        for b in &verdict.balances {
            let mp: C64 = (0..3).map(|i| b.residue[i] * b.residue[3 + i]).sum();
            let rhs = eps * b.residue[5] * b.residue[5];
            worst = worst.max((mp - rhs).norm());
        }
        identity_max = Some(worst);
        criteria.check_le("pole_identity_mp_eq_eps_p3sq", worst, 1e-10);
    }

    // documented expectation for the axially symmetric family
    let expected_pass: Option<bool> = match model.case() {
        ModelCase::KirchhoffE3 { b1, b3, .. } => Some((*b3 - *b1).norm() == 0.0),
        _ => None,
    };
    let expected_matched = match expected_pass {
        Some(e) => verdict.passes_kp_test == e,
        None => true,
    };

    let body = json!({
        "model": model_echo(config),
        "seed": seed,
        "n_starts": section.n_starts,
        "balances": Value::Array(verdict.balances.iter().map(|b| balance_value(&model, b)).collect()),
        "verdict": {
            "passes_kp_test": verdict.passes_kp_test,
            "reason": serde_json::to_value(verdict.reason).unwrap(),
            "parameters_found": verdict.witness.parameters_found,
            "parameters_required": verdict.witness.parameters_required,
            "tested_balance": verdict.witness.tested_balance,
            "obstructed_order": verdict.witness.obstructed_order,
        },
        "series": verdict.series.as_ref().map(|s| json!({
            "order": s.order,
            "free_parameter_count": s.free_parameter_count,
            "family_dimension": s.family_dimension,
            "log_obstruction": s.log_obstruction,
            "resonances": serde_json::to_value(&s.resonances).unwrap(),
        })).unwrap_or(Value::Null),
        "pole_identity_max_violation": identity_max,
        "displayed_system_discrepancies": serde_json::to_value(
            displayed_field_discrepancies(&model, 200, seed)
        ).unwrap(),
        "expected_passes_kp_test": expected_pass,
        "hard_criteria": criteria.to_value(),
    });
    Ok((
        body,
        criteria.all_pass,
        expected_matched && criteria.all_pass,
        verdict.passes_kp_test,
    ))
}

fn predicted_ln_coefficient(model: &KirchhoffModel, which: PerturbationCase, alpha: C64) -> C64 {
    let (a1, c1, c3) = match model.case() {
        ModelCase::KirchhoffE3 { a1, c1, c3, .. } => (*a1, *c1, *c3),
        _ => unreachable!("perturbation requires the axially symmetric case"),
    };
    match which {
        PerturbationCase::Kirchhoff => -c64(0.0, 1.0) / (a1 * (c3 - c1)),
        PerturbationCase::Chaplygin => alpha / (a1 * (a1 * (c3 - c1)).sqrt()),
    }
}

fn perturbation_value(rep: &PerturbationReport) -> Value {
    json!({
        "case": serde_json::to_value(rep.case).unwrap(),
        "alpha": cpair(rep.alpha),
        "beta": cpair(rep.beta),
        "m3_1": cpair(rep.m3_1),
        "ln_present": rep.ln_present,
        "ln_coefficients": rep.ln_coefficients.iter()
            .map(|(k, v)| (format!("k{k}"), cpair(*v)))
            .collect::<serde_json::Map<String, Value>>(),
        "k_functions": rep.k_functions.iter().map(|k| k.to_json_value()).collect::<Vec<_>>(),
        "k4_t_coefficient": cpair(rep.k4_t_coefficient),
        "k3_k5_nonconstant_max": rep.k3_k5_nonconstant_max,
        "basis_condition": rep.basis_condition,
        "residual": rep.residual,
        "resonances": serde_json::to_value(&rep.resonances).unwrap(),
    })
}

fn run_perturb(config: &RunConfig) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let section = config.perturb.clone().unwrap_or_default();
    let (alpha, beta, m31) = (
        section.alpha.to_c64(),
        section.beta.to_c64(),
        section.m3_1.to_c64(),
    );
    let rep = perturbation_first_order(&model, section.which, alpha, beta, m31)
        .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?;

    let predicted = predicted_ln_coefficient(&model, section.which, alpha);
    let measured = rep
        .ln_coefficients
        .get(&4)
        .copied()
        .unwrap_or_else(|| c64(0.0, 0.0));

    let mut criteria = Criteria::new();
    criteria.check_le("k4_ln_coefficient_vs_closed_form", (measured - predicted).norm(), 1e-10);
    criteria.check_le("series_residual", rep.residual, 1e-12);
    criteria.check_le("k3_k5_constant", rep.k3_k5_nonconstant_max, 1e-12);
    criteria.check_bool("ln_present(non_meromorphic)", rep.ln_present);

    // the open-question sweep: k4 coefficients at three M3^1 samples (the ln
    // part must be independent of M3^1; the t part linear in it)
    let mut sweep = Vec::new();
    if section.which == PerturbationCase::Kirchhoff {
        for m in [c64(0.0, 0.0), c64(1.0, 0.0), c64(0.5, -0.5)] {
            let r = perturbation_first_order(&model, section.which, alpha, beta, m)
                .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?;
            sweep.push(json!({
                "m3_1": cpair(m),
                "k4_ln": cpair(r.ln_coefficients.get(&4).copied().unwrap_or_else(|| c64(0.0, 0.0))),
                "k4_t": cpair(r.k4_t_coefficient),
            }));
        }
    }

    let body = json!({
        "model": model_echo(config),
        "perturbation": perturbation_value(&rep),
        "predicted_ln_coefficient": cpair(predicted),
        "k4_coefficients_vs_m3_1": Value::Array(sweep),
        "notes": [
            "the displayed t-coefficient of k4 carries an extra factor 2 relative to the verified value",
        ],
        "hard_criteria": criteria.to_value(),
    });
    let expected = criteria.all_pass; // ln expected present with the closed-form value
    Ok((body, criteria.all_pass, expected, !rep.ln_present))
}

fn run_monodromy(config: &RunConfig) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let section = config.monodromy.clone().unwrap_or_default();
    let which = section.which.unwrap_or(PerturbationCase::Kirchhoff);
    let (alpha, beta, m31) = (
        section.alpha.to_c64(),
        section.beta.to_c64(),
        section.m3_1.to_c64(),
    );
    let setup = perturbation_setup(&model, which, alpha, beta, m31)
        .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?;
    let rep = perturbation_first_order(&model, which, alpha, beta, m31)
        .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?;
    let tol = config.numeric.tol.min(1e-11);
    let affine = monodromy::affine_monodromy(&setup.frobenius_system(), section.radius, tol)
        .map_err(numeric)?;

    // k4-direction magnitude of the loop shift vs 2 pi |ln coefficient|
    let lu = setup.basis.clone().lu();
    let y = lu.solve(&affine.particular_shift).expect("basis invertible");
    let measured_mag = y[3].norm() * section.radius;
    let lncoef = rep
        .ln_coefficients
        .get(&4)
        .copied()
        .unwrap_or_else(|| c64(0.0, 0.0));
    let expected_mag = std::f64::consts::TAU * lncoef.norm();
    let rel_dev = if expected_mag > 0.0 {
        (measured_mag - expected_mag).abs() / expected_mag
    } else {
        measured_mag
    };

    let oracle = monodromy::monodromy_oracle(&setup.a5);
    let oracle_dev = (&affine.homogeneous.matrix - &oracle)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let id_dev = {
        let id = nalgebra::DMatrix::<C64>::identity(5, 5);
        (&affine.homogeneous.matrix - &id)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };

    let mut criteria = Criteria::new();
    criteria.check_bool("shift_in_log_direction", affine.shift_in_log_direction);
    criteria.check_le("loop_shift_magnitude_vs_ln_coefficient(rel)", rel_dev, 1e-5);
    criteria.check_le("homogeneous_monodromy_is_identity", id_dev, 1e-7);
    criteria.check_le("loop_vs_matrix_exponential_oracle", oracle_dev, 1e-6);
    criteria.check_bool("no_unipotent_part_in_homogeneous", !affine.homogeneous.log_detected);

    let body = json!({
        "model": model_echo(config),
        "which": serde_json::to_value(which).unwrap(),
        "radius": section.radius,
        "homogeneous": {
            "matrix": cmatrix(&affine.homogeneous.matrix),
            "eigenvalues": Value::Array(affine.homogeneous.eigenvalues.iter().map(|&e| cpair(e)).collect()),
            "semisimple": affine.homogeneous.semisimple,
            "unipotent_defect": affine.homogeneous.unipotent_defect,
            "log_detected": affine.homogeneous.log_detected,
        },
        "particular_shift": cvec(&affine.particular_shift),
        "predicted_shift": cvec(&affine.predicted_shift),
        "shift_in_log_direction": affine.shift_in_log_direction,
        "ln_coefficient": cpair(lncoef),
        "measured_k4_shift_magnitude": measured_mag,
        "expected_k4_shift_magnitude": expected_mag,
        "hard_criteria": criteria.to_value(),
    });
    let shift_present = affine.particular_shift.norm() > 1e-8;
    Ok((body, criteria.all_pass, criteria.all_pass, !shift_present))
}

fn default_manifold_state() -> PhaseState {
    PhaseState::e3(
        [c64(0.4, 0.1), c64(-0.3, 0.2), c64(0.0, 0.0)],
        [c64(0.5, -0.2), c64(0.1, 0.3), c64(-0.6, 0.1)],
    )
}

fn run_lax_check(config: &RunConfig, opts: &RunnerOptions) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let section = config.lax.clone().unwrap_or_default();
    let tol = config.numeric.tol.min(1e-11);
    let x0 = if section.x0.is_empty() {
        default_manifold_state()
    } else {
        let v = DVector::from_iterator(6, section.x0.iter().map(|c| c.to_c64()));
        PhaseState::from_vector(model.dim(), v)
            .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?
    };
    let lambdas: Vec<C64> = section.lambdas.iter().map(|c| c.to_c64()).collect();

    let defect = lax::lax_normalization_defect(&model)
        .map_err(|e| RunnerError::Config(ConfigError::Validation(e.to_string())))?;
    let path = crate::dynamics::TimePath::real_interval(0.0, section.t_final).map_err(numeric)?;
    let traj = integrate_with(
        &model,
        &x0,
        &path,
        tol,
        &IntegrateOptions {
            precision: config.numeric.precision,
            ..Default::default()
        },
    )
    .map_err(numeric)?;
    let residual = lax::lax_residual(&model, &traj, &lambdas).map_err(numeric)?;
    let poly = lax::spectral_poly(&model, &x0).map_err(numeric)?;
    let curve = lax::curve_match(&model, &x0).map_err(numeric)?;
    let flow_drift = lax::spectral_flow_drift(&model, &traj).map_err(numeric)?;
    let iso_drift = lax::isospectrality_drift(&model, &traj, &lambdas).map_err(numeric)?;
    let csv_path = write_csv(opts, config, "lax_trajectory.csv", &traj, &model)?;

    let normalized = defect.norm() <= 1e-12;
    let mut criteria = Criteria::new();
    criteria.check_le("sigma_invariance(odd_lambda_coefficients)", poly.max_odd_lambda(), 1e-10 * poly.max_abs().max(1.0));
    let f3_dev = (poly.coeff(2, 0) - curve.f3).norm();
    criteria.check_le("mu2_lambda0_equals_pp", f3_dev, 1e-10);
    criteria.check_le("spectral_coefficients_flow_drift", flow_drift, 1e-8);
    criteria.check_le("eigenvalue_drift(isospectrality)", iso_drift, 1e-8);
    if normalized {
        criteria.check_le("lax_identity_residual", residual, 1e-9);
    }
    // expected: with the printed blocks the commutator identity requires
    // c3 - c1 = a3 - a1; off normalization the residual is order |defect|
    let expected_matched = if normalized {
        residual <= 1e-9
    } else {
        residual > 1e-6
    } && criteria.all_pass;

    let body = json!({
        "model": model_echo(config),
        "x0": cvec(x0.coords()),
        "lambdas": Value::Array(lambdas.iter().map(|&l| cpair(l)).collect()),
        "normalization_defect": cpair(defect),
        "normalized": normalized,
        "lax_residual": residual,
        "spectral_poly": poly.to_json_value(),
        "curve_match": {
            "terms": serde_json::to_value(&curve.terms).unwrap(),
            "max_rel_deviation": curve.max_rel_deviation,
            "unlisted_coeff_max": curve.unlisted_coeff_max,
            "matches_with_a1_rescaling": curve.matches_with_a1_rescaling,
            "f1": cpair(curve.f1),
            "f2": cpair(curve.f2),
            "f3": cpair(curve.f3),
            "notes": curve.notes,
        },
        "spectral_flow_drift": flow_drift,
        "isospectrality_drift": iso_drift,
        "csv": csv_path.to_string_lossy(),
        "hard_criteria": criteria.to_value(),
    });
    let positive = criteria.all_pass && normalized && residual <= 1e-9;
    Ok((body, criteria.all_pass, expected_matched, positive))
}

fn run_e4_check(config: &RunConfig) -> Result<CommandResult, RunnerError> {
    let model = config.model()?;
    let section = config.e4.clone().unwrap_or_default();
    let seed = config.numeric.seed;
    let tol = config.numeric.tol;
    let mut criteria = Criteria::new();
    let mut body = serde_json::Map::new();
    body.insert("model".into(), model_echo(config));
    body.insert("seed".into(), json!(seed));

    match model.case() {
        ModelCase::KirchhoffE4 { .. } => {
            let inv = dim4::involution_matrix(&model, section.n_points, seed).map_err(numeric)?;
            criteria.check_le("pairwise_brackets_max", inv.max_offdiagonal, 1e-10);
            let binding = dim4::validate_f5_binding(&model, section.n_points.min(300), seed, 1e-10)
                .map_err(numeric)?;
            criteria.check_bool("f5_binding_validated", binding.default_passes);

            // unit-time drift of all six integrals
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let x0 = PhaseState::from_vector(
                model.dim(),
                DVector::from_fn(10, |_, _| {
                    c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }),
            )
            .unwrap();
            let path = crate::dynamics::TimePath::real_interval(0.0, 1.0).map_err(numeric)?;
            let traj = integrate_with(&model, &x0, &path, tol, &IntegrateOptions::default())
                .map_err(numeric)?;
            let obs = dim4::integral_set(&model).map_err(numeric)?;
            let drift = drift_report(&traj, &obs, tol);
            let mut worst = 0.0f64;
            for d in &drift.per_observable {
                worst = worst.max(d.max_rel_drift);
            }
            criteria.check_le("integral_drift_along_flow(rel)", worst, 1e-8);

            // mixed-term witnesses
            let witness_list: Vec<BTable> = if section.witness_b.is_empty() {
                vec![
                    vec![((1, 2, 1), c64(1.0, 0.0))],
                    vec![((1, 2, 3), c64(1.0, 0.0))],
                    vec![((3, 4, 1), c64(1.0, 0.0))],
                    vec![((3, 4, 3), c64(1.0, 0.0))],
                ]
            } else {
                vec![section
                    .witness_b
                    .iter()
                    .map(|e| ((e.i, e.j, e.k), e.value.to_c64()))
                    .collect()]
            };
            let mut witnesses = Vec::new();
            for b in &witness_list {
                let w = dim4::proposition1_witness(b, seed).map_err(numeric)?;
                criteria.check_le(
                    &format!("witness_rate_b{:?}", b[0].0),
                    1e-6,
                    w.rate.norm(),
                );
                witnesses.push(json!({
                    "b": b.iter().map(|((i, j, k), v)| json!({"i": i, "j": j, "k": k, "value": cpair(*v)})).collect::<Vec<_>>(),
                    "observable": w.observable,
                    "rate": cpair(w.rate),
                    "state": cvec(&w.state),
                }));
            }

            body.insert("involution".into(), serde_json::to_value(&inv).unwrap());
            body.insert("binding".into(), serde_json::to_value(&binding).unwrap());
            body.insert("drift".into(), serde_json::to_value(&drift).unwrap());
            body.insert("witnesses".into(), Value::Array(witnesses));
        }
        ModelCase::ChaplyginE4(_) => {
            let rep = dim4::chaplygin4_invariant_check(&model, tol, seed, section.n_trajectories)
                .map_err(numeric)?;
            criteria.check_le("m12_drift", rep.max_drift_m12, 100.0 * tol);
            criteria.check_le("m34_drift", rep.max_drift_m34, 100.0 * tol);
            criteria.check_le("pointwise_brackets_on_submanifold", rep.pointwise_bracket_max, 1e-10);
            criteria.check_le(
                "off_manifold_bracket_nonzero",
                1e-6,
                rep.off_manifold_bracket_max,
            );
            body.insert("invariant_relations".into(), serde_json::to_value(&rep).unwrap());
        }
        other => {
            return Err(RunnerError::Config(ConfigError::Validation(format!(
                "e4-check requires an e(4) model, got {}",
                other.label()
            ))))
        }
    }
    body.insert("hard_criteria".into(), criteria.to_value());
    let pass = criteria.all_pass;
    Ok((Value::Object(body), pass, pass, pass))
}

/// The canonical end-to-end battery: every checkable claim with its canonical
/// parameters. Ignores the [model] section.
fn run_all(config: &RunConfig) -> Result<CommandResult, RunnerError> {
    let seed = config.numeric.seed;
    let mut claims = Vec::new();
    let mut all_ok = true;

    let mut claim = |name: &str, observed: bool, detail: Value, all_ok: &mut bool| {
        *all_ok &= observed;
        claims.push(json!({"claim": name, "verified": observed, "detail": detail}));
    };

    // Lemma 1: the axially symmetric case fails the test iff b3 != b1
    let model_perturbed = KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.1, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
    )
    .unwrap();
    let v = painleve::verdict(&model_perturbed, 500, seed);
    claim(
        "kp_test_fails_for_nonzero_B",
        !v.passes_kp_test && v.reason == painleve::VerdictReason::NoPoleBalance,
        json!({"reason": serde_json::to_value(v.reason).unwrap()}),
        &mut all_ok,
    );

    let model_b0 = KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(3.0, 0.0),
    )
    .unwrap();
    let v0 = painleve::verdict(&model_b0, 500, seed);
    claim(
        "kp_test_passes_for_zero_B",
        v0.passes_kp_test && v0.witness.parameters_found == 5,
        json!({"parameters_found": v0.witness.parameters_found}),
        &mut all_ok,
    );

    // first-order ln coefficients
    let alpha = c64(0.6, 0.0);
    let beta = c64(0.8, 0.0);
    let rep_k = perturbation_first_order(&model_b0, PerturbationCase::Kirchhoff, alpha, beta, c64(0.0, 0.0))
        .map_err(numeric)?;
    let ln_k = rep_k.ln_coefficients.get(&4).copied().unwrap_or_else(|| c64(0.0, 0.0));
    claim(
        "kirchhoff_ln_coefficient",
        (ln_k - c64(0.0, -0.5)).norm() <= 1e-10 && rep_k.k3_k5_nonconstant_max <= 1e-12,
        json!({"ln_k4": cpair(ln_k)}),
        &mut all_ok,
    );
    let rep_c = perturbation_first_order(&model_b0, PerturbationCase::Chaplygin, alpha, beta, c64(0.0, 0.0))
        .map_err(numeric)?;
    let ln_c = rep_c.ln_coefficients.get(&4).copied().unwrap_or_else(|| c64(0.0, 0.0));
    claim(
        "chaplygin_ln_coefficient",
        (ln_c - c64(0.6 / 2f64.sqrt(), 0.0)).norm() <= 1e-10,
        json!({"ln_k4": cpair(ln_c)}),
        &mut all_ok,
    );

    // monodromy cross-check of the Kirchhoff perturbation
    let setup = perturbation_setup(&model_b0, PerturbationCase::Kirchhoff, alpha, beta, c64(0.0, 0.0))
        .map_err(numeric)?;
    let affine = monodromy::affine_monodromy(&setup.frobenius_system(), 1.0, 1e-12).map_err(numeric)?;
    let lu = setup.basis.clone().lu();
    let y = lu.solve(&affine.particular_shift).unwrap();
    let mag_ok = (y[3].norm() - std::f64::consts::TAU * 0.5).abs() / (std::f64::consts::TAU * 0.5) <= 1e-5;
    let id_dev = {
        let id = nalgebra::DMatrix::<C64>::identity(5, 5);
        (&affine.homogeneous.matrix - &id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    claim(
        "monodromy_cross_check",
        affine.shift_in_log_direction && mag_ok && id_dev <= 1e-7,
        json!({"identity_deviation": id_dev}),
        &mut all_ok,
    );

    // Lax pair on the normalized model, curve on the generic one
    let chaplygin_norm = KirchhoffModel::chaplygin_e3(
        c64(1.0, 0.0), c64(2.0, 0.0), c64(0.3, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0),
    )
    .unwrap();
    let x0 = default_manifold_state();
    let path = crate::dynamics::TimePath::real_interval(0.0, 1.0).map_err(numeric)?;
    let traj = integrate_with(&chaplygin_norm, &x0, &path, 1e-11, &IntegrateOptions::default())
        .map_err(numeric)?;
    let lambdas = [c64(0.7, 0.0), c64(1.0, 1.0), c64(-2.0, 0.0)];
    let residual = lax::lax_residual(&chaplygin_norm, &traj, &lambdas).map_err(numeric)?;
    let flow_drift = lax::spectral_flow_drift(&chaplygin_norm, &traj).map_err(numeric)?;
    let poly = lax::spectral_poly(&chaplygin_norm, &x0).map_err(numeric)?;
    claim(
        "lax_identity_normalized",
        residual <= 1e-9 && flow_drift <= 1e-8 && poly.max_odd_lambda() <= 1e-10 * poly.max_abs(),
        json!({"residual": residual, "flow_drift": flow_drift}),
        &mut all_ok,
    );
    let curve = lax::curve_match(&chaplygin_norm, &x0).map_err(numeric)?;
    claim(
        "spectral_curve_matches_printed_terms",
        curve.max_rel_deviation <= 1e-10 && curve.unlisted_coeff_max <= 1e-10,
        json!({"max_rel_deviation": curve.max_rel_deviation}),
        &mut all_ok,
    );

    // e(4) integrability and obstruction
    let model4 = KirchhoffModel::kirchhoff_e4(
        c64(1.0, 0.0), c64(1.5, 0.0), c64(2.0, 0.0), c64(0.5, 0.0), c64(1.0, 0.0), c64(2.0, 0.0), &[],
    )
    .unwrap();
    let inv = dim4::involution_matrix(&model4, 1000, seed).map_err(numeric)?;
    claim(
        "e4_liouville_integrability",
        inv.max_offdiagonal <= 1e-10,
        json!({"max_bracket": inv.max_offdiagonal}),
        &mut all_ok,
    );
    let mut witnesses_ok = true;
    for b in [(1, 2, 1), (1, 2, 3), (3, 4, 1), (3, 4, 3)] {
        let w = dim4::proposition1_witness(&[(b, c64(1.0, 0.0))], seed).map_err(numeric)?;
        witnesses_ok &= w.rate.norm() >= 1e-6;
    }
    claim("e4_mixed_term_obstruction", witnesses_ok, json!({}), &mut all_ok);

    let chaplygin4 = KirchhoffModel::chaplygin_e4(crate::liepoisson::ChaplyginE4Coeffs {
        a1212: c64(1.0, 0.0),
        a1313: c64(1.5, 0.0),
        a3434: c64(2.0, 0.0),
        a1234: c64(0.5, 0.0),
        a1213: c64(0.3, 0.0),
        a1214: c64(-0.2, 0.0),
        a1223: c64(0.15, 0.0),
        a1224: c64(0.4, 0.0),
        a1334: c64(-0.25, 0.0),
        a1434: c64(0.35, 0.0),
        a2334: c64(0.1, 0.0),
        a2434: c64(-0.3, 0.0),
        b121: c64(0.2, 0.0),
        b122: c64(-0.4, 0.0),
        b123: c64(0.1, 0.0),
        b124: c64(0.3, 0.0),
        b341: c64(-0.15, 0.0),
        b342: c64(0.25, 0.0),
        b343: c64(0.05, 0.0),
        b344: c64(-0.2, 0.0),
        c11: c64(1.0, 0.0),
        c33: c64(2.0, 0.0),
    })
    .unwrap();
    let rep4 = dim4::chaplygin4_invariant_check(&chaplygin4, 1e-10, seed, 10).map_err(numeric)?;
    claim(
        "e4_chaplygin_invariant_relations",
        rep4.max_drift_m12 <= 1e-8 && rep4.max_drift_m34 <= 1e-8 && rep4.pointwise_bracket_max <= 1e-10,
        json!({"m12_drift": rep4.max_drift_m12, "m34_drift": rep4.max_drift_m34}),
        &mut all_ok,
    );

    let body = json!({
        "seed": seed,
        "claims": Value::Array(claims),
        "all_verified": all_ok,
        "note": "the all command runs the canonical battery; the [model] section is not used",
    });
    Ok((body, all_ok, all_ok, all_ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn tmpdir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("kirchhoff-runner-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn painleve_command_and_determinism() {
        let cfg = parse_config(
            r#"
command = "painleve"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
b3 = 0.1
c1 = 1.0
c3 = 3.0

[painleve]
n_starts = 120
"#,
        )
        .unwrap();
        let opts = RunnerOptions {
            out_dir: tmpdir("painleve"),
            strict_pass: false,
        };
        let out1 = run(&cfg, &opts).unwrap();
        // the predicted failure was observed: exit 0
        assert_eq!(out1.exit_code, 0);
        assert!(out1.report_json.contains("no_pole_balance"));
        let out2 = run(&cfg, &opts).unwrap();
        assert_eq!(out1.report_json, out2.report_json, "reports must be byte-identical");

        // strict mode inverts: the test did not pass
        let strict = RunnerOptions {
            out_dir: tmpdir("painleve-strict"),
            strict_pass: true,
        };
        let out3 = run(&cfg, &strict).unwrap();
        assert_eq!(out3.exit_code, 4);
    }

    #[test]
    fn perturb_command_reports_ln() {
        let cfg = parse_config(
            r#"
command = "perturb"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
c1 = 1.0
c3 = 3.0

[perturb]
which = "kirchhoff"
"#,
        )
        .unwrap();
        let opts = RunnerOptions {
            out_dir: tmpdir("perturb"),
            strict_pass: false,
        };
        let out = run(&cfg, &opts).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(out.report_json.contains("ln_coefficients"));
        let v: serde_json::Value = serde_json::from_str(&out.report_json).unwrap();
        assert_eq!(v["schema_version"], 1);
    }

    #[test]
    fn simulate_writes_csv_and_conserves() {
        let cfg = parse_config(
            r#"
command = "simulate"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
c1 = 1.0
c3 = 3.0

[simulate]
x0 = [0.3, -0.2, 0.5, 0.7, -0.1, 0.4]
"#,
        )
        .unwrap();
        let dir = tmpdir("simulate");
        let opts = RunnerOptions {
            out_dir: dir.clone(),
            strict_pass: false,
        };
        let out = run(&cfg, &opts).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(dir.join("simulate_trajectory.csv").exists());
    }

    #[test]
    fn step_collapse_maps_to_numeric_failure() {
        // the pole solution runs into t = 0
        let cfg = parse_config(
            r#"
command = "simulate"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
c1 = 1.0
c3 = 3.0

[simulate]
x0 = [[0.0, 1.0], 0.0, 0.0, 0.0, [0.0, -0.7071067811865476], 0.7071067811865476]

[[simulate.path]]
kind = "line"
from = 1.0
to = -1.0
"#,
        )
        .unwrap();
        let opts = RunnerOptions {
            out_dir: tmpdir("collapse"),
            strict_pass: false,
        };
        let err = run(&cfg, &opts).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
