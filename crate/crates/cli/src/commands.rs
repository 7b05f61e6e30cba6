use std::fmt::Write as _;
use std::path::Path;

use qherm_core::hermitization::{quasi_hermiticity_defect, QUASI_HERMITICITY_GATE};
use qherm_core::hybrid::{RECOMPOSITION_TOLERANCE, REDUCED_QH_TOLERANCE};
use qherm_core::matrix::{HERMITICITY_TOLERANCE, POSITIVITY_FLOOR};
use qherm_core::metric::SPECTRUM_REALITY_TOLERANCE;
use qherm_core::two_level::{self, ExampleParams};
use qherm_core::{
    eigendecompose, eigendecompose_hermitian, evolve, left_eigenbasis, metric_from_weights,
    optimize_split, quasi_hermiticity_residual, split_cost, split_power, split_triangular,
    DenseMatrix, DysonMap, Error, HybridSplit, MetricCertificate, MetricFamily, SplitCost,
};

use crate::matrix_file::{read_matrix, read_state, write_matrix, write_text, Role};
use crate::report::{Record, Report};
use crate::{CliError, Command, Strategy};

/// Tolerance for residuals of pairs that are exact up to rounding.
const EXACT_PAIR_TOLERANCE: f64 = 1e-10;
/// Closed forms of the two-level model against generic numerics.
const CLOSED_FORM_TOLERANCE: f64 = 1e-10;
const EXAMPLE_QH_TOLERANCE: f64 = 1e-11;
const NORM_DRIFT_TOLERANCE: f64 = 1e-8;

pub(crate) struct Outcome {
    pub report: Report,
    /// CSV destined for stdout; the report then goes to stderr.
    pub csv_stdout: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            csv_stdout: None,
        }
    }
}

pub(crate) fn dispatch(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Verify {
            hamiltonian,
            metric,
        } => verify(&hamiltonian, &metric).map(Into::into),
        Command::Metric {
            hamiltonian,
            weights,
            out,
        } => metric(&hamiltonian, weights, &out).map(Into::into),
        Command::Split {
            hamiltonian,
            metric,
            dyson,
            strategy,
            mu,
            wh,
            wm,
            out,
        } => split(
            &hamiltonian,
            &metric,
            dyson.as_deref(),
            strategy,
            mu,
            (wh, wm),
            &out,
        )
        .map(Into::into),
        Command::OptimizeSplit {
            hamiltonian,
            metric,
            wh,
            wm,
            out,
        } => optimize(&hamiltonian, &metric, wh, wm, out.as_deref()),
        Command::Evolve {
            hamiltonian,
            metric,
            state,
            t_max,
            dt,
            out,
        } => evolve_cmd(&hamiltonian, &metric, &state, t_max, dt, out.as_deref()),
        Command::Example { s, t, out } => example(s, t, &out).map(Into::into),
    }
}

fn same_dim(a: &DenseMatrix, b: &DenseMatrix, what: &str) -> Result<(), CliError> {
    if a.dim() != b.dim() {
        return Err(CliError::Usage(format!(
            "{what} has dimension {}, Hamiltonian has {}",
            b.dim(),
            a.dim()
        )));
    }
    Ok(())
}

fn read_pair(hamiltonian: &Path, metric: &Path) -> Result<(DenseMatrix, DenseMatrix), CliError> {
    let h = read_matrix(hamiltonian)?;
    let theta = read_matrix(metric)?;
    same_dim(&h, &theta, "metric")?;
    Ok((h, theta))
}

fn positivity(theta: &DenseMatrix) -> Record {
    let lambda_min = eigendecompose_hermitian(&theta.hermitian_part())
        .map(|e| e.real_values()[0])
        .unwrap_or(f64::NAN);
    Record::check(
        "theta_positivity",
        -lambda_min,
        -POSITIVITY_FLOOR * theta.frobenius_norm(),
    )
}

fn verify(hamiltonian: &Path, metric: &Path) -> Result<Report, CliError> {
    let (h, theta) = read_pair(hamiltonian, metric)?;
    let mut report = Report::default();
    report.push(Record::check(
        "theta_hermiticity",
        theta.hermiticity_defect(),
        HERMITICITY_TOLERANCE,
    ));
    report.push(positivity(&theta));
    report.push(Record::check(
        "quasi_hermiticity",
        quasi_hermiticity_defect(&h, &theta)?,
        EXACT_PAIR_TOLERANCE,
    ));
    let norm = h.frobenius_norm();
    let reality = match eigendecompose(&h) {
        Ok(e) if norm > 0.0 => e.max_imaginary() / norm,
        Ok(_) => 0.0,
        Err(_) => f64::INFINITY,
    };
    report.push(Record::check(
        "spectral_reality",
        reality,
        SPECTRUM_REALITY_TOLERANCE,
    ));
    Ok(report)
}

fn metric(hamiltonian: &Path, weights: Option<Vec<f64>>, out: &Path) -> Result<Report, CliError> {
    let h = read_matrix(hamiltonian)?;
    let basis = left_eigenbasis(&h)?;
    let family = match weights {
        Some(w) => MetricFamily::new(basis, w)?,
        None => MetricFamily::unit(basis),
    };
    let metric = metric_from_weights(&family)?;
    write_matrix(out, metric.theta(), Some(Role::Metric))?;

    let mut report = Report::default();
    report.push(Record::check(
        "quasi_hermiticity",
        quasi_hermiticity_residual(&h, &metric)?,
        EXACT_PAIR_TOLERANCE,
    ));
    report.push(Record::info("min_eigenvalue", metric.min_eigenvalue()));
    report.push(positivity(metric.theta()));
    Ok(report)
}

fn require_quasi_hermitian(h: &DenseMatrix, metric: &MetricCertificate) -> Result<(), CliError> {
    let residual = quasi_hermiticity_residual(h, metric)?;
    if !(residual < QUASI_HERMITICITY_GATE) {
        return Err(Error::NotQuasiHermitian { residual }.into());
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn push_cost(report: &mut Report, cost: &SplitCost) {
    report.push(Record::info("cost_non_hermiticity", cost.non_hermiticity));
    report.push(Record::info("cost_metric_condition", cost.metric_condition));
    report.push(Record::info("cost_total", cost.total));
}

fn write_split(dir: &Path, split: &HybridSplit) -> Result<(), CliError> {
    create_dir(dir)?;
    write_matrix(
        &dir.join("omega_m.json"),
        split.omega_m().omega(),
        Some(Role::Dyson),
    )?;
    write_matrix(
        &dir.join("omega_h.json"),
        split.omega_h().omega(),
        Some(Role::Dyson),
    )?;
    write_matrix(&dir.join("h_h.json"), split.h_h(), Some(Role::Hamiltonian))?;
    write_matrix(
        &dir.join("theta_m.json"),
        split.theta_m().theta(),
        Some(Role::Metric),
    )
}

fn split(
    hamiltonian: &Path,
    metric: &Path,
    dyson: Option<&Path>,
    strategy: Strategy,
    mu: Option<f64>,
    (w_h, w_m): (f64, f64),
    out: &Path,
) -> Result<Report, CliError> {
    let (h, theta) = read_pair(hamiltonian, metric)?;
    let metric = MetricCertificate::new(theta)?;
    let mut report = Report::default();
    let split = match strategy {
        Strategy::Triangular => {
            if mu.is_some() {
                return Err(CliError::Usage(
                    "--mu only applies to the power strategy".into(),
                ));
            }
            require_quasi_hermitian(&h, &metric)?;
            let map = match dyson {
                Some(path) => {
                    let omega = read_matrix(path)?;
                    same_dim(&h, &omega, "Dyson map")?;
                    let map = DysonMap::new(omega)?;
                    let induced = &map.omega().adjoint() * map.omega();
                    report.push(Record::check(
                        "dyson_metric_consistency",
                        induced.relative_distance(metric.theta()),
                        EXACT_PAIR_TOLERANCE,
                    ));
                    map
                }
                // Θ = L L^†, so Ω = L^† is a Dyson map for Θ.
                None => DysonMap::new(metric.cholesky_factor().adjoint())?,
            };
            split_triangular(&h, &map)?
        }
        Strategy::Power => {
            let mu = mu
                .ok_or_else(|| CliError::Usage("--mu is required for the power strategy".into()))?;
            report.push(Record::info("mu", mu));
            split_power(&h, &metric, mu)?
        }
    };
    report.push(Record::check(
        "recomposition_residual",
        split.recomposition_residual(),
        RECOMPOSITION_TOLERANCE,
    ));
    report.push(Record::check(
        "reduced_qh_residual",
        split.reduced_qh_residual(),
        REDUCED_QH_TOLERANCE,
    ));
    push_cost(&mut report, &split_cost(&split, w_h, w_m)?);

    write_split(out, &split)?;
    write_text(&out.join("report.tsv"), &report.to_string())?;
    Ok(report)
}

fn csv_number(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").unwrap();
}

fn emit_csv(csv: String, out: Option<&Path>, report: Report) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write_text(path, &csv)?;
            Ok(report.into())
        }
        None => Ok(Outcome {
            report,
            csv_stdout: Some(csv),
        }),
    }
}

fn optimize(
    hamiltonian: &Path,
    metric: &Path,
    w_h: f64,
    w_m: f64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (h, theta) = read_pair(hamiltonian, metric)?;
    let metric = MetricCertificate::new(theta)?;
    let opt = optimize_split(&h, &metric, w_h, w_m)?;

    let mut csv = String::from("mu,non_hermiticity,metric_condition,total\n");
    for c in &opt.grid {
        for (i, x) in [
            c.mu.unwrap_or(f64::NAN),
            c.non_hermiticity,
            c.metric_condition,
            c.total,
        ]
        .into_iter()
        .enumerate()
        {
            if i > 0 {
                csv.push(',');
            }
            csv_number(&mut csv, x);
        }
        csv.push('\n');
    }

    let mut report = Report::default();
    report.push(Record::info("mu_star", opt.mu_star));
    report.push(Record::info("optimum_total", opt.cost.total));
    report.push(Record::info("ot_endpoint_total", opt.ot_endpoint().total));
    report.push(Record::info("ma_endpoint_total", opt.ma_endpoint().total));
    report.push(Record::info("grid_points", opt.grid.len() as f64));
    report.push(Record::info("refined_mu", opt.refined_mu));
    report.push(Record::info("refined_total", opt.refined_total));
    report.push(Record::info(
        "refine_evaluations",
        opt.refine_evaluations as f64,
    ));
    let best_endpoint = opt.ot_endpoint().total.min(opt.ma_endpoint().total);
    report.push(Record::check(
        "optimum_minus_best_endpoint",
        opt.cost.total - best_endpoint,
        0.0,
    ));
    emit_csv(csv, out, report)
}

fn evolve_cmd(
    hamiltonian: &Path,
    metric: &Path,
    state: &Path,
    t_max: f64,
    dt: f64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (h, theta) = read_pair(hamiltonian, metric)?;
    let psi0 = read_state(state)?;
    if psi0.dim() != h.dim() {
        return Err(CliError::Usage(format!(
            "state has dimension {}, Hamiltonian has {}",
            psi0.dim(),
            h.dim()
        )));
    }
    if !(dt > 0.0 && dt.is_finite() && t_max.is_finite() && t_max >= dt) {
        return Err(Error::InvalidTimeGrid { t_max, dt }.into());
    }
    let metric = MetricCertificate::new(theta)?;
    let trace = evolve(&h, &metric, &psi0, t_max, dt)?;

    let mut csv = String::from("time,aux_norm,theta_norm");
    for k in 0..h.dim() {
        write!(csv, ",psi{k}_re,psi{k}_im").unwrap();
    }
    csv.push('\n');
    for i in 0..trace.len() {
        csv_number(&mut csv, trace.times[i]);
        for x in [trace.aux_norms[i], trace.theta_norms[i]] {
            csv.push(',');
            csv_number(&mut csv, x);
        }
        for z in trace.states[i].amplitudes() {
            for x in [z.re, z.im] {
                csv.push(',');
                csv_number(&mut csv, x);
            }
        }
        csv.push('\n');
    }

    let mut report = Report::default();
    report.push(Record::check(
        "theta_norm_drift",
        trace.theta_norm_drift(),
        NORM_DRIFT_TOLERANCE,
    ));
    report.push(Record::info("aux_norm_range", trace.aux_norm_range()));
    emit_csv(csv, out, report)
}

fn example(s: f64, t: f64, out: &Path) -> Result<Report, CliError> {
    if !(s.is_finite() && t.is_finite()) {
        return Err(CliError::Usage("--s and --t must be finite".into()));
    }
    let p = ExampleParams::new(s, t);
    let (omega_m, omega_h, omega) = two_level::dyson_factors(p);
    let h = two_level::hamiltonian(p);
    let theta = two_level::metric_matrix(p);
    let split = two_level::hybrid(p)?;

    create_dir(out)?;
    let files: [(&str, &DenseMatrix, Option<Role>); 9] = [
        (
            "h.json",
            &two_level::textbook_hamiltonian(),
            Some(Role::Hamiltonian),
        ),
        ("omega_m.json", omega_m.omega(), Some(Role::Dyson)),
        ("omega_h.json", omega_h.omega(), Some(Role::Dyson)),
        ("omega.json", omega.omega(), Some(Role::Dyson)),
        ("hamiltonian.json", &h, Some(Role::Hamiltonian)),
        ("theta.json", &theta, Some(Role::Metric)),
        ("y.json", &two_level::y_matrix(p), None),
        ("h_h.json", split.h_h(), Some(Role::Hamiltonian)),
        ("theta_m.json", split.theta_m().theta(), Some(Role::Metric)),
    ];
    for (name, m, role) in files {
        write_matrix(&out.join(name), m, role)?;
    }

    let mut report = Report::default();
    let sp = two_level::metric_spectrum(p);
    report.push(Record::info("theta_plus", sp.theta_plus));
    report.push(Record::info("theta_minus", sp.theta_minus));
    report.push(Record::info("discriminant", sp.discriminant));

    let numeric = eigendecompose_hermitian(&theta.hermitian_part())?.real_values();
    let spectrum_error = (numeric[0] - sp.theta_minus)
        .abs()
        .max((numeric[1] - sp.theta_plus).abs())
        / sp.theta_plus;
    report.push(Record::check(
        "theta_spectrum_error",
        spectrum_error,
        CLOSED_FORM_TOLERANCE,
    ));

    let factored = two_level::discriminant_factored(p);
    let gap = (sp.discriminant - factored).abs();
    let relative = if factored > 0.0 { gap / factored } else { gap };
    report.push(Record::check(
        "discriminant_factorization",
        relative,
        CLOSED_FORM_TOLERANCE,
    ));
    report.push(Record::check(
        "metric_positivity",
        -sp.theta_minus,
        -POSITIVITY_FLOOR * sp.theta_plus,
    ));

    let (m_minus, m_plus) = two_level::reduced_metric_eigenvalues(s);
    report.push(Record::info("theta_m_minus", m_minus));
    report.push(Record::info("theta_m_plus", m_plus));
    let numeric_m = eigendecompose_hermitian(split.theta_m().theta())?.real_values();
    let m_error = (numeric_m[0] - m_minus)
        .abs()
        .max((numeric_m[1] - m_plus).abs())
        / m_plus;
    report.push(Record::check(
        "theta_m_spectrum_error",
        m_error,
        CLOSED_FORM_TOLERANCE,
    ));

    report.push(Record::check(
        "quasi_hermiticity",
        quasi_hermiticity_defect(&h, &theta)?,
        EXAMPLE_QH_TOLERANCE,
    ));
    report.push(Record::check(
        "reduced_qh_residual",
        split.reduced_qh_residual(),
        EXAMPLE_QH_TOLERANCE,
    ));

    write_text(&out.join("report.tsv"), &report.to_string())?;
    Ok(report)
}
