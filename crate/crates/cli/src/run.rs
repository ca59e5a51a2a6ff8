//! Experiment dispatch. Each experiment writes its artifacts and returns the
//! checks it asserted; the manifest is written last.

use std::path::Path;

use serde::Serialize;

use dampwave::certificates::{optimize_r, OptimizedR};
use dampwave::functionals::{energy_e, state_norms, theorem_for};
use dampwave::harness::mms::mms_study;
use dampwave::harness::{
    convergence_study, iss_experiment, series_rows, sigma_sweep, thermoacoustic_equivalence,
    ConvergenceTable, DecayCheck, IssCheckReport, SERIES_COLUMNS,
};
use dampwave::solver::{StringSolver, Truncation};
use dampwave::{Grid, IssCertificate, StringState};

use crate::artifacts::{ArtifactDir, Cell, FileEntry};
use crate::config::{canonical_toml, Experiment, Reference, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] dampwave::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Setup(String),
}

/// A named pass/fail assertion made by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub truncated: bool,
    pub files: Vec<FileEntry>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        !self.truncated && self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    generator: String,
    created: String,
    experiment: Experiment,
    config: &'a RunConfig,
    files: &'a [FileEntry],
    checks: &'a [Check],
    truncated: bool,
    pass: bool,
}

/// Runs the configured experiment into `out` and writes `manifest.json`.
pub fn execute(config: &RunConfig, out: &Path) -> Result<Outcome, RunError> {
    let mut dir = ArtifactDir::create(out)?;
    dir.write_bytes("config.toml", canonical_toml(config).as_bytes())?;
    let mut truncated = false;
    let checks = match config.experiment {
        Experiment::Simulate => simulate(config, &mut dir, &mut truncated)?,
        Experiment::Certify => certify(config, &mut dir)?,
        Experiment::CheckIss => check_iss(config, &mut dir)?,
        Experiment::Converge => converge(config, &mut dir)?,
        Experiment::SweepSigma => sweep(config, &mut dir)?,
        Experiment::ThermoacousticEquiv => equivalence(config, &mut dir)?,
    };
    let files = dir.files().to_vec();
    let outcome = Outcome {
        checks,
        truncated,
        files,
    };
    let manifest = Manifest {
        generator: format!("dampwave {}", env!("CARGO_PKG_VERSION")),
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        experiment: config.experiment,
        config,
        files: &outcome.files,
        checks: &outcome.checks,
        truncated,
        pass: outcome.pass(),
    };
    dir.write_json("manifest.json", &manifest)?;
    Ok(outcome)
}

fn initial_state(config: &RunConfig, grid: &Grid) -> Result<StringState, RunError> {
    let spec = config.initial.resolve().map_err(RunError::Setup)?;
    Ok(StringState::from_init(&spec.sample(grid, config.variant)?))
}

#[derive(Serialize)]
struct SimulationReport {
    variant: dampwave::ModelVariant,
    n: usize,
    dt: f64,
    steps: usize,
    t_final: f64,
    remainder: f64,
    truncated: Option<Truncation>,
    energy_initial: f64,
    energy_final: f64,
}

fn simulate(config: &RunConfig, dir: &mut ArtifactDir, truncated: &mut bool) -> Result<Vec<Check>, RunError> {
    let variant = config.variant;
    let grid = Grid::new(config.grid.n)?;
    let solver = StringSolver::new(variant, &config.params, &grid, config.dt())?;
    let tr = solver.run_recording(&initial_state(config, &grid)?, &config.disturbance, config.t_end)?;
    let p = config.params.effective(variant);
    let mut rows = Vec::with_capacity(tr.len());
    let mut energies = Vec::with_capacity(tr.len());
    for (n, s) in tr.states.iter().enumerate() {
        let e = energy_e(variant, &p, &grid, s)?;
        let lhs = state_norms(variant, &p, &grid, s)?.lhs();
        energies.push(e);
        rows.push(vec![
            Cell::from(s.t),
            e.into(),
            lhs.into(),
            tr.f_norms[n].into(),
            tr.d_abs[n].into(),
        ]);
    }
    dir.write_csv("series.csv", &["t", "E", "norm", "f_norm", "d_abs"], &rows)?;

    let last = tr.states.last().expect("initial state stored");
    let theta = last.theta.as_deref();
    let mut header = vec!["x", "u", "w"];
    if theta.is_some() {
        header.push("theta");
    }
    let state_rows: Vec<Vec<Cell>> = grid
        .nodes()
        .enumerate()
        .map(|(i, x)| {
            let mut row = vec![Cell::from(x), last.u[i].into(), last.w[i].into()];
            if let Some(th) = theta {
                row.push(th[i].into());
            }
            row
        })
        .collect();
    dir.write_csv("final_state.csv", &header, &state_rows)?;

    *truncated = tr.truncated.is_some();
    dir.write_json(
        "report.json",
        &SimulationReport {
            variant,
            n: grid.n(),
            dt: tr.dt,
            steps: tr.len() - 1,
            t_final: last.t,
            remainder: tr.remainder,
            truncated: tr.truncated,
            energy_initial: energies[0],
            energy_final: *energies.last().expect("non-empty"),
        },
    )?;
    Ok(vec![Check::new(
        "finite-trajectory",
        tr.truncated.is_none(),
        match tr.truncated {
            Some(t) => format!("non-finite state at step {}", t.step),
            None => format!("{} steps", tr.len() - 1),
        },
    )])
}

/// Certificate at the fixed `r`, or the optimized one.
fn certificate(config: &RunConfig) -> Result<(IssCertificate, Option<OptimizedR>), RunError> {
    let theorem = theorem_for(config.variant)?;
    match &config.certificate.optimize {
        None => Ok((theorem.certificate(&config.params, config.certificate.r)?, None)),
        Some(opt) => {
            let best = optimize_r(theorem, &config.params, opt.range, opt.objective)?;
            Ok((best.certificate.clone(), Some(best)))
        }
    }
}

#[derive(Serialize)]
struct CertificateArtifact<'a> {
    certificate: &'a IssCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimization: Option<OptimizationSummary>,
}

#[derive(Serialize)]
struct OptimizationSummary {
    r_star: f64,
    objective: dampwave::Objective,
    r_range: (f64, f64),
    at_lower_bound: bool,
    at_upper_bound: bool,
    evaluations: usize,
}

fn write_certificate(
    dir: &mut ArtifactDir,
    cert: &IssCertificate,
    opt: Option<&OptimizedR>,
) -> Result<(), RunError> {
    let optimization = opt.map(|o| OptimizationSummary {
        r_star: o.r_star,
        objective: o.objective,
        r_range: o.r_range,
        at_lower_bound: o.at_lower_bound,
        at_upper_bound: o.at_upper_bound,
        evaluations: o.evaluations,
    });
    dir.write_json(
        "certificate.json",
        &CertificateArtifact {
            certificate: cert,
            optimization,
        },
    )?;
    Ok(())
}

fn certify(config: &RunConfig, dir: &mut ArtifactDir) -> Result<Vec<Check>, RunError> {
    let (cert, opt) = certificate(config)?;
    write_certificate(dir, &cert, opt.as_ref())?;
    Ok(Vec::new())
}

#[derive(Serialize)]
struct IssSummary<'a> {
    pass: bool,
    min_margin: f64,
    min_margin_time: f64,
    slack: f64,
    slack_constant: f64,
    discretization_level: bool,
    decay: Option<&'a DecayCheck>,
    confirmation: Option<ConfirmationSummary>,
    genuine_violation: bool,
}

#[derive(Serialize)]
struct ConfirmationSummary {
    pass: bool,
    min_margin: f64,
    min_margin_time: f64,
    slack: f64,
}

impl From<&IssCheckReport> for ConfirmationSummary {
    fn from(r: &IssCheckReport) -> Self {
        Self {
            pass: r.pass,
            min_margin: r.min_margin,
            min_margin_time: r.min_margin_time,
            slack: r.slack,
        }
    }
}

fn check_iss(config: &RunConfig, dir: &mut ArtifactDir) -> Result<Vec<Check>, RunError> {
    let (cert, opt) = certificate(config)?;
    write_certificate(dir, &cert, opt.as_ref())?;
    let init = config.initial.resolve().map_err(RunError::Setup)?;
    let (exp, _tr, values) = iss_experiment(
        config.variant,
        &config.params,
        config.grid.n,
        config.dt(),
        &init,
        &config.disturbance,
        &cert,
        config.t_end,
    )?;
    let rows: Vec<Vec<Cell>> = series_rows(&exp.report, &values)
        .into_iter()
        .map(|r| {
            [r.t, r.lhs, r.rhs, r.v, r.e, r.phi, r.w, r.margin]
                .into_iter()
                .map(Cell::from)
                .collect()
        })
        .collect();
    dir.write_csv("series.csv", &SERIES_COLUMNS, &rows)?;
    let report = &exp.report;
    dir.write_json(
        "iss_report.json",
        &IssSummary {
            pass: report.pass,
            min_margin: report.min_margin,
            min_margin_time: report.min_margin_time,
            slack: report.slack,
            slack_constant: report.slack_constant,
            discretization_level: report.discretization_level,
            decay: exp.decay.as_ref(),
            confirmation: exp.confirmation.as_ref().map(Into::into),
            genuine_violation: exp.genuine_violation,
        },
    )?;
    let mut checks = vec![Check::new(
        "iss-estimate",
        !exp.genuine_violation,
        format!(
            "min margin {:.3e} at t = {:.4} (slack {:.3e}){}",
            report.min_margin,
            report.min_margin_time,
            report.slack,
            if exp.confirmation.is_some() { ", re-checked at 2N" } else { "" }
        ),
    )];
    if let Some(decay) = &exp.decay {
        checks.push(Check::new(
            "certified-decay",
            decay.pass,
            format!("worst V/(V0 e^(-2wt)) = {:.6}", decay.worst_ratio),
        ));
    }
    Ok(checks)
}

fn write_table(dir: &mut ArtifactDir, table: &ConvergenceTable) -> Result<(), RunError> {
    let rows: Vec<Vec<Cell>> = table
        .rows
        .iter()
        .map(|r| vec![Cell::from(r.n), r.h.into(), r.dt.into(), r.error.into()])
        .collect();
    dir.write_csv("convergence.csv", &["n", "h", "dt", "error"], &rows)?;
    dir.write_json("convergence.json", table)?;
    Ok(())
}

fn converge(config: &RunConfig, dir: &mut ArtifactDir) -> Result<Vec<Check>, RunError> {
    let table = match config.converge.reference {
        Reference::SelfConvergence => convergence_study(
            config.variant,
            &config.params,
            &config.initial.resolve().map_err(RunError::Setup)?,
            &config.disturbance,
            &config.converge.n_list,
            config.t_end,
        )?,
        Reference::Manufactured => mms_study(
            config.variant,
            &config.params,
            &config.converge.n_list,
            config.t_end,
        )?,
    };
    write_table(dir, &table)?;
    Ok(Vec::new())
}

fn sweep(config: &RunConfig, dir: &mut ArtifactDir) -> Result<Vec<Check>, RunError> {
    let s = sigma_sweep(&config.params, &config.sweep.sigmas, config.certificate.r)?;
    let rows: Vec<Vec<Cell>> = s
        .rows
        .iter()
        .map(|r| [r.sigma, r.gamma, r.omega, r.c1].into_iter().map(Cell::from).collect())
        .collect();
    dir.write_csv("sweep.csv", &["sigma", "gamma", "omega", "C1"], &rows)?;
    dir.write_json("sweep.json", &s)?;
    let (first, last) = (&s.rows[0], &s.rows[s.rows.len() - 1]);
    Ok(vec![Check::new(
        "sigma-monotone",
        s.monotone(),
        format!("gamma {:.3e} -> {:.3e}", first.gamma, last.gamma),
    )])
}

fn equivalence(config: &RunConfig, dir: &mut ArtifactDir) -> Result<Vec<Check>, RunError> {
    let report = thermoacoustic_equivalence(
        &config.thermo_params(),
        &config.initial.resolve().map_err(RunError::Setup)?,
        &config.thermoacoustic.n_list,
        config.t_end,
    )?;
    let rows: Vec<Vec<Cell>> = report
        .runs
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.n),
                r.dt.into(),
                r.max_discrepancy.into(),
                r.max_discrepancy_time.into(),
            ]
        })
        .collect();
    dir.write_csv(
        "equivalence.csv",
        &["n", "dt", "max_discrepancy", "max_discrepancy_time"],
        &rows,
    )?;
    dir.write_json("equivalence.json", &report)?;
    Ok(vec![Check::new(
        "discrepancy-decreases",
        report.ratios.iter().all(|r| *r > 1.0),
        format!("ratios {:?}", report.ratios),
    )])
}
