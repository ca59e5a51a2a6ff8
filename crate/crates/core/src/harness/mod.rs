//! Verification experiments: ISS checks along trajectories, decay fits,
//! convergence studies, σ-sweeps and the thermoacoustic equivalence.

pub mod mms;

use serde::Serialize;

use crate::certificates::{thm3_certificate, IssCertificate};
use crate::discretize::{first_diff, norm_sq, Grid};
use crate::error::{Error, Result};
use crate::functionals::{lyapunov_v, state_norms, FunctionalValue};
use crate::model::{
    DisturbanceSpec, InitialData, InitialDataSpec, ModelVariant, PhysicalParams,
    ThermoacousticParams,
};
use crate::solver::{
    default_dt, StringSolver, StringState, ThermoState, ThermoacousticSolver, Trajectory,
};
use crate::{slack_band, SLACK_CONSTANT};

/// Energy ratio below which a disturbance-free run counts as extinguished.
pub const FINITE_TIME_THRESHOLD: f64 = 1e-10;

/// Minimum number of samples in a decay-fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Both sides of the ISS estimate at every stored step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssCheckReport {
    pub variant: ModelVariant,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `rhs - lhs`.
    pub margin: Vec<f64>,
    pub min_margin: f64,
    pub min_margin_time: f64,
    /// `SLACK_CONSTANT · (h² + Δt²) · (1 + LHS(0))`.
    pub slack: f64,
    pub slack_constant: f64,
    pub pass: bool,
    /// Negative margin that stays within the slack band.
    pub discretization_level: bool,
}

/// Evaluates the ISS estimate of the certificate's theorem at every step,
/// using running maxima of the recorded disturbance norms.
pub fn check_iss(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    cert: &IssCertificate,
    trajectory: &Trajectory<StringState>,
) -> Result<IssCheckReport> {
    let p = params.effective(variant);
    cert.check_matches(variant, &p)?;
    if trajectory.is_empty() {
        return Err(Error::InvalidSetup("empty trajectory".into()));
    }
    let times = trajectory.times();
    let lhs = trajectory
        .states
        .iter()
        .map(|s| state_norms(variant, &p, grid, s).map(|n| n.lhs()))
        .collect::<Result<Vec<_>>>()?;
    let lhs0 = lhs[0];
    let (mut sup_f, mut sup_d) = (0.0_f64, 0.0_f64);
    let mut rhs = Vec::with_capacity(lhs.len());
    for (n, t) in times.iter().enumerate() {
        sup_f = sup_f.max(trajectory.f_norms[n]);
        sup_d = sup_d.max(trajectory.d_abs[n]);
        rhs.push(cert.g * (-cert.omega * t).exp() * lhs0 + cert.gain_f() * sup_f + cert.gain_d() * sup_d);
    }
    let margin: Vec<f64> = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
    let (imin, min_margin) = argmin(&margin);
    let slack = slack_band(grid.h(), trajectory.dt) * (1.0 + lhs0);
    Ok(IssCheckReport {
        variant,
        min_margin_time: times[imin],
        times,
        lhs,
        rhs,
        margin,
        min_margin,
        slack,
        slack_constant: SLACK_CONSTANT,
        pass: min_margin >= -slack,
        discretization_level: min_margin < 0.0 && min_margin >= -slack,
    })
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, x)| if *x < bv { (i, *x) } else { (bi, bv) })
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, x)| if *x > bv { (i, *x) } else { (bi, bv) })
}

/// Lyapunov functional (with components) at every stored state.
pub fn lyapunov_series(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    cert: &IssCertificate,
    trajectory: &Trajectory<StringState>,
) -> Result<Vec<FunctionalValue>> {
    trajectory
        .states
        .iter()
        .map(|s| lyapunov_v(variant, params, grid, s, cert))
        .collect()
}

/// `V_n ≤ V_0 e^{-2ω t_n} (1 + tol)` at every step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub omega: f64,
    /// Largest `V_n / (V_0 e^{-2ω t_n})`.
    pub worst_ratio: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_certified_decay(omega: f64, times: &[f64], v: &[f64], h: f64, dt: f64) -> DecayCheck {
    let tolerance = slack_band(h, dt);
    let ratios: Vec<f64> = times
        .iter()
        .zip(v)
        .map(|(t, vn)| if v[0] > 0.0 { vn / (v[0] * (-2.0 * omega * t).exp()) } else { 0.0 })
        .collect();
    let (i, worst_ratio) = argmax(&ratios);
    DecayCheck {
        omega,
        worst_ratio,
        worst_time: times[i],
        tolerance,
        pass: worst_ratio <= 1.0 + tolerance,
    }
}

/// `V_{n+1} ≤ V_n + tol · V_0` at every step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCheck {
    /// Largest `(V_{n+1} - V_n) / V_0`.
    pub worst_increase: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_step_monotone(times: &[f64], v: &[f64], h: f64, dt: f64) -> MonotoneCheck {
    let tolerance = slack_band(h, dt);
    let scale = if v[0] > 0.0 { v[0] } else { 1.0 };
    let inc: Vec<f64> = v.windows(2).map(|p| (p[1] - p[0]) / scale).collect();
    if inc.is_empty() {
        return MonotoneCheck {
            worst_increase: f64::NEG_INFINITY,
            worst_time: times[0],
            tolerance,
            pass: true,
        };
    }
    let (i, worst) = argmax(&inc);
    MonotoneCheck {
        worst_increase: worst,
        worst_time: times[i + 1],
        tolerance,
        pass: worst <= tolerance,
    }
}

/// Discrete form of `dV/dt ≤ -2ωV + f_rate ‖f‖² + d_rate |d|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCheck {
    /// Largest `(V_{n+1} - V_n)/Δt + 2ω V_n - f_rate ‖f‖² - d_rate |d|²`.
    pub worst_excess: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// The input terms use the larger of the two endpoint samples of each step.
pub fn check_differential_inequality(
    cert: &IssCertificate,
    trajectory: &Trajectory<StringState>,
    v: &[f64],
    h: f64,
) -> RateCheck {
    let dt = trajectory.dt;
    let tolerance = slack_band(h, dt) * (1.0 + v[0]);
    let excess: Vec<f64> = (0..v.len().saturating_sub(1))
        .map(|n| {
            let f = trajectory.f_norms[n].max(trajectory.f_norms[n + 1]);
            let d = trajectory.d_abs[n].max(trajectory.d_abs[n + 1]);
            (v[n + 1] - v[n]) / dt + 2.0 * cert.omega * v[n] - cert.f_rate * f * f - cert.d_rate * d * d
        })
        .collect();
    if excess.is_empty() {
        return RateCheck {
            worst_excess: f64::NEG_INFINITY,
            worst_time: 0.0,
            tolerance,
            pass: true,
        };
    }
    let (i, worst) = argmax(&excess);
    RateCheck {
        worst_excess: worst,
        worst_time: i as f64 * dt,
        tolerance,
        pass: worst <= tolerance,
    }
}

/// Log-linear least-squares fit of a decaying series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `-d ln V / dt` over the fit window.
    pub fitted_rate: f64,
    pub certified_omega: Option<f64>,
    /// `fitted_rate / (2ω)`.
    pub ratio: Option<f64>,
    /// Fitted rate is at least `2ω (1 - 0.05)`.
    pub conservative: Option<bool>,
    /// Root-mean-square residual of `ln V`.
    pub residual: f64,
    pub samples: usize,
    pub window: (f64, f64),
    /// The series fell below `FINITE_TIME_THRESHOLD · V_0` and was cut there.
    pub finite_time: bool,
    pub finite_time_at: Option<f64>,
}

/// Fits the tail half of the series (up to the finite-time cut, if any).
pub fn fit_decay(times: &[f64], values: &[f64], certified_omega: Option<f64>) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if values.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples(values.len()));
    }
    let threshold = FINITE_TIME_THRESHOLD * values[0];
    let cut = values
        .iter()
        .position(|v| !(*v > threshold) || *v <= 0.0)
        .unwrap_or(values.len());
    let finite_time = cut < values.len();
    let start = cut / 2;
    let count = cut - start;
    if count < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples(count));
    }
    let ts = &times[start..cut];
    let ys: Vec<f64> = values[start..cut].iter().map(|v| v.ln()).collect();
    let mt = ts.iter().sum::<f64>() / count as f64;
    let my = ys.iter().sum::<f64>() / count as f64;
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    let slope = sxy / sxx;
    let residual = (ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - (my + slope * (t - mt))).powi(2))
        .sum::<f64>()
        / count as f64)
        .sqrt();
    let fitted_rate = -slope;
    let ratio = certified_omega.map(|w| fitted_rate / (2.0 * w));
    Ok(DecayFit {
        fitted_rate,
        certified_omega,
        ratio,
        conservative: certified_omega.map(|w| fitted_rate >= 2.0 * w * (1.0 - 0.05)),
        residual,
        samples: count,
        window: (ts[0], ts[count - 1]),
        finite_time,
        finite_time_at: finite_time.then(|| times[cut]),
    })
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    /// `"finest-grid"` for self-convergence, `"exact"` for manufactured solutions.
    pub reference: String,
    pub rows: Vec<ConvergenceRow>,
    /// `log2(e_i / e_{i+1})` for consecutive rows.
    pub pairwise_orders: Vec<f64>,
    /// Least-squares slope of `ln e` against `ln h`; absent when errors vanish.
    pub observed_order: Option<f64>,
}

impl ConvergenceTable {
    pub(crate) fn from_rows(reference: &str, rows: Vec<ConvergenceRow>) -> Self {
        let pairwise_orders = rows
            .windows(2)
            .map(|p| (p[0].error / p[1].error).ln() / (p[0].h / p[1].h).ln())
            .collect();
        let usable: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.error > 0.0).collect();
        let observed_order = (usable.len() >= 2 && usable.len() == rows.len()).then(|| {
            let xs: Vec<f64> = usable.iter().map(|r| r.h.ln()).collect();
            let ys: Vec<f64> = usable.iter().map(|r| r.error.ln()).collect();
            let mx = xs.iter().sum::<f64>() / xs.len() as f64;
            let my = ys.iter().sum::<f64>() / ys.len() as f64;
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            num / den
        });
        Self {
            reference: reference.to_string(),
            rows,
            pairwise_orders,
            observed_order,
        }
    }
}

fn check_n_list(n_list: &[usize], min_len: usize) -> Result<Vec<Grid>> {
    if n_list.len() < min_len {
        return Err(Error::InvalidSetup(format!(
            "need at least {min_len} grid sizes, got {}",
            n_list.len()
        )));
    }
    if n_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidSetup("grid sizes must be strictly ascending".into()));
    }
    n_list.iter().map(|&n| Grid::new(n)).collect()
}

/// Self-convergence against the finest grid at the final time, unit Courant
/// number on every grid. Coarse nodes are compared with the coinciding fine
/// nodes; the error is the trapezoid L² norm over all fields.
pub fn convergence_study(
    variant: ModelVariant,
    params: &PhysicalParams,
    init: &InitialDataSpec,
    disturbance: &DisturbanceSpec,
    n_list: &[usize],
    t_end: f64,
) -> Result<ConvergenceTable> {
    let grids = check_n_list(n_list, 3)?;
    let fine = *grids.last().expect("non-empty");
    if grids.iter().any(|g| !g.nests_in(&fine)) {
        return Err(Error::InvalidSetup("grids are not nested in the finest grid".into()));
    }
    let final_state = |grid: &Grid| -> Result<StringState> {
        let dt = default_dt(grid, params.c);
        let solver = StringSolver::new(variant, params, grid, dt)?;
        let data = init.sample(grid, variant)?;
        let tr = solver.run(&StringState::from_init(&data), disturbance, t_end)?;
        Ok(tr.states.last().expect("initial state stored").clone())
    };
    let reference = final_state(&fine)?;
    let mut rows = Vec::new();
    for grid in &grids[..grids.len() - 1] {
        let coarse = final_state(grid)?;
        let stride = fine.n() / grid.n();
        let diff = |a: &[f64], b: &[f64]| -> Vec<f64> {
            (0..grid.len()).map(|i| a[i] - b[i * stride]).collect()
        };
        let mut err = norm_sq(grid, &diff(&coarse.u, &reference.u))
            + norm_sq(grid, &diff(&coarse.w, &reference.w));
        if let (Some(a), Some(b)) = (&coarse.theta, &reference.theta) {
            err += norm_sq(grid, &diff(a, b));
        }
        rows.push(ConvergenceRow {
            n: grid.n(),
            h: grid.h(),
            dt: default_dt(grid, params.c),
            error: err.sqrt(),
        });
    }
    Ok(ConvergenceTable::from_rows("finest-grid", rows))
}

/// Certificate-level quantities of Theorem 3 at one σ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub gamma: f64,
    pub omega: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaSweep {
    pub r: f64,
    pub rows: Vec<SweepRow>,
    /// Monotonicity as σ decreases; absent for a single row.
    pub gamma_increasing: Option<bool>,
    pub omega_decreasing: Option<bool>,
    pub c1_decreasing: Option<bool>,
}

impl SigmaSweep {
    pub fn monotone(&self) -> bool {
        [self.gamma_increasing, self.omega_decreasing, self.c1_decreasing]
            .iter()
            .all(|f| f.unwrap_or(true))
    }
}

/// Theorem-3 gains over a descending list of σ values.
pub fn sigma_sweep(params_base: &PhysicalParams, sigma_list: &[f64], r: f64) -> Result<SigmaSweep> {
    if sigma_list.is_empty() {
        return Err(Error::InvalidSetup("empty sigma list".into()));
    }
    if sigma_list.iter().any(|s| !(*s > 0.0)) || sigma_list.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidSetup(
            "sigma list must be positive and strictly descending".into(),
        ));
    }
    let rows = sigma_list
        .iter()
        .map(|&sigma| {
            let cert = thm3_certificate(&PhysicalParams { sigma, ..*params_base }, r)?;
            Ok(SweepRow {
                sigma,
                gamma: cert.gamma.expect("theorem 3 has gamma"),
                omega: cert.omega,
                c1: cert.c1.expect("theorem 3 has C1"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trend = |f: &dyn Fn(&[SweepRow]) -> bool| (rows.len() > 1).then(|| rows.windows(2).all(f));
    Ok(SigmaSweep {
        r,
        gamma_increasing: trend(&|p| p[1].gamma > p[0].gamma),
        omega_decreasing: trend(&|p| p[1].omega < p[0].omega),
        c1_decreasing: trend(&|p| p[1].c1 < p[0].c1),
        rows,
    })
}

/// Thermoacoustic state matched to string initial data: `v = w`, shared θ,
/// and `ρ = -γ u_x` (the time integral of `ρ_t = -γ v_x`).
pub fn matched_thermo_state(init: &InitialData, grid: &Grid, gamma: f64) -> Result<ThermoState> {
    grid.check_len(&init.u0)?;
    grid.check_len(&init.w0)?;
    let theta = init
        .theta0
        .clone()
        .ok_or_else(|| Error::InconsistentInit("theta0 is required".into()))?;
    grid.check_len(&theta)?;
    if init.u0[0] != 0.0 || init.w0[0] != 0.0 {
        return Err(Error::InconsistentInit("u0(0) and w0(0) must be 0".into()));
    }
    if theta[0] != 0.0 || theta[grid.n()] != 0.0 {
        return Err(Error::InconsistentInit("theta0 must vanish at both ends".into()));
    }
    let ux = first_diff(grid, &init.u0)?;
    Ok(ThermoState {
        t: 0.0,
        rho: ux.iter().map(|v| -gamma * v).collect(),
        v: init.w0.clone(),
        theta,
    })
}

/// Discrepancy between matched thermoacoustic and model-D runs on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceRun {
    pub n: usize,
    pub dt: f64,
    /// `max_n ‖v(t_n) - w(t_n)‖₂`.
    pub max_discrepancy: f64,
    pub max_discrepancy_time: f64,
}

/// Runs both systems from matched data and records the largest L² gap.
pub fn equivalence_run(
    ta: &ThermoacousticParams,
    grid: &Grid,
    init: &InitialData,
    dt: f64,
    t_end: f64,
) -> Result<EquivalenceRun> {
    let twin = ta.twin_params();
    let thermo = matched_thermo_state(init, grid, ta.gamma)?;
    let d_run = StringSolver::new(ModelVariant::D, &twin, grid, dt)?.run(
        &StringState::from_init(init),
        &DisturbanceSpec::zero(),
        t_end,
    )?;
    let t_run = ThermoacousticSolver::new(ta, grid, dt)?.run(&thermo, None, t_end)?;
    let gaps: Vec<f64> = d_run
        .states
        .iter()
        .zip(&t_run.states)
        .map(|(s, q)| {
            let diff: Vec<f64> = s.w.iter().zip(&q.v).map(|(a, b)| a - b).collect();
            norm_sq(grid, &diff).sqrt()
        })
        .collect();
    let (i, max_discrepancy) = argmax(&gaps);
    Ok(EquivalenceRun {
        n: grid.n(),
        dt,
        max_discrepancy,
        max_discrepancy_time: i as f64 * dt,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub params: ThermoacousticParams,
    /// μ used by the model-D twin run (always 0).
    pub twin_mu: f64,
    pub runs: Vec<EquivalenceRun>,
    /// Consecutive discrepancy ratios `e(N) / e(2N)`.
    pub ratios: Vec<f64>,
}

/// Equivalence runs over a refinement list at unit Courant number.
pub fn thermoacoustic_equivalence(
    ta: &ThermoacousticParams,
    init: &InitialDataSpec,
    n_list: &[usize],
    t_end: f64,
) -> Result<EquivalenceReport> {
    let grids = check_n_list(n_list, 1)?;
    let runs = grids
        .iter()
        .map(|g| {
            let data = init.sample(g, ModelVariant::D)?;
            equivalence_run(ta, g, &data, default_dt(g, ta.c), t_end)
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = runs
        .windows(2)
        .map(|p| p[0].max_discrepancy / p[1].max_discrepancy)
        .collect();
    Ok(EquivalenceReport {
        params: *ta,
        twin_mu: ta.twin_params().mu,
        runs,
        ratios,
    })
}

/// One CSV row of a checked trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub v: f64,
    pub e: f64,
    pub phi: f64,
    pub w: f64,
    pub margin: f64,
}

/// Column names matching [`SeriesRow`].
pub const SERIES_COLUMNS: [&str; 8] = ["t", "LHS", "RHS", "V", "E", "Phi", "W", "margin"];

pub fn series_rows(report: &IssCheckReport, values: &[FunctionalValue]) -> Vec<SeriesRow> {
    report
        .times
        .iter()
        .enumerate()
        .zip(values)
        .map(|((n, t), fv)| SeriesRow {
            t: *t,
            lhs: report.lhs[n],
            rhs: report.rhs[n],
            v: fv.v,
            e: fv.e,
            phi: fv.phi,
            w: fv.w_kv.unwrap_or(0.0),
            margin: report.margin[n],
        })
        .collect()
}

/// ISS check at one resolution, repeated at doubled resolution when it fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssExperiment {
    pub report: IssCheckReport,
    pub decay: Option<DecayCheck>,
    /// Check at 2N (and Δt/2), run only when the first check fails.
    pub confirmation: Option<IssCheckReport>,
    /// Failed at both resolutions.
    pub genuine_violation: bool,
}

/// Simulates, checks the ISS estimate, and confirms any failure at 2N.
#[allow(clippy::too_many_arguments)]
pub fn iss_experiment(
    variant: ModelVariant,
    params: &PhysicalParams,
    n: usize,
    dt: f64,
    init: &InitialDataSpec,
    disturbance: &DisturbanceSpec,
    cert: &IssCertificate,
    t_end: f64,
) -> Result<(IssExperiment, Trajectory<StringState>, Vec<FunctionalValue>)> {
    let run_check = |n: usize, dt: f64| -> Result<(IssCheckReport, Trajectory<StringState>, Grid)> {
        let grid = Grid::new(n)?;
        let data = init.sample(&grid, variant)?;
        let tr = StringSolver::new(variant, params, &grid, dt)?.run(
            &StringState::from_init(&data),
            disturbance,
            t_end,
        )?;
        Ok((check_iss(variant, params, &grid, cert, &tr)?, tr, grid))
    };
    let (report, tr, grid) = run_check(n, dt)?;
    let values = lyapunov_series(variant, params, &grid, cert, &tr)?;
    let decay = disturbance.is_zero().then(|| {
        let v: Vec<f64> = values.iter().map(|f| f.v).collect();
        check_certified_decay(cert.omega, &tr.times(), &v, grid.h(), dt)
    });
    let confirmation = if report.pass {
        None
    } else {
        Some(run_check(2 * n, dt / 2.0)?.0)
    };
    let genuine_violation = confirmation.as_ref().is_some_and(|c| !c.pass);
    Ok((
        IssExperiment {
            report,
            decay,
            confirmation,
            genuine_violation,
        },
        tr,
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::thm1_certificate;
    use crate::model::Profile;

    #[test]
    fn exact_exponential_fit() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let v: Vec<f64> = times.iter().map(|t| (-3.0 * t).exp()).collect();
        let fit = fit_decay(&times, &v, None).unwrap();
        assert!((fit.fitted_rate - 3.0).abs() < 1e-6);
        assert!(!fit.finite_time);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn fit_needs_samples() {
        let t = [0.0, 1.0, 2.0];
        assert!(matches!(fit_decay(&t, &[1.0, 0.5, 0.25], None), Err(Error::InsufficientSamples(3))));
    }

    #[test]
    fn fit_flags_extinction() {
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let v: Vec<f64> = times
            .iter()
            .map(|t| if *t < 6.0 { (-t).exp() } else { 0.0 })
            .collect();
        let fit = fit_decay(&times, &v, None).unwrap();
        assert!(fit.finite_time);
        assert!((fit.fitted_rate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_data_iss_passes() {
        let grid = Grid::new(32).unwrap();
        let p = PhysicalParams::golden();
        let cert = thm1_certificate(&p, 1.0).unwrap();
        let tr = StringSolver::new(ModelVariant::B, &p, &grid, grid.h())
            .unwrap()
            .run(&StringState::zero(&grid, ModelVariant::B), &DisturbanceSpec::zero(), 1.0)
            .unwrap();
        let rep = check_iss(ModelVariant::B, &p, &grid, &cert, &tr).unwrap();
        assert!(rep.pass);
        assert!(rep.lhs.iter().chain(&rep.rhs).all(|v| *v == 0.0));
    }

    #[test]
    fn iss_rejects_wrong_certificate() {
        let grid = Grid::new(16).unwrap();
        let p = PhysicalParams::golden();
        let cert = thm1_certificate(&p, 1.0).unwrap();
        let tr = StringSolver::new(ModelVariant::C, &p, &grid, grid.h())
            .unwrap()
            .run(&StringState::zero(&grid, ModelVariant::C), &DisturbanceSpec::zero(), 0.5)
            .unwrap();
        assert!(matches!(
            check_iss(ModelVariant::C, &p, &grid, &cert, &tr),
            Err(Error::CertificateMismatch(_))
        ));
    }

    #[test]
    fn zero_data_converges_trivially() {
        let table = convergence_study(
            ModelVariant::B,
            &PhysicalParams::golden(),
            &InitialDataSpec::default(),
            &DisturbanceSpec::zero(),
            &[16, 32, 64],
            0.5,
        )
        .unwrap();
        assert!(table.rows.iter().all(|r| r.error == 0.0));
        assert!(table.observed_order.is_none());
    }

    #[test]
    fn convergence_rejects_bad_lists() {
        let p = PhysicalParams::golden();
        let init = InitialDataSpec::default();
        let dist = DisturbanceSpec::zero();
        assert!(convergence_study(ModelVariant::B, &p, &init, &dist, &[16, 32], 0.5).is_err());
        assert!(convergence_study(ModelVariant::B, &p, &init, &dist, &[16, 24, 64], 0.5).is_err());
        assert!(convergence_study(ModelVariant::B, &p, &init, &dist, &[32, 16, 64], 0.5).is_err());
    }

    #[test]
    fn single_sigma_has_no_trend() {
        let s = sigma_sweep(&PhysicalParams::golden(), &[0.5], 1.0).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.gamma_increasing.is_none());
        assert!(s.monotone());
    }

    #[test]
    fn halving_sigma_raises_gain() {
        let s = sigma_sweep(&PhysicalParams::golden(), &[1.0, 0.5, 0.25, 0.1, 0.01], 1.0).unwrap();
        assert_eq!(s.gamma_increasing, Some(true));
        assert_eq!(s.omega_decreasing, Some(true));
        assert_eq!(s.c1_decreasing, Some(true));
    }

    #[test]
    fn sweep_rejects_ascending() {
        assert!(sigma_sweep(&PhysicalParams::golden(), &[0.1, 1.0], 1.0).is_err());
    }

    #[test]
    fn zero_data_equivalence() {
        let ta = ThermoacousticParams {
            a: 1.0,
            c: 1.0,
            gamma: 1.4,
            b: 1.0,
            k: 1.0,
            lambda: 1.0,
            sigma: 0.5,
        };
        let rep = thermoacoustic_equivalence(&ta, &InitialDataSpec::default(), &[16, 32], 0.5).unwrap();
        assert!(rep.runs.iter().all(|r| r.max_discrepancy == 0.0));
        assert_eq!(rep.twin_mu, 0.0);
    }

    #[test]
    fn inconsistent_equivalence_init() {
        let grid = Grid::new(16).unwrap();
        let mut init = InitialData::zero(&grid, ModelVariant::D);
        init.theta0 = Some(vec![1.0; 17]);
        assert!(matches!(
            matched_thermo_state(&init, &grid, 1.4),
            Err(Error::InconsistentInit(_))
        ));
        let spec = InitialDataSpec {
            theta: Some(Profile::Polynomial { coefficients: vec![1.0] }),
            ..Default::default()
        };
        let ta = ThermoacousticParams {
            a: 1.0,
            c: 1.0,
            gamma: 1.4,
            b: 1.0,
            k: 1.0,
            lambda: 1.0,
            sigma: 0.5,
        };
        assert!(matches!(
            thermoacoustic_equivalence(&ta, &spec, &[16], 0.1),
            Err(Error::InconsistentInit(_))
        ));
    }
}
