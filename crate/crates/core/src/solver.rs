//! Trapezoidal (Crank-Nicolson) time stepping for the string models and the
//! thermoacoustic system.
//!
//! Each model is written as a first-order system `M y' = A y + F(t)` on the
//! interleaved nodal unknowns, and advanced with
//! `(M - Δt/2 A) y⁺ = (M + Δt/2 A) y + Δt/2 (F(t) + F(t + Δt))`.
//! Dirichlet unknowns are pinned by identity rows. The left-hand matrix is
//! factored once per solver.

use serde::Serialize;

use crate::banded::{BandLu, BandMatrix};
use crate::discretize::{norm, Grid, SpatialOperator};
use crate::error::{Error, Result};
use crate::model::{
    validate, DisturbanceSpec, InitialData, ModelVariant, PhysicalParams, ThermoacousticParams,
    ValidationReport,
};

/// Nodal state of a string model at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StringState {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub theta: Option<Vec<f64>>,
}

impl StringState {
    pub fn zero(grid: &Grid, variant: ModelVariant) -> Self {
        Self::from_init(&InitialData::zero(grid, variant))
    }

    /// State at `t = 0` with the Dirichlet values set exactly.
    pub fn from_init(init: &InitialData) -> Self {
        let p = init.pinned();
        Self {
            t: 0.0,
            u: p.u0,
            w: p.w0,
            theta: p.theta0,
        }
    }

    /// Errors when the state lacks θ for a thermal variant or field lengths are off.
    pub fn check(&self, grid: &Grid, variant: ModelVariant) -> Result<()> {
        grid.check_len(&self.u)?;
        grid.check_len(&self.w)?;
        match (&self.theta, variant.has_thermal()) {
            (None, true) => Err(Error::MissingTemperature(variant.to_string())),
            (Some(th), true) => grid.check_len(th),
            _ => Ok(()),
        }
    }

    pub fn theta_or_zero(&self) -> Vec<f64> {
        self.theta.clone().unwrap_or_else(|| vec![0.0; self.u.len()])
    }

    fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.w)
            .chain(self.theta.iter().flatten())
            .all(|v| v.is_finite())
    }
}

/// Nodal state of the thermoacoustic system at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoState {
    pub t: f64,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ThermoState {
    pub fn zero(grid: &Grid) -> Self {
        Self {
            t: 0.0,
            rho: vec![0.0; grid.len()],
            v: vec![0.0; grid.len()],
            theta: vec![0.0; grid.len()],
        }
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        grid.check_len(&self.rho)?;
        grid.check_len(&self.v)?;
        grid.check_len(&self.theta)
    }

    fn is_finite(&self) -> bool {
        self.rho
            .iter()
            .chain(&self.v)
            .chain(&self.theta)
            .all(|v| v.is_finite())
    }
}

/// Right-hand side contributions at one instant for the string models.
#[derive(Debug, Clone, PartialEq)]
pub struct StringForcing {
    /// Distributed force at the nodes.
    pub f: Vec<f64>,
    /// Boundary input at x = 1.
    pub d: f64,
    /// Heat source; only used to manufacture exact solutions.
    pub heat: Option<Vec<f64>>,
}

/// Anything that can produce [`StringForcing`] at a given time.
pub trait ForcingSource {
    fn sample(&self, t: f64, grid: &Grid) -> Result<StringForcing>;

    /// Variant-level admissibility; the default admits everything.
    fn check(&self, _variant: ModelVariant) -> ValidationReport {
        ValidationReport::default()
    }
}

impl ForcingSource for DisturbanceSpec {
    fn sample(&self, t: f64, grid: &Grid) -> Result<StringForcing> {
        Ok(StringForcing {
            f: self.f.sample(t, grid)?,
            d: self.d.eval(t)?,
            heat: None,
        })
    }

    fn check(&self, variant: ModelVariant) -> ValidationReport {
        self.check_against(variant)
    }
}

/// Sources for the thermoacoustic velocity and temperature equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoForcing {
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

pub trait ThermoForcingSource {
    fn sample(&self, t: f64, grid: &Grid) -> Result<ThermoForcing>;
}

/// Why a run stopped before reaching the requested final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    /// Index of the step that produced a non-finite value.
    pub step: usize,
    /// Index of the last stored (finite) state.
    pub last_healthy: usize,
}

/// States at `t_n = n·Δt` with per-step disturbance records.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<S> {
    pub dt: f64,
    pub states: Vec<S>,
    /// Trapezoid L² norm of f at each stored time.
    pub f_norms: Vec<f64>,
    /// |d| at each stored time.
    pub d_abs: Vec<f64>,
    /// `T - steps·Δt` for the requested final time `T`.
    pub remainder: f64,
    pub truncated: Option<Truncation>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|n| n as f64 * self.dt).collect()
    }

    /// Ok when complete, the truncation error otherwise.
    pub fn into_complete(self) -> Result<Self> {
        match self.truncated {
            Some(t) => Err(Error::NonFinite {
                step: t.step,
                last_healthy: t.last_healthy,
            }),
            None => Ok(self),
        }
    }
}

/// Number of whole steps covering `[0, t_end]` and the leftover time.
pub fn step_count(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::BadTimeStep(dt));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidSetup(format!("final time must be >= 0, got {t_end}")));
    }
    let steps = (t_end / dt).round() as usize;
    Ok((steps, t_end - steps as f64 * dt))
}

/// Default time step `h / c` (unit Courant number).
pub fn default_dt(grid: &Grid, c: f64) -> f64 {
    grid.h() / c
}

/// Assembled and factored trapezoidal scheme for one of the string models.
#[derive(Debug, Clone)]
pub struct StringSolver {
    variant: ModelVariant,
    params: PhysicalParams,
    grid: Grid,
    dt: f64,
    nf: usize,
    rhs: BandMatrix,
    lu: BandLu,
    pinned: Vec<usize>,
}

const U: usize = 0;
const W: usize = 1;
const TH: usize = 2;

impl StringSolver {
    pub fn new(
        variant: ModelVariant,
        params: &PhysicalParams,
        grid: &Grid,
        dt: f64,
    ) -> Result<Self> {
        if variant == ModelVariant::Thermoacoustic {
            return Err(Error::InvalidSetup(
                "use ThermoacousticSolver for the thermoacoustic system".into(),
            ));
        }
        validate(params, variant).into_result()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::BadTimeStep(dt));
        }
        let p = params.effective(variant);
        let nf = variant.field_count();
        let n = grid.n();
        let h = grid.h();
        let dim = nf * (n + 1);
        let band = 2 * nf - 1;
        let idx = |i: usize, f: usize| nf * i + f;

        let mut a = BandMatrix::zeros(dim, band, band);
        let mut m = BandMatrix::zeros(dim, band, band);
        for i in 0..dim {
            m.add(i, i, 1.0);
        }
        let d2 = SpatialOperator::second_difference(grid);
        let dc = SpatialOperator::coupling_derivative(grid);
        let thermal = variant.has_thermal();

        for i in 1..=n {
            a.add(idx(i, U), idx(i, W), 1.0);
            let wi = idx(i, W);
            // c² u_xx + σ w_xx with the ghost closure at x = 1
            for (j, coef) in [(i - 1, d2.lower[i]), (i, d2.diag[i])] {
                a.add(wi, idx(j, U), p.c * p.c * coef);
                a.add(wi, idx(j, W), p.sigma * coef);
            }
            if i < n {
                a.add(wi, idx(i + 1, U), p.c * p.c * d2.upper[i]);
                a.add(wi, idx(i + 1, W), p.sigma * d2.upper[i]);
            } else {
                a.add(wi, wi, -2.0 * p.a * p.c * p.c / h);
                m.add(wi, wi, 2.0 * p.a * p.sigma / h);
            }
            a.add(wi, wi, -p.mu);
            if thermal {
                for (j, coef) in [(i - 1, dc.lower[i]), (i, dc.diag[i])] {
                    a.add(wi, idx(j, TH), -p.b * coef);
                }
                if i < n {
                    a.add(wi, idx(i + 1, TH), -p.b * dc.upper[i]);
                    let ti = idx(i, TH);
                    for (j, coef) in [(i - 1, d2.lower[i]), (i, d2.diag[i]), (i + 1, d2.upper[i])] {
                        a.add(ti, idx(j, TH), p.k * coef);
                    }
                    for (j, coef) in [(i - 1, dc.lower[i]), (i + 1, dc.upper[i])] {
                        a.add(ti, idx(j, W), -p.lambda * coef);
                    }
                }
            }
        }

        let mut pinned = vec![idx(0, U), idx(0, W)];
        if thermal {
            pinned.extend([idx(0, TH), idx(n, TH)]);
        }
        let mut lhs = m.combine(1.0, &a, -0.5 * dt);
        let mut rhs = m.combine(1.0, &a, 0.5 * dt);
        for &q in &pinned {
            lhs.set_identity_row(q);
            rhs.clear_row(q);
        }
        let lu = lhs.factor()?;
        Ok(Self {
            variant,
            params: p,
            grid: *grid,
            dt,
            nf,
            rhs,
            lu,
            pinned,
        })
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    /// Parameters with the constants unused by the variant zeroed.
    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Smallest over largest pivot of the factored system.
    pub fn pivot_ratio(&self) -> f64 {
        self.lu.pivot_ratio()
    }

    fn pack(&self, s: &StringState) -> Vec<f64> {
        let mut y = vec![0.0; self.nf * self.grid.len()];
        for i in 0..self.grid.len() {
            y[self.nf * i + U] = s.u[i];
            y[self.nf * i + W] = s.w[i];
            if let Some(th) = &s.theta {
                y[self.nf * i + TH] = th[i];
            }
        }
        y
    }

    fn unpack(&self, y: &[f64], t: f64) -> StringState {
        let field = |f: usize| (0..self.grid.len()).map(|i| y[self.nf * i + f]).collect();
        StringState {
            t,
            u: field(U),
            w: field(W),
            theta: self.variant.has_thermal().then(|| field(TH)),
        }
    }

    fn forcing_vector(&self, fc: &StringForcing) -> Vec<f64> {
        let n = self.grid.n();
        let mut out = vec![0.0; self.nf * (n + 1)];
        for i in 1..=n {
            out[self.nf * i + W] = fc.f[i];
        }
        out[self.nf * n + W] += 2.0 * self.params.c * self.params.c * fc.d / self.grid.h();
        if let (Some(heat), true) = (&fc.heat, self.variant.has_thermal()) {
            for i in 1..n {
                out[self.nf * i + TH] = heat[i];
            }
        }
        out
    }

    /// One trapezoidal step using the forcing at both ends of the step.
    pub fn step_with(
        &self,
        state: &StringState,
        now: &StringForcing,
        next: &StringForcing,
    ) -> Result<StringState> {
        state.check(&self.grid, self.variant)?;
        let y = self.pack(state);
        let mut b = self.rhs.matvec(&y);
        let (f0, f1) = (self.forcing_vector(now), self.forcing_vector(next));
        for (i, bi) in b.iter_mut().enumerate() {
            *bi += 0.5 * self.dt * (f0[i] + f1[i]);
        }
        for &q in &self.pinned {
            b[q] = 0.0;
        }
        self.lu.solve_in_place(&mut b);
        // pivoting can leave roundoff in the identity rows
        for &q in &self.pinned {
            b[q] = 0.0;
        }
        Ok(self.unpack(&b, state.t + self.dt))
    }

    /// One step under the given forcing source.
    pub fn step<F: ForcingSource + ?Sized>(&self, state: &StringState, forcing: &F) -> Result<StringState> {
        let now = forcing.sample(state.t, &self.grid)?;
        let next = forcing.sample(state.t + self.dt, &self.grid)?;
        let out = self.step_with(state, &now, &next)?;
        if !out.is_finite() {
            return Err(Error::NonFinite {
                step: 1,
                last_healthy: 0,
            });
        }
        Ok(out)
    }

    /// Runs to `t_end`, stopping early (and recording it) on a non-finite state.
    pub fn run_recording<F: ForcingSource + ?Sized>(
        &self,
        init: &StringState,
        forcing: &F,
        t_end: f64,
    ) -> Result<Trajectory<StringState>> {
        forcing.check(self.variant).into_result()?;
        init.check(&self.grid, self.variant)?;
        let (steps, remainder) = step_count(t_end, self.dt)?;
        let mut states = Vec::with_capacity(steps + 1);
        let mut f_norms = Vec::with_capacity(steps + 1);
        let mut d_abs = Vec::with_capacity(steps + 1);
        let mut now = forcing.sample(0.0, &self.grid)?;
        let mut state = init.clone();
        state.t = 0.0;
        f_norms.push(norm(&self.grid, &now.f));
        d_abs.push(now.d.abs());
        states.push(state.clone());
        let mut truncated = None;
        for n in 1..=steps {
            let t = n as f64 * self.dt;
            let next = forcing.sample(t, &self.grid)?;
            let mut s = self.step_with(&state, &now, &next)?;
            s.t = t;
            if !s.is_finite() {
                truncated = Some(Truncation {
                    step: n,
                    last_healthy: n - 1,
                });
                break;
            }
            f_norms.push(norm(&self.grid, &next.f));
            d_abs.push(next.d.abs());
            states.push(s.clone());
            state = s;
            now = next;
        }
        Ok(Trajectory {
            dt: self.dt,
            states,
            f_norms,
            d_abs,
            remainder,
            truncated,
        })
    }

    /// Runs to `t_end`; a non-finite state is an error.
    pub fn run<F: ForcingSource + ?Sized>(
        &self,
        init: &StringState,
        forcing: &F,
        t_end: f64,
    ) -> Result<Trajectory<StringState>> {
        self.run_recording(init, forcing, t_end)?.into_complete()
    }
}

/// Single step of a string model; assembles and factors a fresh solver.
pub fn step(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
    disturbance: &DisturbanceSpec,
    dt: f64,
) -> Result<StringState> {
    disturbance.check_against(variant).into_result()?;
    StringSolver::new(variant, params, grid, dt)?.step(state, disturbance)
}

/// Trajectory of a string model from initial data.
pub fn run(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    init: &InitialData,
    disturbance: &DisturbanceSpec,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory<StringState>> {
    let solver = StringSolver::new(variant, params, grid, dt)?;
    solver.run(&StringState::from_init(init), disturbance, t_end)
}

/// Assembled and factored trapezoidal scheme for the thermoacoustic system.
#[derive(Debug, Clone)]
pub struct ThermoacousticSolver {
    params: ThermoacousticParams,
    grid: Grid,
    dt: f64,
    rhs: BandMatrix,
    lu: BandLu,
    pinned: Vec<usize>,
}

const RHO: usize = 0;
const V: usize = 1;

impl ThermoacousticSolver {
    pub fn new(params: &ThermoacousticParams, grid: &Grid, dt: f64) -> Result<Self> {
        params.validate().into_result()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::BadTimeStep(dt));
        }
        let p = *params;
        let nf = 3;
        let n = grid.n();
        let h = grid.h();
        let dim = nf * (n + 1);
        let band = 2 * nf - 1;
        let idx = |i: usize, f: usize| nf * i + f;
        let mut a = BandMatrix::zeros(dim, band, band);
        let mut m = BandMatrix::zeros(dim, band, band);
        for i in 0..dim {
            m.add(i, i, 1.0);
        }
        let d2 = SpatialOperator::second_difference(grid);
        let dc = SpatialOperator::coupling_derivative(grid);
        let cg = p.c * p.c / p.gamma;

        // ρ_t = -γ v_x
        for i in 0..n {
            let ri = idx(i, RHO);
            if i > 0 {
                a.add(ri, idx(i - 1, V), -p.gamma * dc.lower[i]);
            }
            a.add(ri, idx(i, V), -p.gamma * dc.diag[i]);
            a.add(ri, idx(i + 1, V), -p.gamma * dc.upper[i]);
        }
        // at x = 1 the damper gives ρ_t = γ a v_t
        m.add(idx(n, RHO), idx(n, V), -p.gamma * p.a);

        for i in 1..=n {
            let vi = idx(i, V);
            for (j, coef) in [(i - 1, dc.lower[i]), (i, dc.diag[i])] {
                a.add(vi, idx(j, RHO), -cg * coef);
                a.add(vi, idx(j, TH), -p.b * coef);
            }
            for (j, coef) in [(i - 1, d2.lower[i]), (i, d2.diag[i])] {
                a.add(vi, idx(j, V), p.sigma * coef);
            }
            if i < n {
                a.add(vi, idx(i + 1, RHO), -cg * dc.upper[i]);
                a.add(vi, idx(i + 1, TH), -p.b * dc.upper[i]);
                a.add(vi, idx(i + 1, V), p.sigma * d2.upper[i]);
                let ti = idx(i, TH);
                for (j, coef) in [(i - 1, d2.lower[i]), (i, d2.diag[i]), (i + 1, d2.upper[i])] {
                    a.add(ti, idx(j, TH), p.k * coef);
                }
                for (j, coef) in [(i - 1, dc.lower[i]), (i + 1, dc.upper[i])] {
                    a.add(ti, idx(j, V), -p.lambda * coef);
                }
            } else {
                m.add(vi, vi, 2.0 * p.a * p.sigma / h);
            }
        }

        let pinned = vec![idx(0, V), idx(0, TH), idx(n, TH)];
        let mut lhs = m.combine(1.0, &a, -0.5 * dt);
        let mut rhs = m.combine(1.0, &a, 0.5 * dt);
        for &q in &pinned {
            lhs.set_identity_row(q);
            rhs.clear_row(q);
        }
        let lu = lhs.factor()?;
        Ok(Self {
            params: p,
            grid: *grid,
            dt,
            rhs,
            lu,
            pinned,
        })
    }

    pub fn params(&self) -> &ThermoacousticParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn pack(&self, s: &ThermoState) -> Vec<f64> {
        let mut y = Vec::with_capacity(3 * self.grid.len());
        for i in 0..self.grid.len() {
            y.extend([s.rho[i], s.v[i], s.theta[i]]);
        }
        y
    }

    fn source_vector(&self, fc: Option<&ThermoForcing>) -> Vec<f64> {
        let n = self.grid.n();
        let mut out = vec![0.0; 3 * (n + 1)];
        if let Some(fc) = fc {
            for i in 1..=n {
                out[3 * i + V] = fc.v[i];
                if i < n {
                    out[3 * i + TH] = fc.theta[i];
                }
            }
        }
        out
    }

    pub fn step_with(
        &self,
        state: &ThermoState,
        now: Option<&ThermoForcing>,
        next: Option<&ThermoForcing>,
    ) -> Result<ThermoState> {
        state.check(&self.grid)?;
        let mut b = self.rhs.matvec(&self.pack(state));
        if now.is_some() || next.is_some() {
            let (s0, s1) = (self.source_vector(now), self.source_vector(next));
            for (i, bi) in b.iter_mut().enumerate() {
                *bi += 0.5 * self.dt * (s0[i] + s1[i]);
            }
        }
        for &q in &self.pinned {
            b[q] = 0.0;
        }
        self.lu.solve_in_place(&mut b);
        // pivoting can leave roundoff in the identity rows
        for &q in &self.pinned {
            b[q] = 0.0;
        }
        let field = |f: usize| (0..self.grid.len()).map(|i| b[3 * i + f]).collect();
        Ok(ThermoState {
            t: state.t + self.dt,
            rho: field(RHO),
            v: field(V),
            theta: field(TH),
        })
    }

    pub fn step(&self, state: &ThermoState) -> Result<ThermoState> {
        let out = self.step_with(state, None, None)?;
        if !out.is_finite() {
            return Err(Error::NonFinite {
                step: 1,
                last_healthy: 0,
            });
        }
        Ok(out)
    }

    /// Runs to `t_end` with optional manufactured sources.
    pub fn run_recording(
        &self,
        init: &ThermoState,
        source: Option<&dyn ThermoForcingSource>,
        t_end: f64,
    ) -> Result<Trajectory<ThermoState>> {
        init.check(&self.grid)?;
        let (steps, remainder) = step_count(t_end, self.dt)?;
        let mut states = Vec::with_capacity(steps + 1);
        let mut state = init.clone();
        state.t = 0.0;
        state.v[0] = 0.0;
        state.theta[0] = 0.0;
        *state.theta.last_mut().expect("grid has nodes") = 0.0;
        states.push(state.clone());
        let mut now = source.map(|s| s.sample(0.0, &self.grid)).transpose()?;
        let mut truncated = None;
        for n in 1..=steps {
            let t = n as f64 * self.dt;
            let next = source.map(|s| s.sample(t, &self.grid)).transpose()?;
            let mut s = self.step_with(&state, now.as_ref(), next.as_ref())?;
            s.t = t;
            if !s.is_finite() {
                truncated = Some(Truncation {
                    step: n,
                    last_healthy: n - 1,
                });
                break;
            }
            states.push(s.clone());
            state = s;
            now = next;
        }
        let len = states.len();
        Ok(Trajectory {
            dt: self.dt,
            states,
            f_norms: vec![0.0; len],
            d_abs: vec![0.0; len],
            remainder,
            truncated,
        })
    }

    pub fn run(
        &self,
        init: &ThermoState,
        source: Option<&dyn ThermoForcingSource>,
        t_end: f64,
    ) -> Result<Trajectory<ThermoState>> {
        self.run_recording(init, source, t_end)?.into_complete()
    }
}

/// Single thermoacoustic step; assembles and factors a fresh solver.
pub fn step_thermoacoustic(
    params: &ThermoacousticParams,
    grid: &Grid,
    state: &ThermoState,
    dt: f64,
) -> Result<ThermoState> {
    ThermoacousticSolver::new(params, grid, dt)?.step(state)
}

/// Disturbance-free thermoacoustic trajectory.
pub fn run_thermoacoustic(
    params: &ThermoacousticParams,
    grid: &Grid,
    init: &ThermoState,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory<ThermoState>> {
    ThermoacousticSolver::new(params, grid, dt)?.run(init, None, t_end)
}
