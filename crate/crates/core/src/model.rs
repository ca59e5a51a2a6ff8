//! Physical parameters, model variants, disturbance signals and initial data.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::discretize::{first_diff, Grid};
use crate::error::{Error, Result};

/// Constants of a closed-loop string model.
///
/// Unused constants are ignored by variants that do not need them
/// (`b`, `k`, `lambda` outside the thermal models, `sigma` outside model D).
/// Missing fields take the [`Default`] values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalParams {
    /// Passive damper gain at x = 1.
    pub a: f64,
    /// Wave speed.
    pub c: f64,
    /// Viscous friction with the surrounding medium.
    pub mu: f64,
    /// Thermo-mechanical coupling.
    pub b: f64,
    /// Thermal diffusivity.
    pub k: f64,
    /// Strain-rate to heat coupling.
    pub lambda: f64,
    /// Kelvin-Voigt coefficient.
    pub sigma: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            c: 1.0,
            mu: 0.0,
            b: 0.0,
            k: 0.0,
            lambda: 0.0,
            sigma: 0.0,
        }
    }
}

impl PhysicalParams {
    /// The parameter set used throughout the test-suite and the examples.
    pub fn golden() -> Self {
        Self {
            a: 1.0,
            c: 1.0,
            mu: 0.5,
            b: 1.0,
            k: 1.0,
            lambda: 1.0,
            sigma: 0.5,
        }
    }

    /// Copy with the constants the variant does not use set to zero.
    pub fn effective(&self, variant: ModelVariant) -> Self {
        let mut p = *self;
        if !variant.has_thermal() {
            p.b = 0.0;
            p.k = 0.0;
            p.lambda = 0.0;
        }
        if !variant.has_kelvin_voigt() {
            p.sigma = 0.0;
        }
        if variant == ModelVariant::Thermoacoustic {
            p.mu = 0.0;
        }
        p
    }
}

/// The closed-loop models of a damped string, plus the thermoacoustic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelVariant {
    /// Undamped wave equation with the passive damper.
    A,
    /// Viscous damping, distributed and boundary disturbances.
    B,
    /// Viscous and thermal damping, distributed and boundary disturbances.
    C,
    /// Viscous, thermal and Kelvin-Voigt damping, distributed disturbance only.
    D,
    /// Linear viscous thermoacoustics in (ρ, v, θ).
    #[serde(rename = "thermoacoustic")]
    Thermoacoustic,
}

impl ModelVariant {
    pub fn has_thermal(self) -> bool {
        matches!(self, Self::C | Self::D | Self::Thermoacoustic)
    }

    pub fn has_kelvin_voigt(self) -> bool {
        matches!(self, Self::D | Self::Thermoacoustic)
    }

    pub fn accepts_distributed_disturbance(self) -> bool {
        matches!(self, Self::B | Self::C | Self::D)
    }

    pub fn accepts_boundary_disturbance(self) -> bool {
        matches!(self, Self::B | Self::C)
    }

    /// Number of nodal fields carried by the string state.
    pub fn field_count(self) -> usize {
        if self.has_thermal() {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
            Self::Thermoacoustic => "thermoacoustic",
        };
        f.write_str(s)
    }
}

/// Constants of the linear thermoacoustic system, plus the damper gain at x = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoacousticParams {
    pub a: f64,
    pub c: f64,
    pub gamma: f64,
    pub b: f64,
    pub k: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl ThermoacousticParams {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (name, value) in [
            ("a", self.a),
            ("c", self.c),
            ("gamma", self.gamma),
            ("b", self.b),
            ("k", self.k),
            ("lambda", self.lambda),
            ("sigma", self.sigma),
        ] {
            require_positive(&mut report, name, value);
        }
        report
    }

    /// Model-D parameters obtained by setting v = u_t (no viscous friction).
    pub fn twin_params(&self) -> PhysicalParams {
        PhysicalParams {
            a: self.a,
            c: self.c,
            mu: 0.0,
            b: self.b,
            k: self.k,
            lambda: self.lambda,
            sigma: self.sigma,
        }
    }
}

/// Outcome of a parameter or setup check. Violations are fatal, warnings are not.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.warnings.extend(other.warnings);
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        if self.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&self.violations.join("; "))
        }
    }
}

fn require_positive(report: &mut ValidationReport, name: &str, value: f64) {
    if !(value.is_finite() && value > 0.0) {
        report.violations.push(format!("{name} must be > 0"));
    }
}

/// Checks the sign constraints each variant places on its constants.
pub fn validate(params: &PhysicalParams, variant: ModelVariant) -> ValidationReport {
    let mut report = ValidationReport::default();
    require_positive(&mut report, "a", params.a);
    require_positive(&mut report, "c", params.c);
    if !(params.mu.is_finite() && params.mu >= 0.0) {
        report.violations.push("mu must be >= 0".into());
    }
    if variant == ModelVariant::A && params.mu != 0.0 {
        report
            .violations
            .push("mu must be 0 for variant A (no viscous damping)".into());
    }
    if variant.has_thermal() {
        require_positive(&mut report, "b", params.b);
        require_positive(&mut report, "k", params.k);
        require_positive(&mut report, "lambda", params.lambda);
    }
    if variant.has_kelvin_voigt() {
        require_positive(&mut report, "sigma", params.sigma);
    } else if params.sigma != 0.0 {
        report
            .warnings
            .push(format!("sigma is ignored by variant {variant}"));
    }
    if variant == ModelVariant::Thermoacoustic && params.mu != 0.0 {
        report
            .warnings
            .push("mu is ignored by the thermoacoustic system".into());
    }
    report
}

/// Closed interval outside of which a signal is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// Scalar signal of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeSignal {
    #[default]
    Zero,
    Constant {
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<Window>,
    },
    /// `amplitude · sin(2π · frequency · t + phase)`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<Window>,
    },
    /// `amplitude` on `[start, start + width)`, zero elsewhere.
    Pulse { amplitude: f64, start: f64, width: f64 },
    /// Piecewise-linear interpolation of `(times[i], values[i])`.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl TimeSignal {
    pub fn sinusoid(amplitude: f64, frequency: f64) -> Self {
        Self::Sinusoid {
            amplitude,
            frequency,
            phase: 0.0,
            window: None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let gate = |w: &Option<Window>| w.is_none_or(|w| w.contains(t));
        Ok(match self {
            Self::Zero => 0.0,
            Self::Constant { amplitude, window } => {
                if gate(window) {
                    *amplitude
                } else {
                    0.0
                }
            }
            Self::Sinusoid {
                amplitude,
                frequency,
                phase,
                window,
            } => {
                if gate(window) {
                    amplitude * (2.0 * PI * frequency * t + phase).sin()
                } else {
                    0.0
                }
            }
            Self::Pulse {
                amplitude,
                start,
                width,
            } => {
                if t >= *start && t < start + width {
                    *amplitude
                } else {
                    0.0
                }
            }
            Self::Tabulated { times, values } => {
                let (i, s) = locate(times, t)?;
                if s == 0.0 {
                    values[i]
                } else {
                    values[i] + s * (values[i + 1] - values[i])
                }
            }
        })
    }

    /// True when the signal vanishes identically by construction.
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { amplitude, .. }
            | Self::Sinusoid { amplitude, .. }
            | Self::Pulse { amplitude, .. } => *amplitude == 0.0,
            Self::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    fn check(&self, name: &str, report: &mut ValidationReport) {
        let finite = |v: f64| v.is_finite();
        let window_ok = |w: &Option<Window>| {
            w.is_none_or(|w| finite(w.start) && finite(w.end) && w.start <= w.end)
        };
        match self {
            Self::Zero => {}
            Self::Constant { amplitude, window } => {
                if !finite(*amplitude) || !window_ok(window) {
                    report.violations.push(format!("{name}: non-finite constant or bad window"));
                }
            }
            Self::Sinusoid {
                amplitude,
                frequency,
                phase,
                window,
            } => {
                if !(finite(*amplitude) && finite(*frequency) && finite(*phase)) || !window_ok(window)
                {
                    report.violations.push(format!("{name}: non-finite sinusoid or bad window"));
                }
            }
            Self::Pulse {
                amplitude,
                start,
                width,
            } => {
                if !(finite(*amplitude) && finite(*start) && finite(*width) && *width >= 0.0) {
                    report.violations.push(format!("{name}: bad pulse"));
                }
            }
            Self::Tabulated { times, values } => {
                check_table(name, times, values.len(), report);
                if values.iter().any(|v| !v.is_finite()) {
                    report.violations.push(format!("{name}: non-finite table value"));
                }
            }
        }
    }
}

fn check_table(name: &str, times: &[f64], rows: usize, report: &mut ValidationReport) {
    if times.is_empty() {
        report.violations.push(format!("{name}: empty table"));
    }
    if times.len() != rows {
        report.violations.push(format!(
            "{name}: {} times but {rows} rows",
            times.len()
        ));
    }
    if times.windows(2).any(|p| !(p[1] > p[0])) || times.iter().any(|t| !t.is_finite()) {
        report
            .violations
            .push(format!("{name}: table times must be finite and strictly increasing"));
    }
}

/// Index and fractional offset of `t` inside a strictly increasing table.
fn locate(times: &[f64], t: f64) -> Result<(usize, f64)> {
    let (start, end) = match (times.first(), times.last()) {
        (Some(s), Some(e)) => (*s, *e),
        _ => return Err(Error::MalformedSignal("empty table".into())),
    };
    if !(t >= start && t <= end) {
        return Err(Error::OutsideTable { t, start, end });
    }
    if times.len() == 1 {
        return Ok((0, 0.0));
    }
    let i = match times.partition_point(|&x| x <= t) {
        0 => 0,
        p => (p - 1).min(times.len() - 2),
    };
    let s = (t - times[i]) / (times[i + 1] - times[i]);
    Ok((i, s))
}

/// Spatial shape multiplying a time signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpatialProfile {
    Uniform,
    /// `sin(mode · π · x)`.
    Sine { mode: f64 },
    /// One value per grid node.
    Nodal { values: Vec<f64> },
}

impl SpatialProfile {
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Self::Uniform => Ok(vec![1.0; grid.len()]),
            Self::Sine { mode } => Ok(grid.nodes().map(|x| (mode * PI * x).sin()).collect()),
            Self::Nodal { values } => {
                grid.check_len(values)?;
                Ok(values.clone())
            }
        }
    }
}

/// Distributed signal f(t, x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceTimeSignal {
    #[default]
    Zero,
    /// `time(t) · profile(x)`.
    Separable {
        time: TimeSignal,
        profile: SpatialProfile,
    },
    /// Nodal rows at the listed times, linear in time between rows.
    Tabulated {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl SpaceTimeSignal {
    pub fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Self::Zero => Ok(vec![0.0; grid.len()]),
            Self::Separable { time, profile } => {
                let g = time.eval(t)?;
                let mut phi = profile.sample(grid)?;
                phi.iter_mut().for_each(|v| *v *= g);
                Ok(phi)
            }
            Self::Tabulated { times, values } => {
                let (i, s) = locate(times, t)?;
                grid.check_len(&values[i])?;
                if s == 0.0 {
                    return Ok(values[i].clone());
                }
                grid.check_len(&values[i + 1])?;
                Ok(values[i]
                    .iter()
                    .zip(&values[i + 1])
                    .map(|(a, b)| a + s * (b - a))
                    .collect())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Separable { time, profile } => {
                time.is_zero()
                    || matches!(profile, SpatialProfile::Nodal { values } if values.iter().all(|v| *v == 0.0))
            }
            Self::Tabulated { values, .. } => values.iter().flatten().all(|v| *v == 0.0),
        }
    }

    fn check(&self, report: &mut ValidationReport) {
        match self {
            Self::Zero => {}
            Self::Separable { time, profile } => {
                time.check("f.time", report);
                match profile {
                    SpatialProfile::Sine { mode } if !mode.is_finite() => {
                        report.violations.push("f.profile: non-finite mode".into())
                    }
                    SpatialProfile::Nodal { values } if values.iter().any(|v| !v.is_finite()) => {
                        report.violations.push("f.profile: non-finite nodal value".into())
                    }
                    _ => {}
                }
            }
            Self::Tabulated { times, values } => {
                check_table("f", times, values.len(), report);
                if values.iter().flatten().any(|v| !v.is_finite()) {
                    report.violations.push("f: non-finite table value".into());
                }
            }
        }
    }
}

/// Declarative description of the disturbance inputs f(t, x) and d(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    #[serde(default)]
    pub f: SpaceTimeSignal,
    #[serde(default)]
    pub d: TimeSignal,
}

impl DisturbanceSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.d.is_zero()
    }

    /// Structural checks plus the variant's admissible inputs.
    pub fn check_against(&self, variant: ModelVariant) -> ValidationReport {
        let mut report = ValidationReport::default();
        self.f.check(&mut report);
        self.d.check("d", &mut report);
        if !variant.accepts_distributed_disturbance() && !self.f.is_zero() {
            report
                .violations
                .push(format!("variant {variant} admits no distributed disturbance f"));
        }
        if !variant.accepts_boundary_disturbance() && !self.d.is_zero() {
            report
                .violations
                .push(format!("variant {variant} admits no boundary disturbance d"));
        }
        report
    }
}

/// Samples f at the grid nodes and d at time `t`.
pub fn eval_disturbance(spec: &DisturbanceSpec, t: f64, grid: &Grid) -> Result<(Vec<f64>, f64)> {
    Ok((spec.f.sample(t, grid)?, spec.d.eval(t)?))
}

/// Named initial profile presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Zero,
    /// `amplitude · sin(wavenumber · π · x)`.
    Sine { amplitude: f64, wavenumber: f64 },
    /// `amplitude · exp(-((x - center) / width)²)`.
    GaussianPulse {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Smooth compactly supported bump `amplitude · exp(1 - 1/(1 - s²))`,
    /// `s = (x - center) / radius`.
    Bump {
        amplitude: f64,
        center: f64,
        radius: f64,
    },
    /// `Σ coefficients[j] · x^j`.
    Polynomial { coefficients: Vec<f64> },
    /// Piecewise linear through `(x[j], values[j])`, constant beyond the ends.
    Tabulated { x: Vec<f64>, values: Vec<f64> },
    Nodal { values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Sine {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * PI * x).sin(),
            Self::GaussianPulse {
                amplitude,
                center,
                width,
            } => {
                let s = (x - center) / width;
                amplitude * (-s * s).exp()
            }
            Self::Bump {
                amplitude,
                center,
                radius,
            } => {
                let s = (x - center) / radius;
                if s.abs() < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            Self::Tabulated { x: xs, values } => {
                let i = xs.partition_point(|xi| *xi <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
                values[i - 1] + s * (values[i] - values[i - 1])
            }
            // sampled directly in `sample`
            Self::Nodal { .. } => f64::NAN,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Self::Nodal { values } => {
                grid.check_len(values)?;
                Ok(values.clone())
            }
            Self::Tabulated { x, values } => {
                let ok = x.len() >= 2
                    && x.len() == values.len()
                    && x.windows(2).all(|p| p[1] > p[0])
                    && x.iter().chain(values).all(|v| v.is_finite());
                if !ok {
                    return Err(Error::MalformedSignal(
                        "tabulated profile needs >= 2 finite points with increasing x".into(),
                    ));
                }
                Ok(grid.nodes().map(|xi| self.eval(xi)).collect())
            }
            _ => Ok(grid.nodes().map(|x| self.eval(x)).collect()),
        }
    }
}

/// Initial data as profile descriptors, sampled onto a grid on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    #[serde(default)]
    pub u: Profile,
    #[serde(default)]
    pub w: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Profile>,
}

impl InitialDataSpec {
    /// Samples the profiles; θ defaults to zero for thermal variants.
    pub fn sample(&self, grid: &Grid, variant: ModelVariant) -> Result<InitialData> {
        let theta0 = if variant.has_thermal() {
            Some(match &self.theta {
                Some(p) => p.sample(grid)?,
                None => vec![0.0; grid.len()],
            })
        } else {
            None
        };
        Ok(InitialData {
            u0: self.u.sample(grid)?,
            w0: self.w.sample(grid)?,
            theta0,
        })
    }
}

/// Nodal initial data for a string model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub u0: Vec<f64>,
    pub w0: Vec<f64>,
    pub theta0: Option<Vec<f64>>,
}

impl InitialData {
    pub fn zero(grid: &Grid, variant: ModelVariant) -> Self {
        Self {
            u0: vec![0.0; grid.len()],
            w0: vec![0.0; grid.len()],
            theta0: variant.has_thermal().then(|| vec![0.0; grid.len()]),
        }
    }

    /// Pinned-end and temperature-boundary checks are violations; a mismatch
    /// with the damper condition at x = 1 is only a warning.
    pub fn check(
        &self,
        grid: &Grid,
        variant: ModelVariant,
        params: &PhysicalParams,
        d0: f64,
    ) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (name, field) in [("u0", &self.u0), ("w0", &self.w0)] {
            if field.len() != grid.len() {
                report.violations.push(format!(
                    "{name} has {} values, grid has {} nodes",
                    field.len(),
                    grid.len()
                ));
            }
        }
        if !report.is_ok() {
            return report;
        }
        let scale = |f: &[f64]| f.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if self.u0[0].abs() > 1e-9 * scale(&self.u0) {
            report.violations.push("u0(0) must be 0 (pinned end)".into());
        }
        if self.u0.iter().chain(&self.w0).any(|v| !v.is_finite()) {
            report.violations.push("initial data must be finite".into());
        }
        if variant.has_thermal() {
            match &self.theta0 {
                None => report
                    .violations
                    .push(format!("variant {variant} needs theta0")),
                Some(th) if th.len() != grid.len() => report
                    .violations
                    .push("theta0 length does not match grid".into()),
                Some(th) => {
                    let tol = 1e-9 * scale(th);
                    if th[0].abs() > tol || th[grid.n()].abs() > tol {
                        report
                            .violations
                            .push("theta0(0) and theta0(1) must be 0".into());
                    }
                }
            }
        }
        // damper compatibility u0'(1) = -a w0(1) + d(0)
        if let Ok(ux) = first_diff(grid, &self.u0) {
            let n = grid.n();
            let d = if variant.accepts_boundary_disturbance() { d0 } else { 0.0 };
            let residual = ux[n] + params.a * self.w0[n] - d;
            let h = grid.h();
            let tol = crate::SLACK_CONSTANT * h * h * (1.0 + ux[n].abs() + params.a * self.w0[n].abs());
            if residual.abs() > tol {
                report.warnings.push(format!(
                    "initial data incompatible with the damper condition at x = 1 (residual {residual:.3e}); expect reduced convergence order"
                ));
            }
        }
        report
    }

    /// Copy with the Dirichlet values set exactly.
    pub fn pinned(&self) -> Self {
        let mut out = self.clone();
        if let Some(first) = out.u0.first_mut() {
            *first = 0.0;
        }
        if let Some(first) = out.w0.first_mut() {
            *first = 0.0;
        }
        if let Some(th) = out.theta0.as_mut() {
            if let Some(first) = th.first_mut() {
                *first = 0.0;
            }
            if let Some(last) = th.last_mut() {
                *last = 0.0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, c: f64, mu: f64) -> PhysicalParams {
        PhysicalParams {
            a,
            c,
            mu,
            ..PhysicalParams::default()
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&params(1.0, 1.0, 0.0), ModelVariant::A).is_ok());

        let r = validate(&params(0.0, 1.0, 0.0), ModelVariant::A);
        assert_eq!(r.violations, vec!["a must be > 0".to_string()]);

        let p = PhysicalParams {
            a: 1.0,
            c: 1.0,
            mu: 0.1,
            b: 1.0,
            k: 1.0,
            lambda: 1.0,
            sigma: 0.0,
        };
        let r = validate(&p, ModelVariant::D);
        assert!(r.violations.contains(&"sigma must be > 0".to_string()));
    }

    #[test]
    fn validate_lists_every_violation() {
        let p = PhysicalParams {
            a: -1.0,
            c: 0.0,
            mu: -0.5,
            b: 0.0,
            k: 0.0,
            lambda: 0.0,
            sigma: 0.0,
        };
        let r = validate(&p, ModelVariant::D);
        assert_eq!(r.violations.len(), 7, "{:?}", r.violations);
    }

    #[test]
    fn validate_is_pure() {
        let p = PhysicalParams::golden();
        for v in [ModelVariant::A, ModelVariant::B, ModelVariant::C, ModelVariant::D] {
            assert_eq!(validate(&p, v), validate(&p, v));
        }
    }

    #[test]
    fn zero_spec_samples_zero() {
        let grid = Grid::new(8).unwrap();
        let (f, d) = eval_disturbance(&DisturbanceSpec::zero(), 3.7, &grid).unwrap();
        assert!(f.iter().all(|v| *v == 0.0));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn sinusoid_quarter_period() {
        let d = TimeSignal::sinusoid(1.0, 1.0);
        assert!((d.eval(0.25).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_sine_samples() {
        // N = 4 is below the solver minimum, so build the profile by hand.
        let x = [0.0, 0.25, 0.5, 0.75, 1.0];
        let got: Vec<f64> = x.iter().map(|x| (PI * x).sin()).collect();
        let expected = [0.0, 0.5_f64.sqrt(), 1.0, 0.5_f64.sqrt(), 0.0];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15);
        }
        let grid = Grid::new(8).unwrap();
        let spec = DisturbanceSpec {
            f: SpaceTimeSignal::Separable {
                time: TimeSignal::Constant {
                    amplitude: 1.0,
                    window: None,
                },
                profile: SpatialProfile::Sine { mode: 1.0 },
            },
            d: TimeSignal::Zero,
        };
        let (f, _) = eval_disturbance(&spec, 0.0, &grid).unwrap();
        assert!((f[4] - 1.0).abs() < 1e-15);
        assert!((f[2] - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!(f[0].abs() < 1e-15 && f[8].abs() < 1e-15);
    }

    #[test]
    fn tabulated_outside_table_is_error() {
        let d = TimeSignal::Tabulated {
            times: vec![0.0, 1.0],
            values: vec![0.0, 2.0],
        };
        assert_eq!(d.eval(0.5).unwrap(), 1.0);
        assert!(matches!(d.eval(1.5), Err(Error::OutsideTable { .. })));
        assert!(matches!(d.eval(-0.1), Err(Error::OutsideTable { .. })));
    }

    #[test]
    fn eval_is_deterministic() {
        let grid = Grid::new(32).unwrap();
        let spec = DisturbanceSpec {
            f: SpaceTimeSignal::Separable {
                time: TimeSignal::sinusoid(1.0, 3.0),
                profile: SpatialProfile::Sine { mode: 1.0 },
            },
            d: TimeSignal::sinusoid(1.0, 3.0),
        };
        let a = eval_disturbance(&spec, 0.123, &grid).unwrap();
        let b = eval_disturbance(&spec, 0.123, &grid).unwrap();
        assert_eq!(a.0.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   b.0.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn variant_d_rejects_boundary_disturbance() {
        let spec = DisturbanceSpec {
            f: SpaceTimeSignal::Zero,
            d: TimeSignal::sinusoid(1.0, 1.0),
        };
        assert!(!spec.check_against(ModelVariant::D).is_ok());
        assert!(spec.check_against(ModelVariant::B).is_ok());
        assert!(!spec.check_against(ModelVariant::A).is_ok());
    }

    #[test]
    fn compatibility_mismatch_is_a_warning() {
        let grid = Grid::new(64).unwrap();
        let p = PhysicalParams::default();
        // u0 = x has u0'(1) = 1 but w0 = 0
        let init = InitialDataSpec {
            u: Profile::Polynomial {
                coefficients: vec![0.0, 1.0],
            },
            ..Default::default()
        }
        .sample(&grid, ModelVariant::B)
        .unwrap();
        let r = init.check(&grid, ModelVariant::B, &p, 0.0);
        assert!(r.is_ok());
        assert_eq!(r.warnings.len(), 1);

        let compatible = InitialDataSpec {
            u: Profile::Sine {
                amplitude: 1.0,
                wavenumber: 0.5,
            },
            ..Default::default()
        }
        .sample(&grid, ModelVariant::B)
        .unwrap();
        assert!(compatible.check(&grid, ModelVariant::B, &p, 0.0).warnings.is_empty());
    }

    #[test]
    fn pinned_end_violation() {
        let grid = Grid::new(16).unwrap();
        let init = InitialDataSpec {
            u: Profile::Polynomial {
                coefficients: vec![1.0],
            },
            ..Default::default()
        }
        .sample(&grid, ModelVariant::C)
        .unwrap();
        let r = init.check(&grid, ModelVariant::C, &PhysicalParams::golden(), 0.0);
        assert!(r.violations.iter().any(|v| v.contains("pinned")));
    }

    #[test]
    fn tabulated_profile_interpolates_and_clamps() {
        let prof = Profile::Tabulated {
            x: vec![0.0, 0.5, 1.0],
            values: vec![0.0, 2.0, 1.0],
        };
        assert_eq!(prof.eval(0.25), 1.0);
        assert_eq!(prof.eval(0.75), 1.5);
        assert_eq!(prof.eval(-1.0), 0.0);
        assert_eq!(prof.eval(2.0), 1.0);

        let grid = Grid::new(8).unwrap();
        assert_eq!(prof.sample(&grid).unwrap()[4], 2.0);
        let backwards = Profile::Tabulated {
            x: vec![0.5, 0.0],
            values: vec![1.0, 1.0],
        };
        assert!(backwards.sample(&grid).is_err());
        let ragged = Profile::Tabulated {
            x: vec![0.0, 1.0],
            values: vec![1.0],
        };
        assert!(ragged.sample(&grid).is_err());
    }
}
