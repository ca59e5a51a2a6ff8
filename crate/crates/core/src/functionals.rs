//! Energies, Lyapunov functionals and state norms on discrete states.
//!
//! Every integral uses the trapezoid rule; `u_x` comes from [`first_diff`]
//! and `u_xx` from [`second_diff`] with the damper closure at x = 1.

use serde::Serialize;

use crate::certificates::{IssCertificate, Theorem};
use crate::discretize::{first_diff, norm_sq, second_diff, trapezoid, Grid, RobinClosure};
use crate::error::{Error, Result};
use crate::model::{ModelVariant, PhysicalParams};
use crate::solver::StringState;

/// Individual terms of the functionals, before weighting.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Components {
    /// `∫ w²`
    pub w_sq: f64,
    /// `∫ u_x²`
    pub ux_sq: f64,
    /// `∫ θ²`, thermal variants only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_sq: Option<f64>,
    /// `w(1)²`, model D only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_end_sq: Option<f64>,
    /// `½ ∫ e^{rx} (w + c u_x)²`
    pub phi_plus: f64,
    /// `½ ∫ e^{-rx} (w - c u_x)²`
    pub phi_minus: f64,
    /// `(B/2) w(1)²`, model D only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_boundary: Option<f64>,
}

/// Values of E, Φ, W and V on one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub e: f64,
    pub phi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_kv: Option<f64>,
    pub v: f64,
    pub components: Components,
}

/// The theorem whose functionals apply to a variant.
pub fn theorem_for(variant: ModelVariant) -> Result<Theorem> {
    match variant {
        ModelVariant::A | ModelVariant::B => Ok(Theorem::One),
        ModelVariant::C => Ok(Theorem::Two),
        ModelVariant::D => Ok(Theorem::Three),
        ModelVariant::Thermoacoustic => Err(Error::InvalidSetup(
            "the thermoacoustic system has no Lyapunov certificate".into(),
        )),
    }
}

fn require_theta(variant: ModelVariant, state: &StringState) -> Result<Option<&[f64]>> {
    match (&state.theta, variant.has_thermal()) {
        (Some(th), true) => Ok(Some(th)),
        (None, true) => Err(Error::MissingTemperature(variant.to_string())),
        _ => Ok(None),
    }
}

fn components(
    variant: ModelVariant,
    p: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
    r: f64,
) -> Result<Components> {
    state.check(grid, variant)?;
    let theta = require_theta(variant, state)?;
    let ux = first_diff(grid, &state.u)?;
    let plus: Vec<f64> = grid
        .nodes()
        .enumerate()
        .map(|(i, x)| (r * x).exp() * (state.w[i] + p.c * ux[i]).powi(2))
        .collect();
    let minus: Vec<f64> = grid
        .nodes()
        .enumerate()
        .map(|(i, x)| (-r * x).exp() * (state.w[i] - p.c * ux[i]).powi(2))
        .collect();
    let w_end = state.w[grid.n()];
    let kv = variant == ModelVariant::D;
    Ok(Components {
        w_sq: norm_sq(grid, &state.w),
        ux_sq: norm_sq(grid, &ux),
        theta_sq: theta.map(|th| norm_sq(grid, th)),
        w_end_sq: kv.then_some(w_end * w_end),
        phi_plus: 0.5 * trapezoid(grid, &plus),
        phi_minus: 0.5 * trapezoid(grid, &minus),
        phi_boundary: kv.then(|| 0.5 * boundary_coefficient(p, r) * w_end * w_end),
    })
}

/// `B = aσ (e^r (1 - ac) + e^{-r} (1 + ac))`.
pub fn boundary_coefficient(p: &PhysicalParams, r: f64) -> f64 {
    p.a * p.sigma * (r.exp() * (1.0 - p.a * p.c) + (-r).exp() * (1.0 + p.a * p.c))
}

fn energy_from(variant: ModelVariant, p: &PhysicalParams, c: &Components) -> f64 {
    let mut e = 0.5 * c.w_sq + 0.5 * p.c * p.c * c.ux_sq;
    if variant.has_thermal() {
        e += p.b / (2.0 * p.lambda) * c.theta_sq.unwrap_or(0.0);
    }
    if variant == ModelVariant::D {
        e += 0.5 * p.a * p.sigma * c.w_end_sq.unwrap_or(0.0);
    }
    e
}

/// Variant-appropriate energy functional E.
pub fn energy_e(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
) -> Result<f64> {
    let p = params.effective(variant);
    Ok(energy_from(variant, &p, &components(variant, &p, grid, state, 0.0)?))
}

/// Weighted characteristic functional Φ (with the `B w(1)²/2` term for model D).
pub fn phi(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
    r: f64,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveR(r));
    }
    let p = params.effective(variant);
    let c = components(variant, &p, grid, state, r)?;
    Ok(c.phi_plus + c.phi_minus + c.phi_boundary.unwrap_or(0.0))
}

/// Damper closure `u_x(1) = -a w(1)` used for `u_xx` in model D.
pub fn damper_closure(params: &PhysicalParams, state: &StringState) -> RobinClosure {
    RobinClosure::damper(params.a, *state.w.last().unwrap_or(&0.0), 0.0)
}

/// `½ ∫ (w - σ u_xx)²` with `u_xx` from [`second_diff`] under `closure`.
pub fn w_kv(grid: &Grid, state: &StringState, sigma: f64, closure: RobinClosure) -> Result<f64> {
    let uxx = second_diff(grid, &state.u, closure)?;
    let diff: Vec<f64> = state
        .w
        .iter()
        .zip(&uxx)
        .map(|(w, s)| (w - sigma * s).powi(2))
        .collect();
    Ok(0.5 * trapezoid(grid, &diff))
}

/// Lyapunov functional of the certificate's theorem, with its components.
pub fn lyapunov_v(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
    cert: &IssCertificate,
) -> Result<FunctionalValue> {
    let p = params.effective(variant);
    cert.check_matches(variant, &p)?;
    let c = components(variant, &p, grid, state, cert.r)?;
    let e = energy_from(variant, &p, &c);
    let phi = c.phi_plus + c.phi_minus + c.phi_boundary.unwrap_or(0.0);
    let (w, v) = match cert.r_cap {
        Some(r_cap) => {
            let w = w_kv(grid, state, p.sigma, damper_closure(&p, state))?;
            (Some(w), phi + r_cap * w + cert.m * e)
        }
        None => (None, phi + cert.m * e),
    };
    Ok(FunctionalValue {
        e,
        phi,
        w_kv: w,
        v,
        components: c,
    })
}

/// L² norms entering the left-hand sides of the ISS estimates.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NormRecord {
    pub w: f64,
    pub u_x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_xx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// `|w(1)|`, model D only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_end: Option<f64>,
}

impl NormRecord {
    /// Square root of the sum of the recorded squared norms.
    pub fn lhs(&self) -> f64 {
        let extra = [self.u_xx, self.theta, self.w_end]
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>();
        (self.w * self.w + self.u_x * self.u_x + extra).sqrt()
    }
}

/// Norms of `w`, `u_x` and, as the variant requires, `θ`, `u_xx` and `w(1)`.
pub fn state_norms(
    variant: ModelVariant,
    params: &PhysicalParams,
    grid: &Grid,
    state: &StringState,
) -> Result<NormRecord> {
    state.check(grid, variant)?;
    let theta = require_theta(variant, state)?;
    let ux = first_diff(grid, &state.u)?;
    let kv = variant == ModelVariant::D;
    let u_xx = if kv {
        let uxx = second_diff(grid, &state.u, damper_closure(params, state))?;
        Some(norm_sq(grid, &uxx).sqrt())
    } else {
        None
    };
    Ok(NormRecord {
        w: norm_sq(grid, &state.w).sqrt(),
        u_x: norm_sq(grid, &ux).sqrt(),
        u_xx,
        theta: theta.map(|th| norm_sq(grid, th).sqrt()),
        w_end: kv.then(|| state.w[grid.n()].abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{thm1_certificate, thm3_certificate};
    use std::f64::consts::PI;

    fn state(grid: &Grid, u: impl Fn(f64) -> f64, w: impl Fn(f64) -> f64, thermal: bool) -> StringState {
        StringState {
            t: 0.0,
            u: grid.nodes().map(&u).collect(),
            w: grid.nodes().map(&w).collect(),
            theta: thermal.then(|| vec![0.0; grid.len()]),
        }
    }

    #[test]
    fn zero_state_is_zero() {
        let g = Grid::new(16).unwrap();
        let p = PhysicalParams::golden();
        for v in [ModelVariant::A, ModelVariant::B, ModelVariant::C, ModelVariant::D] {
            let s = StringState::zero(&g, v);
            let q = if v == ModelVariant::A { PhysicalParams { mu: 0.0, ..p } } else { p };
            assert_eq!(energy_e(v, &q, &g, &s).unwrap(), 0.0);
            assert_eq!(phi(v, &q, &g, &s, 1.0).unwrap(), 0.0);
            assert_eq!(state_norms(v, &q, &g, &s).unwrap().lhs(), 0.0);
        }
        let s = StringState::zero(&g, ModelVariant::D);
        let cert = thm3_certificate(&p, 1.0).unwrap();
        assert_eq!(lyapunov_v(ModelVariant::D, &p, &g, &s, &cert).unwrap().v, 0.0);
    }

    #[test]
    fn unit_velocity_energy() {
        let g = Grid::new(16).unwrap();
        let p = PhysicalParams::default();
        let s = state(&g, |_| 0.0, |_| 1.0, false);
        assert!((energy_e(ModelVariant::A, &p, &g, &s).unwrap() - 0.5).abs() < 1e-14);
        assert!((energy_e(ModelVariant::B, &p, &g, &s).unwrap() - 0.5).abs() < 1e-14);

        let pd = PhysicalParams {
            a: 2.0,
            c: 1.0,
            mu: 0.0,
            b: 1.0,
            k: 1.0,
            lambda: 1.0,
            sigma: 0.5,
        };
        let s = state(&g, |_| 0.0, |_| 1.0, true);
        assert!((energy_e(ModelVariant::D, &pd, &g, &s).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_of_unit_velocity() {
        let r = 1.0_f64;
        let expected = r.sinh() / r;
        let mut prev = f64::INFINITY;
        for n in [32, 64, 128] {
            let g = Grid::new(n).unwrap();
            let s = state(&g, |_| 0.0, |_| 1.0, false);
            let err = (phi(ModelVariant::B, &PhysicalParams::golden(), &g, &s, r).unwrap() - expected).abs();
            assert!(err < g.h() * g.h());
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn phi_rejects_nonpositive_r() {
        let g = Grid::new(16).unwrap();
        let s = StringState::zero(&g, ModelVariant::B);
        assert!(matches!(
            phi(ModelVariant::B, &PhysicalParams::golden(), &g, &s, 0.0),
            Err(Error::NonPositiveR(_))
        ));
    }

    #[test]
    fn kelvin_voigt_functional() {
        let g = Grid::new(32).unwrap();
        let zero = StringState::zero(&g, ModelVariant::D);
        assert_eq!(w_kv(&g, &zero, 1.0, RobinClosure { slope: 0.0 }).unwrap(), 0.0);

        // u = x²/2 has u_x(1) = 1; the closure carries that slope
        let s = state(&g, |x| 0.5 * x * x, |_| 0.0, true);
        let v = w_kv(&g, &s, 1.0, RobinClosure { slope: 1.0 }).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "{v}");

        // w = σ u_xx pointwise
        let sigma = 0.5;
        let mut s = state(&g, |x| 0.5 * x * x, |_| 0.0, true);
        let uxx = second_diff(&g, &s.u, RobinClosure { slope: 1.0 }).unwrap();
        s.w = uxx.iter().map(|v| sigma * v).collect();
        assert!(w_kv(&g, &s, sigma, RobinClosure { slope: 1.0 }).unwrap() < 1e-24);
    }

    #[test]
    fn sine_velocity_norm() {
        for n in [32, 64] {
            let g = Grid::new(n).unwrap();
            let s = state(&g, |x| x, |x| (PI * x).sin(), false);
            let rec = state_norms(ModelVariant::B, &PhysicalParams::golden(), &g, &s).unwrap();
            assert!((rec.w - 0.5_f64.sqrt()).abs() < g.h() * g.h());
            assert!((rec.u_x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_theta_is_error() {
        let g = Grid::new(16).unwrap();
        let s = StringState::zero(&g, ModelVariant::B);
        assert!(matches!(
            energy_e(ModelVariant::C, &PhysicalParams::golden(), &g, &s),
            Err(Error::MissingTemperature(_))
        ));
    }

    #[test]
    fn certificate_variant_mismatch() {
        let g = Grid::new(16).unwrap();
        let p = PhysicalParams::golden();
        let cert = thm1_certificate(&p.effective(ModelVariant::B), 1.0).unwrap();
        let s = StringState::zero(&g, ModelVariant::D);
        assert!(matches!(
            lyapunov_v(ModelVariant::D, &p, &g, &s, &cert),
            Err(Error::CertificateMismatch(_))
        ));
    }

    #[test]
    fn v_is_its_combination() {
        let g = Grid::new(64).unwrap();
        let p = PhysicalParams::golden();
        let mut s = state(&g, |x| (0.5 * PI * x).sin(), |x| x * (1.0 - x), true);
        s.theta = Some(g.nodes().map(|x| (PI * x).sin()).collect());
        let cert = thm3_certificate(&p, 1.0).unwrap();
        let fv = lyapunov_v(ModelVariant::D, &p, &g, &s, &cert).unwrap();
        let recombined = fv.phi + cert.r_cap.unwrap() * fv.w_kv.unwrap() + cert.m * fv.e;
        assert!((fv.v - recombined).abs() <= 1e-14 * fv.v);
    }
}
