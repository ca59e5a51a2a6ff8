//! Manufactured solutions with `e^{-t}` time dependence.
//!
//! The displacement (or velocity) profile is `φ(x) = sin(πx/2) + q x²`; `q`
//! is chosen so that the damper condition at x = 1 holds exactly when the
//! model has no boundary input (`q = 0` otherwise, with the residual fed
//! through `d`). The temperature is `e^{-t} sin(πx)`; heat sources close the
//! temperature equation.

use std::f64::consts::PI;

use crate::discretize::Grid;
use crate::error::{Error, Result};
use crate::harness::{check_n_list, ConvergenceRow, ConvergenceTable};
use crate::model::{ModelVariant, PhysicalParams, ThermoacousticParams};
use crate::solver::{
    default_dt, ForcingSource, StringForcing, StringSolver, StringState, ThermoForcing,
    ThermoForcingSource, ThermoState, ThermoacousticSolver,
};

#[derive(Debug, Clone, Copy)]
struct Profile {
    q: f64,
}

impl Profile {
    /// `q` making `φ'(1) = a φ(1)`, i.e. `u_x(1) = -a u_t(1)` for `u = e^{-t} φ`.
    fn matched(a: f64) -> Result<Self> {
        if (a - 2.0).abs() < 1e-12 {
            return Err(Error::InvalidSetup(
                "the manufactured profile needs a != 2".into(),
            ));
        }
        Ok(Self { q: a / (2.0 - a) })
    }

    fn phi(&self, x: f64) -> f64 {
        (0.5 * PI * x).sin() + self.q * x * x
    }

    fn dphi(&self, x: f64) -> f64 {
        0.5 * PI * (0.5 * PI * x).cos() + 2.0 * self.q * x
    }

    fn ddphi(&self, x: f64) -> f64 {
        -0.25 * PI * PI * (0.5 * PI * x).sin() + 2.0 * self.q
    }
}

/// Exact solution and forcing for models B, C and D.
#[derive(Debug, Clone)]
pub struct StringMms {
    variant: ModelVariant,
    params: PhysicalParams,
    profile: Profile,
}

impl StringMms {
    pub fn new(variant: ModelVariant, params: &PhysicalParams) -> Result<Self> {
        let profile = match variant {
            ModelVariant::B | ModelVariant::C => Profile { q: 0.0 },
            ModelVariant::D => Profile::matched(params.a)?,
            _ => {
                return Err(Error::InvalidSetup(format!(
                    "no manufactured solution for variant {variant}"
                )))
            }
        };
        Ok(Self {
            variant,
            params: params.effective(variant),
            profile,
        })
    }

    pub fn exact(&self, t: f64, grid: &Grid) -> StringState {
        let e = (-t).exp();
        StringState {
            t,
            u: grid.nodes().map(|x| e * self.profile.phi(x)).collect(),
            w: grid.nodes().map(|x| -e * self.profile.phi(x)).collect(),
            theta: self
                .variant
                .has_thermal()
                .then(|| grid.nodes().map(|x| e * (PI * x).sin()).collect()),
        }
    }
}

impl ForcingSource for StringMms {
    fn sample(&self, t: f64, grid: &Grid) -> Result<StringForcing> {
        let p = &self.params;
        let e = (-t).exp();
        let f = grid
            .nodes()
            .map(|x| {
                let (phi, dd) = (self.profile.phi(x), self.profile.ddphi(x));
                e * phi - p.c * p.c * e * dd - p.mu * e * phi
                    + p.sigma * e * dd
                    + p.b * PI * e * (PI * x).cos()
            })
            .collect();
        let d = e * self.profile.dphi(1.0) - p.a * e * self.profile.phi(1.0);
        let heat = self.variant.has_thermal().then(|| {
            grid.nodes()
                .map(|x| {
                    let s = (PI * x).sin();
                    -e * s + p.k * PI * PI * e * s - p.lambda * e * self.profile.dphi(x)
                })
                .collect()
        });
        Ok(StringForcing { f, d, heat })
    }
}

/// Max nodal displacement error at `t_end` against the manufactured solution,
/// unit Courant number on every grid.
pub fn mms_study(
    variant: ModelVariant,
    params: &PhysicalParams,
    n_list: &[usize],
    t_end: f64,
) -> Result<ConvergenceTable> {
    let grids = check_n_list(n_list, 2)?;
    let mms = StringMms::new(variant, params)?;
    let rows = grids
        .iter()
        .map(|grid| {
            let dt = default_dt(grid, params.c);
            let solver = StringSolver::new(variant, params, grid, dt)?;
            let tr = solver.run(&mms.exact(0.0, grid), &mms, t_end)?;
            let last = tr.states.last().expect("initial state stored");
            let exact = mms.exact(last.t, grid);
            let error = last
                .u
                .iter()
                .zip(&exact.u)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                n: grid.n(),
                h: grid.h(),
                dt,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows("exact", rows))
}

/// Exact solution and sources for the thermoacoustic system:
/// `v = e^{-t} φ`, `ρ = γ e^{-t} φ'`, `θ = e^{-t} sin(πx)`.
#[derive(Debug, Clone)]
pub struct ThermoMms {
    params: ThermoacousticParams,
    profile: Profile,
}

impl ThermoMms {
    pub fn new(params: &ThermoacousticParams) -> Result<Self> {
        Ok(Self {
            params: *params,
            profile: Profile::matched(params.a)?,
        })
    }

    pub fn exact(&self, t: f64, grid: &Grid) -> ThermoState {
        let e = (-t).exp();
        ThermoState {
            t,
            rho: grid
                .nodes()
                .map(|x| self.params.gamma * e * self.profile.dphi(x))
                .collect(),
            v: grid.nodes().map(|x| e * self.profile.phi(x)).collect(),
            theta: grid.nodes().map(|x| e * (PI * x).sin()).collect(),
        }
    }
}

impl ThermoForcingSource for ThermoMms {
    fn sample(&self, t: f64, grid: &Grid) -> Result<ThermoForcing> {
        let p = &self.params;
        let e = (-t).exp();
        Ok(ThermoForcing {
            v: grid
                .nodes()
                .map(|x| {
                    let dd = self.profile.ddphi(x);
                    -e * self.profile.phi(x) + p.c * p.c * e * dd + p.b * PI * e * (PI * x).cos()
                        - p.sigma * e * dd
                })
                .collect(),
            theta: grid
                .nodes()
                .map(|x| {
                    let s = (PI * x).sin();
                    -e * s + p.lambda * e * self.profile.dphi(x) + p.k * PI * PI * e * s
                })
                .collect(),
        })
    }
}

/// Max nodal velocity error at `t_end` for the thermoacoustic solver.
pub fn thermo_mms_study(
    params: &ThermoacousticParams,
    n_list: &[usize],
    t_end: f64,
) -> Result<ConvergenceTable> {
    let grids = check_n_list(n_list, 2)?;
    let mms = ThermoMms::new(params)?;
    let rows = grids
        .iter()
        .map(|grid| {
            let dt = default_dt(grid, params.c);
            let solver = ThermoacousticSolver::new(params, grid, dt)?;
            let tr = solver.run(&mms.exact(0.0, grid), Some(&mms), t_end)?;
            let last = tr.states.last().expect("initial state stored");
            let exact = mms.exact(last.t, grid);
            let error = last
                .v
                .iter()
                .zip(&exact.v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                n: grid.n(),
                h: grid.h(),
                dt,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows("exact", rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_b_boundary_input_is_closed_form() {
        let p = PhysicalParams::golden();
        let mms = StringMms::new(ModelVariant::B, &p).unwrap();
        let grid = Grid::new(16).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let fc = mms.sample(t, &grid).unwrap();
            assert!((fc.d + p.a * (-t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn model_d_needs_no_boundary_input() {
        let mms = StringMms::new(ModelVariant::D, &PhysicalParams::golden()).unwrap();
        let grid = Grid::new(16).unwrap();
        assert!(mms.sample(0.3, &grid).unwrap().d.abs() < 1e-14);
    }

    #[test]
    fn rejects_a_equal_two() {
        let p = PhysicalParams {
            a: 2.0,
            ..PhysicalParams::golden()
        };
        assert!(StringMms::new(ModelVariant::D, &p).is_err());
        assert!(StringMms::new(ModelVariant::A, &PhysicalParams::default()).is_err());
    }
}
