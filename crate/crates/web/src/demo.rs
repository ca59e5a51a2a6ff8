//! Browser-independent state behind the wasm bindings.

use dampwave::functionals::{energy_e, lyapunov_v, theorem_for};
use dampwave::harness::sigma_sweep;
use dampwave::solver::{default_dt, StringSolver};
use dampwave::{
    DisturbanceSpec, Grid, InitialDataSpec, IssCertificate, ModelVariant, PhysicalParams, Profile,
    Result, SpaceTimeSignal, SpatialProfile, StringState, TimeSignal,
};

/// Parses `"A"`..`"D"` (case-insensitive).
pub fn parse_variant(name: &str) -> Option<ModelVariant> {
    match name.trim().to_ascii_uppercase().as_str() {
        "A" => Some(ModelVariant::A),
        "B" => Some(ModelVariant::B),
        "C" => Some(ModelVariant::C),
        "D" => Some(ModelVariant::D),
        _ => None,
    }
}

/// Sinusoidal f (uniform in x) and, where admitted, d of the same shape.
pub fn sinusoidal_inputs(variant: ModelVariant, amplitude: f64, frequency: f64) -> DisturbanceSpec {
    if amplitude == 0.0 || variant == ModelVariant::A {
        return DisturbanceSpec::zero();
    }
    DisturbanceSpec {
        f: SpaceTimeSignal::Separable {
            time: TimeSignal::sinusoid(amplitude, frequency),
            profile: SpatialProfile::Uniform,
        },
        d: if variant.accepts_boundary_disturbance() {
            TimeSignal::sinusoid(amplitude, frequency)
        } else {
            TimeSignal::Zero
        },
    }
}

/// A plucked string: bump displacement, at rest, warm in the middle.
pub fn plucked(variant: ModelVariant) -> InitialDataSpec {
    InitialDataSpec {
        u: Profile::Bump {
            amplitude: 1.0,
            center: 0.5,
            radius: 0.3,
        },
        w: Profile::Zero,
        theta: variant.has_thermal().then_some(Profile::Sine {
            amplitude: 0.5,
            wavenumber: 1.0,
        }),
    }
}

pub struct DemoSimulation {
    solver: StringSolver,
    state: StringState,
    inputs: DisturbanceSpec,
    certificate: IssCertificate,
    e0: f64,
}

impl DemoSimulation {
    pub fn new(
        variant: ModelVariant,
        params: &PhysicalParams,
        n: usize,
        inputs: DisturbanceSpec,
    ) -> Result<Self> {
        let grid = Grid::new(n)?;
        let solver = StringSolver::new(variant, params, &grid, default_dt(&grid, params.c))?;
        let state = StringState::from_init(&plucked(variant).sample(&grid, variant)?);
        let certificate = theorem_for(variant)?.certificate(params, 1.0)?;
        let e0 = energy_e(variant, params, &grid, &state)?;
        Ok(Self {
            solver,
            state,
            inputs,
            certificate,
            e0,
        })
    }

    pub fn advance(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.state = self.solver.step(&self.state, &self.inputs)?;
        }
        Ok(())
    }

    pub fn state(&self) -> &StringState {
        &self.state
    }

    pub fn energy(&self) -> Result<f64> {
        energy_e(self.solver.variant(), self.solver.params(), self.solver.grid(), &self.state)
    }

    pub fn initial_energy(&self) -> f64 {
        self.e0
    }

    pub fn lyapunov(&self) -> Result<f64> {
        let s = &self.solver;
        Ok(lyapunov_v(s.variant(), s.params(), s.grid(), &self.state, &self.certificate)?.v)
    }

    pub fn certificate(&self) -> &IssCertificate {
        &self.certificate
    }
}

/// Certificate JSON for the theorem covering `variant`.
pub fn certificate_json(variant: ModelVariant, params: &PhysicalParams, r: f64) -> Result<String> {
    Ok(theorem_for(variant)?.certificate(params, r)?.to_json())
}

/// Theorem-3 gains over a descending σ list, as JSON.
pub fn sweep_json(params: &PhysicalParams, sigmas: &[f64], r: f64) -> Result<String> {
    let sweep = sigma_sweep(params, sigmas, r)?;
    Ok(serde_json::to_string(&sweep).expect("sweep serializes"))
}
