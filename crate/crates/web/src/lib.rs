//! WebAssembly bindings for the in-browser demo in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

use dampwave::PhysicalParams;
use demo::DemoSimulation;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn params_from(json: &str) -> Result<PhysicalParams, JsError> {
    serde_json::from_str(json).map_err(js_err)
}

fn variant_from(name: &str) -> Result<dampwave::ModelVariant, JsError> {
    demo::parse_variant(name).ok_or_else(|| JsError::new("variant must be A, B, C or D"))
}

/// A running simulation of one string model.
#[wasm_bindgen]
pub struct Simulation {
    inner: DemoSimulation,
}

#[wasm_bindgen]
impl Simulation {
    /// `params` is a JSON object such as `{"a":1,"c":1,"mu":0.5}`.
    #[wasm_bindgen(constructor)]
    pub fn new(
        variant: &str,
        params: &str,
        n: usize,
        amplitude: f64,
        frequency: f64,
    ) -> Result<Simulation, JsError> {
        let variant = variant_from(variant)?;
        let inputs = demo::sinusoidal_inputs(variant, amplitude, frequency);
        let inner = DemoSimulation::new(variant, &params_from(params)?, n, inputs).map_err(js_err)?;
        Ok(Self { inner })
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        self.inner.advance(steps).map_err(js_err)
    }

    pub fn time(&self) -> f64 {
        self.inner.state().t
    }

    pub fn u(&self) -> Vec<f64> {
        self.inner.state().u.clone()
    }

    pub fn w(&self) -> Vec<f64> {
        self.inner.state().w.clone()
    }

    /// Empty for models without temperature.
    pub fn theta(&self) -> Vec<f64> {
        self.inner.state().theta.clone().unwrap_or_default()
    }

    pub fn energy(&self) -> Result<f64, JsError> {
        self.inner.energy().map_err(js_err)
    }

    pub fn initial_energy(&self) -> f64 {
        self.inner.initial_energy()
    }

    pub fn lyapunov(&self) -> Result<f64, JsError> {
        self.inner.lyapunov().map_err(js_err)
    }

    /// Certified decay rate ω of the running model.
    pub fn omega(&self) -> f64 {
        self.inner.certificate().omega
    }
}

#[wasm_bindgen]
pub fn certificate_json(variant: &str, params: &str, r: f64) -> Result<String, JsError> {
    demo::certificate_json(variant_from(variant)?, &params_from(params)?, r).map_err(js_err)
}

/// `sigmas` must be positive and strictly descending.
#[wasm_bindgen]
pub fn sigma_sweep_json(params: &str, sigmas: Vec<f64>, r: f64) -> Result<String, JsError> {
    demo::sweep_json(&params_from(params)?, &sigmas, r).map_err(js_err)
}
