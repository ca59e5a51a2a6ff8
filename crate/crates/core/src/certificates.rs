//! Closed-form constants of the three ISS theorems and the choice of `r`.
//!
//! Every `max`/`min` in the formulas is recorded as a [`Branch`] so the
//! chosen argument can be audited from the serialized certificate.

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::functionals::theorem_for;
use crate::model::{validate, ModelVariant, PhysicalParams};

/// Safety factor applied to the largest of the six lower bounds on M (Theorem 3).
pub const THM3_MARGIN: f64 = 1.01;

/// Resolution of the final grid pass of [`optimize_r`].
pub const R_GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Viscous damping with boundary and distributed inputs.
    One,
    /// Adds thermal damping.
    Two,
    /// Adds Kelvin-Voigt damping; distributed input only.
    Three,
}

impl Theorem {
    pub fn number(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
        }
    }

    /// The model variant whose parameter constraints the theorem assumes.
    pub fn variant(self) -> ModelVariant {
        match self {
            Self::One => ModelVariant::B,
            Self::Two => ModelVariant::C,
            Self::Three => ModelVariant::D,
        }
    }

    pub fn certificate(self, params: &PhysicalParams, r: f64) -> Result<IssCertificate> {
        match self {
            Self::One => thm1_certificate(params, r),
            Self::Two => thm2_certificate(params, r),
            Self::Three => thm3_certificate(params, r),
        }
    }
}

impl Serialize for Theorem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

/// One argument of a `max`/`min`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub value: f64,
}

/// Record of a `max`/`min` evaluation and the argument that won.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub quantity: String,
    pub op: String,
    pub candidates: Vec<Candidate>,
    pub active: String,
}

impl Branch {
    fn eval(quantity: &str, take_max: bool, items: &[(&str, f64)]) -> (f64, Branch) {
        let mut best = 0;
        for (i, (_, v)) in items.iter().enumerate() {
            let better = if take_max { *v > items[best].1 } else { *v < items[best].1 };
            if better {
                best = i;
            }
        }
        let branch = Branch {
            quantity: quantity.to_string(),
            op: if take_max { "max" } else { "min" }.to_string(),
            candidates: items
                .iter()
                .map(|(l, v)| Candidate {
                    label: l.to_string(),
                    value: *v,
                })
                .collect(),
            active: items[best].0.to_string(),
        };
        (items[best].1, branch)
    }

    /// Recomputes the `max`/`min` from the stored candidates.
    pub fn recompute(&self) -> f64 {
        let vals = self.candidates.iter().map(|c| c.value);
        if self.op == "max" {
            vals.fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.fold(f64::INFINITY, f64::min)
        }
    }
}

/// How far the chosen M sits above one of its lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintMargin {
    pub label: String,
    pub bound: f64,
    pub strict: bool,
    /// `M - bound`.
    pub absolute: f64,
    /// `(M - bound) / |bound|`.
    pub relative: f64,
}

/// Constants of one theorem at one value of `r`, with the inputs echoed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssCertificate {
    pub theorem: Theorem,
    /// Parameters with the constants the theorem does not use set to zero.
    pub params: PhysicalParams,
    pub r: f64,
    pub m: f64,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b_coef: Option<f64>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r_cap: Option<f64>,
    /// Lower sandwich coefficient: V ≥ lower · (squared state norm).
    pub sandwich_lower: f64,
    /// Upper sandwich coefficient: V ≤ upper · (squared state norm).
    pub sandwich_upper: f64,
    #[serde(rename = "C1", skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(rename = "C2", skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_rate: Option<f64>,
    pub omega: f64,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "K1", skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(rename = "K2", skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    /// Coefficient of `‖f‖²` in `dV/dt ≤ -2ωV + f_rate ‖f‖² + d_rate |d|²`.
    pub f_rate: f64,
    /// Coefficient of `|d|²` in the same differential inequality.
    pub d_rate: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    pub branches: Vec<Branch>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub margins: Vec<ConstraintMargin>,
    /// How G and the gains are assembled from the sandwich bounds.
    pub assembly: String,
}

impl IssCertificate {
    /// Errors unless the certificate was produced for this variant's theorem
    /// and these (effective) parameters.
    pub fn check_matches(&self, variant: ModelVariant, params: &PhysicalParams) -> Result<()> {
        let expected = theorem_for(variant)?;
        if expected != self.theorem {
            return Err(Error::CertificateMismatch(format!(
                "variant {variant} needs theorem {}, certificate is for theorem {}",
                expected.number(),
                self.theorem.number()
            )));
        }
        let p = params.effective(self.theorem.variant());
        if p != self.params {
            return Err(Error::CertificateMismatch(format!(
                "certificate parameters {:?} differ from {:?}",
                self.params, p
            )));
        }
        Ok(())
    }

    /// Gain on `sup ‖f‖` (γ₁ for Theorems 1-2, γ for Theorem 3).
    pub fn gain_f(&self) -> f64 {
        self.gamma1.or(self.gamma).unwrap_or(0.0)
    }

    /// Gain on `sup |d|` (zero for Theorem 3).
    pub fn gain_d(&self) -> f64 {
        self.gamma2.unwrap_or(0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn check_inputs(theorem: Theorem, params: &PhysicalParams, r: f64) -> Result<PhysicalParams> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::NonPositiveR(r));
    }
    let variant = theorem.variant();
    validate(params, variant).into_result()?;
    Ok(params.effective(variant))
}

/// `(2/(ac)) (e^r (1-ac)² - e^{-r} (1+ac)²)`; the boundary lower bound on M.
fn boundary_bound(p: &PhysicalParams, r: f64) -> f64 {
    let ac = p.a * p.c;
    2.0 / ac * (r.exp() * (1.0 - ac).powi(2) - (-r).exp() * (1.0 + ac).powi(2))
}

/// `c² (M/(2a) + 4 (cosh r - ac sinh r)² / (aM) + c sinh r)`.
fn d_rate(p: &PhysicalParams, r: f64, m: f64) -> f64 {
    let ac = p.a * p.c;
    p.c * p.c
        * (m / (2.0 * p.a) + 4.0 * (r.cosh() - ac * r.sinh()).powi(2) / (p.a * m) + p.c * r.sinh())
}

/// Theorem 1 (model B, and model A as the case μ = 0, f = d = 0).
pub fn thm1_certificate(params: &PhysicalParams, r: f64) -> Result<IssCertificate> {
    let p = check_inputs(Theorem::One, params, r)?;
    let c = p.c;
    let (m, bm) = Branch::eval(
        "M",
        true,
        &[
            ("viscous: 2(1+mu)cosh(r)/(cr)", 2.0 * (1.0 + p.mu) * r.cosh() / (c * r)),
            ("boundary: (2/(ac))(e^r(1-ac)^2 - e^-r(1+ac)^2)", boundary_bound(&p, r)),
        ],
    );
    let em = (-r).exp();
    let omega = c * r * em / (4.0 * (m + 2.0 * em));
    let f_rate = (2.0 * (1.0 + p.mu) + m * m) * r.cosh() / (c * r);
    let d_rate = d_rate(&p, r, m);
    let k1 = f_rate / (2.0 * omega);
    let k2 = d_rate / (2.0 * omega);
    let (cmax, bcmax) = Branch::eval("max(1,c^2)", true, &[("1", 1.0), ("c^2", c * c)]);
    let (cmin, bcmin) = Branch::eval("min(1,c^2)", false, &[("1", 1.0), ("c^2", c * c)]);
    let g = ((m + 2.0 * r.exp()) / (m + 2.0 * em)).sqrt() * (cmax / cmin).sqrt();
    let gamma1 = (2.0 * k1 / ((m + 2.0 * em) * cmin)).sqrt();
    let gamma2 = gamma1 * (k2 / k1).sqrt();
    Ok(IssCertificate {
        theorem: Theorem::One,
        params: p,
        r,
        m,
        b_coef: None,
        q: None,
        r_cap: None,
        sandwich_lower: m / 2.0 + em,
        sandwich_upper: m / 2.0 + r.exp(),
        c1: None,
        c2: None,
        phi_rate: None,
        omega,
        k: None,
        k1: Some(k1),
        k2: Some(k2),
        f_rate,
        d_rate,
        g,
        gamma: None,
        gamma1: Some(gamma1),
        gamma2: Some(gamma2),
        branches: vec![bm, bcmax, bcmin],
        margins: Vec::new(),
        assembly: "G = sqrt((M+2e^r)/(M+2e^-r)) sqrt(max(1,c^2)/min(1,c^2)); \
                   gamma1 = sqrt(2 K1/((M+2e^-r) min(1,c^2))); gamma2 = gamma1 sqrt(K2/K1)"
            .into(),
    })
}

/// Theorem 2 (model C).
pub fn thm2_certificate(params: &PhysicalParams, r: f64) -> Result<IssCertificate> {
    let p = check_inputs(Theorem::Two, params, r)?;
    let c = p.c;
    let (thermal_factor, bt) = Branch::eval(
        "max(1,2lambda/k)",
        true,
        &[("1", 1.0), ("2lambda/k", 2.0 * p.lambda / p.k)],
    );
    let s = 1.0 + p.b + p.mu;
    let (m, bm) = Branch::eval(
        "M",
        true,
        &[
            (
                "viscous-thermal: max(1,2lambda/k) 2(1+b+mu)cosh(r)/(cr)",
                thermal_factor * 2.0 * s * r.cosh() / (c * r),
            ),
            ("boundary: (2/(ac))(e^r(1-ac)^2 - e^-r(1+ac)^2)", boundary_bound(&p, r)),
        ],
    );
    let (half_omega_twice, bw) = Branch::eval(
        "2 omega",
        false,
        &[
            ("mechanical: cr/(2(2+M e^r))", c * r / (2.0 * (2.0 + m * r.exp()))),
            ("thermal: k pi^2", p.k * PI * PI),
        ],
    );
    let omega = 0.5 * half_omega_twice;
    let f_rate = (2.0 * s + m * m) * r.cosh() / (c * r);
    let d_rate = d_rate(&p, r, m);
    let k1 = f_rate / (2.0 * omega);
    let k2 = d_rate / (2.0 * omega);
    let heat = p.b * m / (2.0 * p.lambda);
    let (cmin, bcmin) = Branch::eval("min(1,c^2)", false, &[("1", 1.0), ("c^2", c * c)]);
    let (cmax, bcmax) = Branch::eval("max(1,c^2)", true, &[("1", 1.0), ("c^2", c * c)]);
    let (lower, bl) = Branch::eval(
        "sandwich lower",
        false,
        &[
            ("mechanical: min(1,c^2)(M/2+e^-r)", cmin * (m / 2.0 + (-r).exp())),
            ("thermal: bM/(2lambda)", heat),
        ],
    );
    let (upper, bu) = Branch::eval(
        "sandwich upper",
        true,
        &[
            ("mechanical: max(1,c^2)(M/2+e^r)", cmax * (m / 2.0 + r.exp())),
            ("thermal: bM/(2lambda)", heat),
        ],
    );
    Ok(IssCertificate {
        theorem: Theorem::Two,
        params: p,
        r,
        m,
        b_coef: None,
        q: None,
        r_cap: None,
        sandwich_lower: lower,
        sandwich_upper: upper,
        c1: None,
        c2: None,
        phi_rate: None,
        omega,
        k: None,
        k1: Some(k1),
        k2: Some(k2),
        f_rate,
        d_rate,
        g: (upper / lower).sqrt(),
        gamma: None,
        gamma1: Some((k1 / lower).sqrt()),
        gamma2: Some((k2 / lower).sqrt()),
        branches: vec![bt, bm, bw, bcmin, bcmax, bl, bu],
        margins: Vec::new(),
        assembly: "from L (|u_t|^2+|u_x|^2+|theta|^2) <= e^(-2 omega t) U (...)(0) + K1 sup|f|^2 + K2 sup|d|^2: \
                   G = sqrt(U/L), gamma1 = sqrt(K1/L), gamma2 = sqrt(K2/L)"
            .into(),
    })
}

/// The six lower bounds on M for Theorem 3, labelled, with strictness.
fn thm3_bounds(p: &PhysicalParams, r: f64, r_cap: f64, b_coef: f64) -> [(&'static str, f64, bool); 6] {
    let c = p.c;
    let s = 1.0 + p.mu + p.b + p.sigma * r;
    let visc = 1.0 + p.mu + p.b;
    let ch = r.cosh();
    let coupling = (p.sigma + 1.0) / (2.0 * p.sigma * c * c) * (c * c + visc * p.sigma) * r_cap;
    [
        (
            "m1: 2(1+mu+b+sigma r)cosh(r)/c + 4 sinh^2(r)/(cR)",
            2.0 * s * ch / c + 4.0 * r.sinh().powi(2) / (c * r_cap),
            false,
        ),
        (
            "m2: (1+mu+b)sigma R/(2c^2) + 2(1+mu+b+sigma r)cosh(r)/(cr)",
            visc * p.sigma * r_cap / (2.0 * c * c) + 2.0 * s * ch / (c * r),
            false,
        ),
        (
            "m3: (2lambda/k)(2(1+mu+b+sigma r)cosh(r)/(cr) + coupling)",
            2.0 * p.lambda / p.k * (2.0 * s * ch / (c * r) + coupling),
            false,
        ),
        ("m4: (e^r(1-ac)^2 - e^-r(1+ac)^2)/(ac)", 0.5 * boundary_bound(p, r), false),
        ("m5: R - 2e^-r", r_cap - 2.0 * (-r).exp(), true),
        ("m6: -B/(a sigma)", -b_coef / (p.a * p.sigma), true),
    ]
}

/// Theorem 3 (model D).
pub fn thm3_certificate(params: &PhysicalParams, r: f64) -> Result<IssCertificate> {
    let p = check_inputs(Theorem::Three, params, r)?;
    let c = p.c;
    let sigma = p.sigma;
    let visc = 1.0 + p.mu + p.b;
    let s = visc + sigma * r;
    let b_coef = crate::functionals::boundary_coefficient(&p, r);
    let q = (c * c + (1.0 + p.b) * sigma) / (2.0 * sigma)
        + sigma * c * c * (1.0 + p.b) / (2.0 * (c * c + visc * sigma));
    let r_cap = c * r / (8.0 * q * r.cosh());
    let bounds = thm3_bounds(&p, r, r_cap, b_coef);
    let items: Vec<(&str, f64)> = bounds.iter().map(|(l, v, _)| (*l, *v)).collect();
    let (m_floor, bm) = Branch::eval("max lower bound on M", true, &items);
    // m1 > 0 always, so the product below lies strictly above every bound
    assert!(m_floor > 0.0, "Theorem 3 lower bounds on M are not positive");
    let m = THM3_MARGIN * m_floor;
    let margins = bounds
        .iter()
        .map(|(l, v, strict)| ConstraintMargin {
            label: l.to_string(),
            bound: *v,
            strict: *strict,
            absolute: m - v,
            relative: (m - v) / v.abs(),
        })
        .collect();

    let em = (-r).exp();
    let ep = r.exp();
    let heat = p.b * m / (2.0 * p.lambda);
    let boundary = (p.a * sigma * m + b_coef) / 2.0;
    let (c1, b1) = Branch::eval(
        "C1",
        false,
        &[
            ("(M-R)/2 + e^-r", (m - r_cap) / 2.0 + em),
            ("c^2(M/2 + e^-r)", c * c * (m / 2.0 + em)),
            ("bM/(2lambda)", heat),
            ("(a sigma M + B)/2", boundary),
            ("R sigma^2/4", r_cap * sigma * sigma / 4.0),
        ],
    );
    let (c2, b2) = Branch::eval(
        "C2",
        true,
        &[
            ("M/2 + e^r + R", m / 2.0 + ep + r_cap),
            ("c^2(M/2 + e^r)", c * c * (m / 2.0 + ep)),
            ("bM/(2lambda)", heat),
            ("(a sigma M + B)/2", boundary),
            ("R sigma^2", r_cap * sigma * sigma),
        ],
    );
    let (phi_rate, bp) = Branch::eval(
        "phi",
        false,
        &[
            ("cr e^-r/8", c * r * em / 8.0),
            ("c^3 r e^-r/8", c.powi(3) * r * em / 8.0),
            ("a c^2 M/2", p.a * c * c * m / 2.0),
            ("sigma c^2 R/4", sigma * c * c * r_cap / 4.0),
            ("b k M pi^2/(2lambda)", p.b * p.k * m * PI * PI / (2.0 * p.lambda)),
        ],
    );
    let omega = phi_rate / (2.0 * c2);
    let k = (sigma + 1.0) / (2.0 * sigma * c * c) * (c * c + visc * sigma) * r_cap
        + 2.0 * s * r.cosh() / (c * r)
        + m * m / (4.0 * q * r_cap);
    Ok(IssCertificate {
        theorem: Theorem::Three,
        params: p,
        r,
        m,
        b_coef: Some(b_coef),
        q: Some(q),
        r_cap: Some(r_cap),
        sandwich_lower: c1,
        sandwich_upper: c2,
        c1: Some(c1),
        c2: Some(c2),
        phi_rate: Some(phi_rate),
        omega,
        k: Some(k),
        k1: None,
        k2: None,
        f_rate: k,
        d_rate: 0.0,
        g: (c2 / c1).sqrt(),
        gamma: Some((k / (2.0 * omega * c1)).sqrt()),
        gamma1: None,
        gamma2: None,
        branches: vec![bm, b1, b2, bp],
        margins,
        assembly: format!(
            "M = {THM3_MARGIN} x max(m1..m6); from C1 S(t) <= e^(-2 omega t) C2 S(0) + K/(2 omega) sup|f|^2 \
             with S = |u_t|^2+|u_x|^2+|u_xx|^2+u_t(1)^2+|theta|^2: G = sqrt(C2/C1), gamma = sqrt(K/(2 omega C1))"
        ),
    })
}

/// What [`optimize_r`] tries to improve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MaximizeOmega,
    /// Minimizes γ₁ (γ for Theorem 3).
    MinimizeGamma1,
}

impl Objective {
    /// Larger is better.
    fn score(self, cert: &IssCertificate) -> f64 {
        match self {
            Self::MaximizeOmega => cert.omega,
            Self::MinimizeGamma1 => -cert.gain_f(),
        }
    }
}

/// Result of [`optimize_r`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedR {
    pub r_star: f64,
    pub objective: Objective,
    pub r_range: (f64, f64),
    /// The optimum lies on the lower end of the range (within the grid step).
    pub at_lower_bound: bool,
    /// The optimum lies on the upper end of the range (within the grid step).
    pub at_upper_bound: bool,
    pub evaluations: usize,
    pub certificate: IssCertificate,
}

/// Golden-section search over `[r_lo, r_hi]` followed by a full grid pass at
/// [`R_GRID_STEP`]; ties go to the smaller `r`.
pub fn optimize_r(
    theorem: Theorem,
    params: &PhysicalParams,
    r_range: (f64, f64),
    objective: Objective,
) -> Result<OptimizedR> {
    let (lo, hi) = r_range;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::EmptyRange(lo, hi));
    }
    if lo <= 0.0 {
        return Err(Error::NonPositiveR(lo));
    }
    let mut evaluations = 0;
    let mut score = |r: f64| -> Result<f64> {
        evaluations += 1;
        Ok(objective.score(&theorem.certificate(params, r)?))
    };

    let mut best = (lo, score(lo)?);
    let consider = |r: f64, s: f64, best: &mut (f64, f64)| {
        if s > best.1 || (s == best.1 && r < best.0) {
            *best = (r, s);
        }
    };

    if hi > lo {
        let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = score(x1)?;
        let mut f2 = score(x2)?;
        while b - a > 1e-9 * (1.0 + b.abs()) {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = score(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = score(x2)?;
            }
        }
        consider(x1, f1, &mut best);
        consider(x2, f2, &mut best);

        let steps = ((hi - lo) / R_GRID_STEP).ceil() as usize;
        for i in 0..=steps {
            let r = (lo + i as f64 * R_GRID_STEP).min(hi);
            let s = score(r)?;
            consider(r, s, &mut best);
        }
    }

    let r_star = best.0;
    let certificate = theorem.certificate(params, r_star)?;
    Ok(OptimizedR {
        r_star,
        objective,
        r_range,
        at_lower_bound: hi > lo && r_star - lo < R_GRID_STEP,
        at_upper_bound: hi > lo && hi - r_star < R_GRID_STEP,
        evaluations,
        certificate,
    })
}
