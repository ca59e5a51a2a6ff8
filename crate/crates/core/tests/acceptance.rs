//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and asserts.
//!
//! Run with `cargo test -p dampwave --test acceptance -- --nocapture` to see
//! the verdict lines.

use std::time::{Duration, Instant};

use dampwave::certificates::{thm1_certificate, thm2_certificate, thm3_certificate};
use dampwave::discretize::{dirichlet_form, first_diff, norm_sq, second_diff, trapezoid, Grid};
use dampwave::functionals::{damper_closure, energy_e, lyapunov_v, phi};
use dampwave::harness::mms::mms_study;
use dampwave::harness::{
    check_certified_decay, check_iss, lyapunov_series, sigma_sweep, thermoacoustic_equivalence,
};
use dampwave::solver::{default_dt, StringSolver};
use dampwave::{
    DisturbanceSpec, InitialDataSpec, ModelVariant, PhysicalParams, Profile, SpaceTimeSignal,
    SpatialProfile, StringState, ThermoacousticParams, TimeSignal,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) -> bool {
    println!(
        "criterion {id} [{name}]: {} ({detail}; {:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn bump_init(radius: f64, with_theta: bool) -> InitialDataSpec {
    InitialDataSpec {
        u: Profile::Bump {
            amplitude: 1.0,
            center: 0.5,
            radius,
        },
        w: Profile::Zero,
        theta: with_theta.then_some(Profile::Sine {
            amplitude: 0.5,
            wavenumber: 1.0,
        }),
    }
}

fn relative_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

#[test]
fn criterion_1_finite_time_extinction() {
    let start = Instant::now();
    let p = PhysicalParams::default();
    let grid = Grid::new(512).unwrap();
    let data = bump_init(0.3, false).sample(&grid, ModelVariant::A).unwrap();
    let solver = StringSolver::new(ModelVariant::A, &p, &grid, default_dt(&grid, p.c)).unwrap();
    let tr = solver
        .run(&StringState::from_init(&data), &DisturbanceSpec::zero(), 4.0)
        .unwrap();
    let times = tr.times();
    let energies: Vec<f64> = tr
        .states
        .iter()
        .map(|s| energy_e(ModelVariant::A, &p, &grid, s).unwrap())
        .collect();
    let e0 = energies[0];
    let worst = times
        .iter()
        .zip(&energies)
        .filter(|(t, _)| **t >= 2.0 / p.c + 0.1)
        .map(|(_, e)| e / e0)
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed <= Duration::from_secs(10);
    assert!(verdict(
        1,
        "finite-time extinction, model A",
        pass,
        &format!("max E/E0 for t >= 2.1 is {worst:.3e}"),
        elapsed
    ));
}

#[test]
fn criterion_2_certified_exponential_decay() {
    let start = Instant::now();
    let p = PhysicalParams::golden();
    let mut details = Vec::new();
    let mut pass = true;
    for (variant, cert) in [
        (ModelVariant::B, thm1_certificate(&p, 1.0).unwrap()),
        (ModelVariant::C, thm2_certificate(&p, 1.0).unwrap()),
        (ModelVariant::D, thm3_certificate(&p, 1.0).unwrap()),
    ] {
        for n in [128, 256] {
            let grid = Grid::new(n).unwrap();
            let dt = default_dt(&grid, p.c);
            let data = bump_init(0.3, variant.has_thermal())
                .sample(&grid, variant)
                .unwrap();
            let tr = StringSolver::new(variant, &p, &grid, dt)
                .unwrap()
                .run(&StringState::from_init(&data), &DisturbanceSpec::zero(), 10.0)
                .unwrap();
            let v: Vec<f64> = lyapunov_series(variant, &p, &grid, &cert, &tr)
                .unwrap()
                .iter()
                .map(|f| f.v)
                .collect();
            let check = check_certified_decay(cert.omega, &tr.times(), &v, grid.h(), dt);
            pass &= check.pass;
            details.push(format!("{variant}/N={n}: worst {:.6}", check.worst_ratio));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(60);
    assert!(verdict(2, "certified decay B/C/D", pass, &details.join(", "), elapsed));
}

#[test]
fn criterion_3_iss_estimates_under_disturbance() {
    let start = Instant::now();
    let p = PhysicalParams::golden();
    let grid = Grid::new(256).unwrap();
    let dt = default_dt(&grid, p.c);
    let f = SpaceTimeSignal::Separable {
        time: TimeSignal::sinusoid(1.0, 3.0),
        profile: SpatialProfile::Uniform,
    };
    let mut details = Vec::new();
    let mut pass = true;
    for (variant, cert) in [
        (ModelVariant::B, thm1_certificate(&p, 1.0).unwrap()),
        (ModelVariant::C, thm2_certificate(&p, 1.0).unwrap()),
        (ModelVariant::D, thm3_certificate(&p, 1.0).unwrap()),
    ] {
        let disturbance = DisturbanceSpec {
            f: f.clone(),
            d: if variant.accepts_boundary_disturbance() {
                TimeSignal::sinusoid(1.0, 3.0)
            } else {
                TimeSignal::Zero
            },
        };
        let data = bump_init(0.3, variant.has_thermal())
            .sample(&grid, variant)
            .unwrap();
        let tr = StringSolver::new(variant, &p, &grid, dt)
            .unwrap()
            .run(&StringState::from_init(&data), &disturbance, 20.0)
            .unwrap();
        let report = check_iss(variant, &p, &grid, &cert, &tr).unwrap();
        pass &= report.pass;
        details.push(format!("{variant}: min margin {:.3e}", report.min_margin));
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(60);
    assert!(verdict(3, "ISS estimates B/C/D", pass, &details.join(", "), elapsed));
}

/// Random smooth state compatible with `u(0) = 0` and the damper at x = 1.
fn random_state(rng: &mut ChaCha8Rng, grid: &Grid, a: f64, thermal: bool) -> StringState {
    let modes = 8;
    let mut coeffs = |count: usize| -> Vec<f64> {
        (1..=count)
            .map(|m| rng.gen_range(-1.0..1.0) / m as f64)
            .collect()
    };
    let (cu, cw, ct) = (coeffs(modes), coeffs(modes), coeffs(modes));
    let quarter = |c: &[f64], x: f64| -> f64 {
        c.iter()
            .enumerate()
            .map(|(m, a)| a * ((m as f64 + 0.5) * std::f64::consts::PI * x).sin())
            .sum()
    };
    let w: Vec<f64> = grid.nodes().map(|x| quarter(&cw, x)).collect();
    let w_end = w[grid.n()];
    let u = grid
        .nodes()
        .map(|x| quarter(&cu, x) - a * w_end * x * x / 2.0)
        .collect();
    let theta = thermal.then(|| {
        grid.nodes()
            .enumerate()
            .map(|(i, x)| {
                if i == 0 || i == grid.n() {
                    return 0.0;
                }
                ct.iter()
                    .enumerate()
                    .map(|(m, a)| a * ((m as f64 + 1.0) * std::f64::consts::PI * x).sin())
                    .sum()
            })
            .collect()
    });
    StringState { t: 0.0, u, w, theta }
}

#[test]
fn criterion_4_sandwich_and_intermediate_inequalities() {
    let start = Instant::now();
    let grid = Grid::new(256).unwrap();
    let h = grid.h();
    let slack = 10.0 * h * h;
    let p = PhysicalParams::golden();
    let r = 1.0;
    let thm1 = thm1_certificate(&p, r).unwrap();
    let thm3 = thm3_certificate(&p, r).unwrap();
    let (c1, c2) = (thm3.c1.unwrap(), thm3.c2.unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 1000;
    let mut violations = [0usize; 5];
    // `lo <= hi` up to a relative slack
    let holds = |lo: f64, hi: f64| lo <= hi + slack * lo.abs().max(hi.abs());

    for _ in 0..samples {
        let s = random_state(&mut rng, &grid, p.a, true);
        let ux = first_diff(&grid, &s.u).unwrap();
        let (w2, ux2) = (norm_sq(&grid, &s.w), norm_sq(&grid, &ux));
        let base = p.c * p.c * ux2 + w2;

        // Φ sandwich, models B and C
        for variant in [ModelVariant::B, ModelVariant::C] {
            let ph = phi(variant, &p, &grid, &s, r).unwrap();
            if !(holds((-r).exp() * base, ph) && holds(ph, r.exp() * base)) {
                violations[0] += 1;
            }
        }

        // ∫w² against the weighted characteristic integrals
        let plus: Vec<f64> = grid
            .nodes()
            .enumerate()
            .map(|(i, x)| (r * x).exp() * (s.w[i] + p.c * ux[i]).powi(2))
            .collect();
        let minus: Vec<f64> = grid
            .nodes()
            .enumerate()
            .map(|(i, x)| (-r * x).exp() * (s.w[i] - p.c * ux[i]).powi(2))
            .collect();
        let bound = r.cosh() / 2.0 * (trapezoid(&grid, &plus) + trapezoid(&grid, &minus));
        if !holds(w2, bound) {
            violations[1] += 1;
        }

        // Theorem-1 sandwich on model B
        let b_state = StringState { theta: None, ..s.clone() };
        let v1 = lyapunov_v(ModelVariant::B, &p, &grid, &b_state, &thm1).unwrap().v;
        let (lo1, hi1) = (thm1.m / 2.0 + (-r).exp(), thm1.m / 2.0 + r.exp());
        if !(holds(lo1 * base, v1) && holds(v1, hi1 * base)) {
            violations[2] += 1;
        }

        // Theorem-3 sandwich on model D
        let v3 = lyapunov_v(ModelVariant::D, &p, &grid, &s, &thm3).unwrap().v;
        let uxx = second_diff(&grid, &s.u, damper_closure(&p, &s)).unwrap();
        let th = s.theta.as_ref().unwrap();
        let w_end = s.w[grid.n()];
        let big_s = w2 + ux2 + norm_sq(&grid, th) + w_end * w_end + norm_sq(&grid, &uxx);
        if !(holds(c1 * big_s, v3) && holds(v3, c2 * big_s)) {
            violations[3] += 1;
        }

        // discrete Wirtinger on θ
        let th2 = norm_sq(&grid, th);
        if dirichlet_form(&grid, th) < std::f64::consts::PI.powi(2) * th2 - slack * th2 {
            violations[4] += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = violations.iter().all(|v| *v == 0);
    assert!(verdict(
        4,
        "sandwich and intermediate inequalities",
        pass,
        &format!(
            "{samples} states, violations phi/w-bound/thm1/thm3/wirtinger = {violations:?}"
        ),
        elapsed
    ));
}

#[test]
fn criterion_5_certificate_golden_values() {
    let start = Instant::now();
    let tol = 1e-12;
    let mut worst: (f64, &str) = (0.0, "");
    let mut note = |name: &'static str, got: f64, want: f64| {
        let e = relative_err(got, want);
        if e > worst.0 {
            worst = (e, name);
        }
    };

    // closed forms at a = c = 1, μ = 0, r = 1
    let one = PhysicalParams::default();
    let t1 = thm1_certificate(&one, 1.0).unwrap();
    let cosh1 = 1.0_f64.cosh();
    let e_inv = (-1.0_f64).exp();
    note("thm1 M closed form", t1.m, 2.0 * cosh1);
    note("thm1 omega closed form", t1.omega, e_inv / (4.0 * (2.0 * cosh1 + 2.0 * e_inv)));

    // 40-digit reference values
    note("thm1 M", t1.m, 3.086_161_269_630_487_4);
    note("thm1 omega", t1.omega, 0.024_063_783_814_367_18);
    note("thm1 K1", t1.k1.unwrap(), 369.498_523_321_105_5);
    note("thm1 K2", t1.k2.unwrap(), 60.125_437_215_933_14);
    note("thm1 G", t1.g, 1.493_304_696_952_450_6);
    note("thm1 gamma1", t1.gamma1.unwrap(), 13.905_305_880_205_16);
    note("thm1 gamma2", t1.gamma2.unwrap(), 5.609_230_887_392_36);

    let two_p = PhysicalParams {
        b: 1.0,
        k: 1.0,
        lambda: 1.0,
        ..one
    };
    let t2 = thm2_certificate(&two_p, 1.0).unwrap();
    note("thm2 M", t2.m, 12.344_645_078_521_95);
    note("thm2 omega", t2.omega, 0.007_031_117_736_732_331);
    note("thm2 K1", t2.k1.unwrap(), 17_161.054_186_456_433);
    note("thm2 K2", t2.k2.unwrap(), 525.618_849_946_848_7);
    note("thm2 G", t2.g, 1.200_166_046_423_969_4);
    note("thm2 gamma1", t2.gamma1.unwrap(), 52.728_774_180_021_02);
    note("thm2 gamma2", t2.gamma2.unwrap(), 9.228_075_937_409_052);
    note("thm2 lower", t2.sandwich_lower, 6.172_322_539_260_975);
    note("thm2 upper", t2.sandwich_upper, 8.890_604_367_720_02);

    let three_p = PhysicalParams { sigma: 1.0, ..two_p };
    let t3 = thm3_certificate(&three_p, 1.0).unwrap();
    note("thm3 B", t3.b_coef.unwrap(), 0.735_758_882_342_884_7);
    note("thm3 Q", t3.q.unwrap(), 1.833_333_333_333_333_3);
    note("thm3 R", t3.r_cap.unwrap(), 0.044_185_518_658_901_274);
    note("thm3 M", t3.m, 135.628_533_874_038_54);
    note("thm3 C1", t3.c1.unwrap(), 0.011_046_379_664_725_318);
    note("thm3 C2", t3.c2.unwrap(), 70.576_734_284_137_22);
    note("thm3 phi", t3.phi_rate.unwrap(), 0.011_046_379_664_725_318);
    note("thm3 omega", t3.omega, 0.000_078_257_939_934_237_63);
    note("thm3 K", t3.k.unwrap(), 56_779.633_744_950_05);
    note("thm3 G", t3.g, 79.932_021_497_132_52);
    note("thm3 gamma", t3.gamma.unwrap(), 181_220.409_304_596_6);

    let elapsed = start.elapsed();
    let pass = worst.0 <= tol;
    assert!(verdict(
        5,
        "certificate golden values",
        pass,
        &format!("worst relative error {:.2e} at {}", worst.0, worst.1),
        elapsed
    ));
}

#[test]
fn criterion_6_sigma_blow_up_trend() {
    let start = Instant::now();
    let sweep = sigma_sweep(&PhysicalParams::golden(), &[1.0, 0.3, 0.1, 0.03, 0.01], 1.0).unwrap();
    let ratio = sweep.rows.last().unwrap().gamma / sweep.rows[0].gamma;
    let pass = sweep.gamma_increasing == Some(true)
        && sweep.omega_decreasing == Some(true)
        && ratio > 10.0;
    assert!(verdict(
        6,
        "sigma -> 0 gain blow-up",
        pass,
        &format!(
            "gamma(0.01)/gamma(1) = {ratio:.3e}, gamma increasing {:?}, omega decreasing {:?}",
            sweep.gamma_increasing, sweep.omega_decreasing
        ),
        start.elapsed()
    ));
}

#[test]
fn criterion_7_thermoacoustic_equivalence() {
    let start = Instant::now();
    let ta = ThermoacousticParams {
        a: 1.0,
        c: 1.0,
        gamma: 1.4,
        b: 1.0,
        k: 1.0,
        lambda: 1.0,
        sigma: 0.5,
    };
    let init = InitialDataSpec {
        u: Profile::Zero,
        w: Profile::Bump {
            amplitude: 1.0,
            center: 0.5,
            radius: 0.25,
        },
        theta: Some(Profile::Zero),
    };
    let report = thermoacoustic_equivalence(&ta, &init, &[128, 256], 2.0).unwrap();
    let ratio = report.ratios[0];
    let pass = (3.0..=5.0).contains(&ratio);
    assert!(verdict(
        7,
        "thermoacoustic equivalence",
        pass,
        &format!(
            "discrepancy {:.3e} -> {:.3e}, ratio {ratio:.3}",
            report.runs[0].max_discrepancy, report.runs[1].max_discrepancy
        ),
        start.elapsed()
    ));
}

#[test]
fn criterion_8_manufactured_solution_order() {
    let start = Instant::now();
    let p = PhysicalParams::golden();
    let mut pass = true;
    let mut details = Vec::new();
    for variant in [ModelVariant::B, ModelVariant::D] {
        let table = mms_study(variant, &p, &[32, 64, 128, 256], 1.0).unwrap();
        let order = table.observed_order.unwrap_or(f64::NAN);
        pass &= (order - 2.0).abs() <= 0.1;
        details.push(format!("{variant}: order {order:.4}"));
    }
    assert!(verdict(8, "manufactured-solution order", pass, &details.join(", "), start.elapsed()));
}
