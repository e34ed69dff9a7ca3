//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csl_rotor::diffusion::{cylinder_diffusion_closed, cylinder_reduced, reduced_by_quadrature};
use csl_rotor::exclusion::{forward_heating, Channel, Exclusion};
use csl_rotor::localization::{loc_rate_axes, loc_rate_curve, loc_rate_small_body, max_loc_rate};
use csl_rotor::num::{linspace, logspace};
use csl_rotor::planar::{
    evolve_exact, evolve_ode, initial_cos_squeezed, suggested_ode_step, variance_csl, variance_free,
};
use csl_rotor::{
    BodySpec, CslParams, FormFactor, HeatingMeasurement, MassSpec, PhysicalConstants, PlanarParams, PlanarWignerState,
    QuadratureSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// crossing of the silicon-spheroid bounds on the 200-point default grid
const FIG3_R_C: f64 = 1.548425411079598e-7;
const FIG3_LAMBDA_C: f64 = 1.360644315153935e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn amu() -> f64 {
    PhysicalConstants::codata().amu()
}

fn closed_form_equivalence() -> Outcome {
    let spec = QuadratureSpec::default();
    let grid = logspace(1e-2, 1e2, 5);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &rc in &grid {
        for &lc in &grid {
            let body = BodySpec::cylinder(2.0 * lc, rc * 2f64.sqrt(), MassSpec::Mass(1.0)).unwrap();
            let q = match reduced_by_quadrature(&body, 1.0, &spec, None) {
                Ok(q) => q,
                Err(e) => return outcome(false, format!("R_C = {rc:e}, L_C = {lc:e}: {e}")),
            };
            let c = cylinder_reduced(rc, lc);
            worst = worst.max(rel(q.par, c.par)).max(rel(q.perp, c.perp)).max(rel(q.rot, c.rot));
        }
    }
    let took = start.elapsed();
    outcome(
        worst <= 1e-6 && took <= Duration::from_secs(120),
        format!("max rel err {worst:.2e} over 25 grid points in {took:.1?}"),
    )
}

fn asymptotic_limits() -> Outcome {
    let csl = CslParams::with_amu(1.0, 1.0).unwrap();
    let hbar = PhysicalConstants::codata().hbar();
    let m = 1e-20;
    let scale = csl.lambda_c() * hbar * hbar * (m / csl.m0()).powi(2);
    // thin disk: volume √3πR₀³ with R₀ = r_C
    let r = 1e3;
    let l = 3f64.sqrt() / (r * r);
    let disk = cylinder_diffusion_closed(&csl, m, r, l).unwrap().d_rot / (scale / 4.0);
    let l = 1e3;
    let rod = cylinder_diffusion_closed(&csl, m, 1e-2, l).unwrap().d_rot / (scale * PI.sqrt() * l / 24.0);
    let ok = (0.98..=1.02).contains(&disk) && (0.98..=1.02).contains(&rod);
    outcome(ok, format!("thin disk ratio {disk:.6}, long rod ratio {rod:.6}"))
}

fn small_body_law() -> Outcome {
    let spec = QuadratureSpec::default();
    let alpha = 1.1;
    let mut worst = 0.0f64;
    for body in [
        BodySpec::cylinder(0.1, 0.005, MassSpec::Mass(1e-20)).unwrap(),
        BodySpec::spheroid(0.1, 0.005, MassSpec::Mass(1e-20)).unwrap(),
        BodySpec::cylinder(0.04, 0.05, MassSpec::Mass(1e-20)).unwrap(),
    ] {
        let csl = CslParams::with_amu(1e-8, 1.0).unwrap();
        let full = loc_rate_axes(&FormFactor::new(body.clone()), &csl, alpha, &spec).unwrap();
        worst = worst.max(rel(full, loc_rate_small_body(&body, &csl, alpha).unwrap()));
    }

    // least-squares fit of (1/a, 1/b) to √(F/F₀) = L²/b − R²/a at extent 0.01 r_C
    let fit = |make: fn(f64, f64) -> BodySpec| -> (f64, f64) {
        let csl = CslParams::with_amu(1.0, 1.0).unwrap();
        let (mut saa, mut sab, mut sbb, mut sa_y, mut sb_y) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for aspect in [4.0, 8.0, 20.0, 50.0] {
            let l = 0.01;
            let r = l / aspect;
            let body = make(l, r);
            let f = loc_rate_axes(&FormFactor::new(body.clone()), &csl, alpha, &spec).unwrap();
            let f0 = csl.lambda_c() * (body.mass() / csl.m0()).powi(2) * alpha.sin().powi(2) / 8.0;
            let y = (f / f0).sqrt();
            let (xa, xb) = (-r * r, l * l);
            saa += xa * xa;
            sab += xa * xb;
            sbb += xb * xb;
            sa_y += xa * y;
            sb_y += xb * y;
        }
        let det = saa * sbb - sab * sab;
        let inv_a = (sa_y * sbb - sb_y * sab) / det;
        let inv_b = (saa * sb_y - sab * sa_y) / det;
        (1.0 / inv_a, 1.0 / inv_b)
    };
    let (ca, cb) = fit(|l, r| BodySpec::cylinder(l, r, MassSpec::Mass(1e-20)).unwrap());
    let (sa, sb) = fit(|l, r| BodySpec::spheroid(l, r, MassSpec::Mass(1e-20)).unwrap());
    let fit_ok = rel(ca, 4.0) < 0.01 && rel(cb, 12.0) < 0.01 && rel(sa, 5.0) < 0.01 && rel(sb, 20.0) < 0.01;

    let csl = CslParams::with_amu(1e-8, 1.0).unwrap();
    let null_spheroid = BodySpec::spheroid(0.1, 0.05, MassSpec::Mass(1e-20)).unwrap();
    let null_full = loc_rate_axes(&FormFactor::new(null_spheroid.clone()), &csl, alpha, &spec).unwrap();
    let null_small = loc_rate_small_body(&null_spheroid, &csl, alpha).unwrap();
    let null_cyl = BodySpec::cylinder(0.1 * 3f64.sqrt(), 0.1, MassSpec::Mass(1e-20)).unwrap();
    let null_cyl_small = loc_rate_small_body(&null_cyl, &csl, alpha).unwrap();
    let scale = csl.lambda_c() * (1e-20 / csl.m0()).powi(2) * 1e-4;
    let null_ok = null_full == 0.0 && null_small == 0.0 && null_cyl_small.abs() < 1e-15 * scale;

    outcome(
        worst < 0.01 && fit_ok && null_ok,
        format!(
            "worst full/closed deviation {worst:.2e}; fitted cylinder ({ca:.4}, {cb:.4}), spheroid ({sa:.4}, {sb:.4}); \
             null cases {null_full:e}, {null_small:e}, {null_cyl_small:e}"
        ),
    )
}

fn size_scaling() -> Outcome {
    let spec = QuadratureSpec::default();
    let csl = CslParams::with_amu(1e-8, 1.0).unwrap();
    let scales = logspace(0.005, 0.05, 5);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &s in &scales {
        let body = BodySpec::cylinder(s, s / 20.0, MassSpec::Density(2329.0)).unwrap();
        let (_, f) = max_loc_rate(&FormFactor::new(body), &csl, &spec, 9, 1e-6).unwrap();
        xs.push(s.log10());
        ys.push(f.log10());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    outcome((slope - 10.0).abs() <= 0.1, format!("log-log slope {slope:.5}"))
}

fn fig4() -> (PlanarParams, PlanarWignerState) {
    let inertia = 1e-30;
    let p = PlanarParams::from_rotor_units(1e3, inertia, &[0.0, 2e-2 * PI, 4e-2 * PI]).unwrap();
    (p, initial_cos_squeezed(0.1, 512, 128, inertia).unwrap())
}

fn planar_evolution() -> Outcome {
    let (p, w0) = fig4();
    let start = Instant::now();
    let (mut diff, mut drift, mut slope_err) = (0.0f64, 0.0f64, 0.0f64);
    for &t in &p.times[1..] {
        let a = match evolve_exact(&w0, t, &p) {
            Ok(a) => a,
            Err(e) => return outcome(false, format!("exact evolution: {e}")),
        };
        let b = match evolve_ode(&w0, t, &p, suggested_ode_step(&p)) {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("step integrator: {e}")),
        };
        diff = diff.max(a.max_abs_diff(&b));
        drift = drift.max((a.norm() - w0.norm()).abs()).max((b.norm() - w0.norm()).abs());
        let slope = (a.energy() - w0.energy()) / t;
        slope_err = slope_err.max(rel(slope, p.d_rot() / p.inertia()));
    }
    let took = start.elapsed();
    outcome(
        diff <= 1e-6 && drift <= 1e-10 && slope_err <= 1e-6 && took <= Duration::from_secs(60),
        format!("sup-norm diff {diff:.2e}, norm drift {drift:.2e}, energy slope rel err {slope_err:.2e}, {took:.1?}"),
    )
}

/// State whose first angular harmonic sits on odd `m` only, so that the
/// mean orientation vector is nonzero and revives at `πI/ℏ`.
fn oriented_state(n_alpha: usize, m_max: usize, inertia: f64) -> PlanarWignerState {
    let raw = |a: f64, m: i64| {
        let g = (-(m as f64).powi(2) / 60.0).exp();
        let odd = if m.rem_euclid(2) == 1 { 0.6 * (a - 0.4).cos() } else { 0.0 };
        g * (1.0 + odd + 0.2 * (2.0 * a).cos())
    };
    let norm = PlanarWignerState::from_fn(n_alpha, m_max, inertia, raw).unwrap().norm();
    PlanarWignerState::from_fn(n_alpha, m_max, inertia, |a, m| raw(a, m) / norm).unwrap()
}

fn variance_diagnostics() -> Outcome {
    let (p, w0) = fig4();
    let mut closed_err = 0.0f64;
    for &t in &p.times[1..] {
        let w = evolve_exact(&w0, t, &p).unwrap();
        closed_err = closed_err.max((w.variance() - variance_csl(&w0, t, &p)).abs());
    }
    let q = PlanarParams::from_rotor_units(5.0, p.inertia(), &[]).unwrap();
    let tu = q.time_unit();
    let v0 = oriented_state(128, 96, q.inertia());
    for t in [0.05, 0.4, 1.3, PI] {
        let w = evolve_exact(&v0, t * tu, &q).unwrap();
        closed_err = closed_err.max((w.variance() - variance_csl(&v0, t * tu, &q)).abs());
    }

    let revival = (variance_free(&v0, PI * tu, &q) - variance_free(&v0, 0.0, &q)).abs();
    let dip = variance_free(&v0, 0.5 * PI * tu, &q) - variance_free(&v0, 0.0, &q);

    // amplitude of ⟨e(α)⟩ at the n-th revival against exp(−D_rot t/2ℏ²)
    let slow = PlanarParams::from_rotor_units(0.5, p.inertia(), &[]).unwrap();
    let mut suppression_err = 0.0f64;
    for n in 1..=3 {
        let t = n as f64 * PI * tu;
        let w = evolve_exact(&v0, t, &slow).unwrap();
        let ratio = w.mean_unit_vector().norm() / v0.mean_unit_vector().norm();
        let (_, z) = slow.dimensionless(t);
        suppression_err = suppression_err.max(rel(ratio, (-z).exp()));
    }
    outcome(
        closed_err <= 1e-8 && revival <= 1e-10 && dip > 1e-3 && suppression_err <= 1e-8,
        format!(
            "closed vs evolved {closed_err:.2e}; free revival {revival:.2e} (mid-period rise {dip:.3}); \
             revival amplitude vs exp(-D t/2hbar^2) rel err {suppression_err:.2e}"
        ),
    )
}

fn exclusion_round_trip() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = logspace(1e-9, 1e-5, 61);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let len = 10f64.powf(rng.gen_range(-7.7..-6.3));
        let radius = len / rng.gen_range(4.0..40.0);
        let body = if i % 2 == 0 {
            BodySpec::cylinder(len, radius, MassSpec::Density(2329.0)).unwrap()
        } else {
            BodySpec::spheroid(len, radius, MassSpec::Density(2329.0)).unwrap()
        };
        let r0 = len * 10f64.powf(rng.gen_range(-0.5..1.0));
        let l0 = 10f64.powf(rng.gen_range(-12.0..-6.0));
        let h = forward_heating(&body, &CslParams::new(l0, r0, amu()).unwrap(), &spec, None).unwrap();
        let ex = Exclusion::new(HeatingMeasurement::new(h.gamma_cm, h.gamma_rot, 0.0, body).unwrap(), amu(), spec)
            .unwrap();
        let hit = ex.curve(Channel::Cm, &grid).and_then(|cm| {
            let rot = ex.curve(Channel::Rot, &grid)?;
            ex.intersect(&cm, &rot)
        });
        match hit {
            Ok(hit) => worst = worst.max(rel(hit.r_c, r0)).max(rel(hit.lambda_c, l0)),
            Err(e) => return outcome(false, format!("draw {i} (r_C = {r0:e}): {e}")),
        }
    }

    let body = BodySpec::spheroid(1e-7, 5e-9, MassSpec::Density(2329.0)).unwrap();
    let ex = Exclusion::new(HeatingMeasurement::new(1e-8, 1e-10, 0.1, body).unwrap(), amu(), spec).unwrap();
    let slope = |ch, r: f64| (ex.lambda_bound(10.0 * r, ch).unwrap() / ex.lambda_bound(r, ch).unwrap()).log10();
    let (s_cm, s_rot) = (slope(Channel::Cm, 2e-6), slope(Channel::Rot, 2e-6));

    let fig3 = logspace(1e-9, 1e-5, 200);
    let hit = ex.curve(Channel::Cm, &fig3).and_then(|cm| {
        let rot = ex.curve(Channel::Rot, &fig3)?;
        ex.intersect(&cm, &rot)
    });
    let (fig3_ok, fig3_detail) = match hit {
        Ok(h) => (
            rel(h.r_c, FIG3_R_C) < 1e-7 && rel(h.lambda_c, FIG3_LAMBDA_C) < 1e-7,
            format!("crossing at r_C = {:.6e} m, lambda_C = {:.6e} /s", h.r_c, h.lambda_c),
        ),
        Err(e) => (false, e.to_string()),
    };
    outcome(
        worst <= 1e-5 && (s_cm - 2.0).abs() <= 0.05 && (s_rot - 4.0).abs() <= 0.05 && fig3_ok,
        format!("50 draws max rel err {worst:.2e}; slopes {s_cm:.4} / {s_rot:.4}; {fig3_detail}"),
    )
}

fn fig1_shape() -> Outcome {
    let spec = QuadratureSpec::default();
    let alphas = linspace(0.0, PI, 31);
    let residual = |r_c: f64| -> f64 {
        let body = BodySpec::cylinder(1.0, 0.05, MassSpec::Mass(1e-20)).unwrap();
        let csl = CslParams::with_amu(1e-8, r_c).unwrap();
        let f = loc_rate_curve(&FormFactor::new(body), &csl, &alphas, &spec).unwrap();
        let s2: Vec<f64> = alphas.iter().map(|a| a.sin().powi(2)).collect();
        let c = f.iter().zip(&s2).map(|(f, s)| f * s).sum::<f64>() / s2.iter().map(|s| s * s).sum::<f64>();
        let max = f.iter().copied().fold(0.0, f64::max);
        f.iter().zip(&s2).map(|(f, s)| (f - c * s).abs()).fold(0.0, f64::max) / max
    };
    let (deep, short) = (residual(10.0), residual(0.1));
    outcome(
        deep <= 0.01 && short > 0.05,
        format!("sin^2 fit residual {:.3}% at r_C = 10L, {:.1}% at r_C = L/10", 100.0 * deep, 100.0 * short),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("closed-form/quadrature equivalence", closed_form_equivalence),
        ("asymptotic limits", asymptotic_limits),
        ("small-particle law", small_body_law),
        ("size scaling", size_scaling),
        ("planar evolution", planar_evolution),
        ("variance diagnostics", variance_diagnostics),
        ("exclusion round trip", exclusion_round_trip),
        ("orientation dependence", fig1_shape),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {} ({:.1?})", i + 1, o.detail, start.elapsed());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
