//! The five subcommands. Each computes everything in memory and returns the
//! files to write plus an optional oracle comparison for `--check`.

use std::f64::consts::PI;

use csl_rotor::diffusion::{
    body_diffusion, cylinder_reduced, diffusion_curve, heating_rates, reduced_by_quadrature, DiffusionCache,
};
use csl_rotor::exclusion::{forward_heating, Channel, Exclusion};
use csl_rotor::localization::{loc_rate_axes, loc_rate_curve, loc_rate_small_body, max_loc_rate, normalize_curve};
use csl_rotor::num::linspace;
use csl_rotor::planar::{
    evolve_exact, evolve_ode, initial_cos_squeezed, suggested_m_max, suggested_ode_step, variance_csl, variance_free,
};
use csl_rotor::quadrature::{integrate_2d, Scheme, Tolerance};
use csl_rotor::specfun::bessel_j0;
use csl_rotor::{
    BodySpec, FormFactor, HeatingMeasurement, PlanarParams, PlanarWignerState, QuadratureSpec, Shape, Vec3,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{sweep, Loaded, RawConfig};
use crate::error::CliError;
use crate::output::{num, sha256_hex, Csv};

pub struct Options {
    pub check: bool,
    pub tol: f64,
}

pub struct Check {
    pub deviation: f64,
    pub what: String,
}

pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
    pub check: Option<Check>,
}

fn provenance(command: &str, cfg: &Loaded, spec: Option<&QuadratureSpec>, opts: &Options) -> Vec<(String, String)> {
    let mut h = vec![
        ("tool".to_string(), "csl-rotor".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("command".to_string(), command.to_string()),
        ("config_sha256".to_string(), sha256_hex(&cfg.bytes)),
    ];
    if let Some(s) = spec {
        h.push(("quad_rel_tol".into(), num(s.rel_tol)));
        h.push(("quad_abs_tol".into(), num(s.abs_tol)));
        h.push(("quad_max_evals".into(), s.max_evals.to_string()));
        h.push(("quad_scheme".into(), scheme_name(s.scheme).into()));
    }
    h.push(("check_tol".into(), num(opts.tol)));
    h
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::AdaptiveCubature => "cubature",
        _ => "tensor",
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn require<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::config(key, "missing"))
}

fn axisymmetric(body: &BodySpec, command: &str) -> Result<(), CliError> {
    if body.is_axisymmetric() {
        Ok(())
    } else {
        Err(CliError::config("body.shape", format!("{command} needs an axisymmetric body")))
    }
}

pub fn formfactor(cfg: &Loaded, opts: &Options) -> Result<Output, CliError> {
    let raw = &cfg.raw;
    let body = raw.body()?;
    let sec = require(&raw.formfactor, "formfactor")?;
    if sec.points == 0 {
        return Err(CliError::config("formfactor.points", "sweep is empty"));
    }
    if sec.directions.is_empty() {
        return Err(CliError::config("formfactor.directions", "sweep is empty"));
    }
    if !(sec.k_max > 0.0 && sec.k_max.is_finite()) {
        return Err(CliError::config("formfactor.k_max", "must be finite and positive"));
    }
    let mut dirs = Vec::with_capacity(sec.directions.len());
    for d in &sec.directions {
        let v = Vec3::new(d[0], d[1], d[2]);
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(CliError::config("formfactor.directions", format!("{d:?} is not a direction")));
        }
        dirs.push(v * (1.0 / n));
    }
    let ks = if sec.points == 1 { vec![0.0] } else { linspace(0.0, sec.k_max, sec.points) };
    let ff = FormFactor::new(body.clone());

    let mut csv = Csv::new(
        provenance("formfactor", cfg, None, opts),
        &["direction", "dir_x", "dir_y", "dir_z", "k_per_m", "re_kg", "im_kg"],
    );
    csv.meta("mass_kg", num(body.mass()));
    let mut samples = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        for &k in &ks {
            let v = ff.at_body(*d * k);
            samples.push((*d * k, v.re, v.im));
            csv.row(vec![i.to_string(), num(d.x), num(d.y), num(d.z), num(k), num(v.re), num(v.im)]);
        }
    }

    let check = if opts.check {
        let oracle: Vec<(f64, f64)> = samples
            .par_iter()
            .map(|(k, _, _)| formfactor_oracle(&body, *k))
            .collect::<Result<_, _>>()?;
        let deviation = samples
            .iter()
            .zip(&oracle)
            .map(|((_, re, im), (ore, oim))| (re - ore).hypot(im - oim) / body.mass())
            .fold(0.0, f64::max);
        Some(Check {
            deviation,
            what: "form factor vs direct integration of the density, relative to the mass".into(),
        })
    } else {
        None
    };
    Ok(Output {
        files: vec![("formfactor.csv".into(), csv.render())],
        summary: vec![format!("{} directions x {} wavenumbers", dirs.len(), ks.len())],
        check,
    })
}

/// `ρ̃(k)` by integrating the density: for the continuous shapes a 2D
/// quadrature over the meridional half-section, for atoms the plain sum.
fn formfactor_oracle(body: &BodySpec, k: Vec3) -> Result<(f64, f64), CliError> {
    let m = body.mass();
    let (kp, kz) = ((k.x * k.x + k.y * k.y).sqrt(), k.z);
    // ρ = R sin φ and half-height h(φ); the axial integral runs over t ∈ [0, 1]
    let (radius, half, sphere_like) = match *body.shape() {
        Shape::Cylinder { length, radius } => (radius, length / 2.0, false),
        Shape::Spheroid { length, radius } => (radius, length / 2.0, true),
        Shape::Sphere { radius } => (radius, radius, true),
        Shape::Atoms(ref atoms) => {
            let (mut re, mut im) = (0.0, 0.0);
            for a in atoms {
                let phase = -(k.x * a.position.x + k.y * a.position.y + k.z * a.position.z);
                re += a.mass * phase.cos();
                im += a.mass * phase.sin();
            }
            return Ok((re, im));
        }
    };
    let volume = body.volume().expect("continuous body");
    let integrand = |phi: f64, t: f64| -> [f64; 1] {
        let (s, c) = phi.sin_cos();
        let rho = radius * s;
        let h = if sphere_like { half * c } else { half };
        let j = bessel_j0(kp * rho).unwrap_or(f64::NAN);
        [rho * j * h * (kz * h * t).cos() * radius * c]
    };
    let scale = radius * radius * half;
    let tol = Tolerance {
        rel: 1e-10,
        abs: [1e-12 * scale],
    };
    let est = integrate_2d(integrand, (0.0, PI / 2.0), (0.0, 1.0), &tol, 2_000_000)?;
    Ok((m / volume * 4.0 * PI * est.value[0], 0.0))
}

pub fn locrate(cfg: &Loaded, opts: &Options) -> Result<Output, CliError> {
    let raw = &cfg.raw;
    let body = raw.body()?;
    axisymmetric(&body, "locrate")?;
    let sec = require(&raw.locrate, "locrate")?;
    if sec.r_c.is_empty() {
        return Err(CliError::config("locrate.r_c", "sweep is empty"));
    }
    let r_cs = sec
        .r_c
        .iter()
        .map(|l| l.meters("locrate.r_c"))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = r_cs.iter().find(|r| !(**r > 0.0)) {
        return Err(CliError::config("locrate.r_c", format!("value {bad} must be positive")));
    }
    let n = sec.alpha_points.unwrap_or(91);
    if n < 2 {
        return Err(CliError::config("locrate.alpha_points", "need at least 2 angles"));
    }
    let spec = raw.quadrature()?;
    let base = raw.csl(Some(r_cs[0]))?;
    let alphas = linspace(0.0, PI, n);
    let ff = FormFactor::new(body.clone());

    let mut csv = Csv::new(
        provenance("locrate", cfg, Some(&spec), opts),
        &["r_c_m", "alpha_rad", "rate_per_s", "rate_small_per_s", "rate_normalized"],
    );
    let mut summary = Vec::new();
    let mut curves = Vec::new();
    for (i, &rc) in r_cs.iter().enumerate() {
        let csl = base.with_r_c(rc)?;
        let rates = loc_rate_curve(&ff, &csl, &alphas, &spec)?;
        let (a_max, f_max) = max_loc_rate(&ff, &csl, &spec, 9, 1e-6)?;
        let normalized = normalize_curve(&rates, f_max, 1e-6);
        csv.meta(&format!("peak_{i}"), format!("r_c_m={} alpha_rad={} rate_per_s={}", num(rc), num(a_max), num(f_max)));
        summary.push(format!("r_c = {rc:e} m: peak {f_max:.6e} /s at alpha = {a_max:.6} rad"));
        for (j, &a) in alphas.iter().enumerate() {
            let small = loc_rate_small_body(&body, &csl, a)?;
            csv.row(vec![num(rc), num(a), num(rates[j]), num(small), num(normalized[j])]);
        }
        curves.push((csl, rates));
    }

    let check = if opts.check {
        let other = match spec.scheme {
            Scheme::AdaptiveCubature => Scheme::TensorSpherical3D,
            _ => Scheme::AdaptiveCubature,
        };
        let alt = spec.with_scheme(other);
        let mut deviation = 0.0f64;
        for (csl, rates) in &curves {
            let peak = rates.iter().copied().fold(0.0, f64::max);
            let picks: Vec<usize> = (0..n).step_by(10).chain(std::iter::once(n - 1)).collect();
            let devs = picks
                .par_iter()
                .map(|&j| Ok((loc_rate_axes(&ff, csl, alphas[j], &alt)? - rates[j]).abs()))
                .collect::<Result<Vec<f64>, csl_rotor::Error>>()?;
            if peak > 0.0 {
                deviation = deviation.max(devs.into_iter().fold(0.0, f64::max) / peak);
            }
        }
        Some(Check {
            deviation,
            what: format!("rates recomputed with the {} scheme, relative to each curve's peak", scheme_name(other)),
        })
    } else {
        None
    };
    Ok(Output {
        files: vec![("locrate.csv".into(), csv.render())],
        summary,
        check,
    })
}

pub fn diffusion(cfg: &Loaded, opts: &Options) -> Result<Output, CliError> {
    let raw = &cfg.raw;
    let body = raw.body()?;
    let sec = require(&raw.diffusion, "diffusion")?;
    let r_cs = sweep("diffusion", &sec.r_c, &sec.r_c_min, &sec.r_c_max, sec.points)?;
    let spec = raw.quadrature()?;
    let csl = raw.csl(Some(r_cs[0]))?;
    let cache = DiffusionCache::new();
    let sets = diffusion_curve(&body, &csl, &r_cs, &spec, Some(&cache))?;

    let mut csv = Csv::new(
        provenance("diffusion", cfg, Some(&spec), opts),
        &["r_c_m", "d_par", "d_perp", "d_rot", "gamma_cm_k_per_s", "gamma_rot_k_per_s"],
    );
    csv.meta("lambda_c_per_s", num(csl.lambda_c()));
    csv.meta("m0_kg", num(csl.m0()));
    csv.meta("mass_kg", num(body.mass()));
    for (rc, d) in r_cs.iter().zip(&sets) {
        let h = heating_rates(d, &body);
        csv.row(vec![num(*rc), num(d.d_par), num(d.d_perp), num(d.d_rot), num(h.gamma_cm), num(h.gamma_rot)]);
    }

    let check = if opts.check {
        let (what, devs): (String, Vec<f64>) = match *body.shape() {
            Shape::Cylinder { length, radius } => {
                let devs = r_cs
                    .par_iter()
                    .map(|&rc| {
                        let q = reduced_by_quadrature(&body, rc, &spec, None)?;
                        let c = cylinder_reduced(radius / (2f64.sqrt() * rc), length / (2.0 * rc));
                        Ok(rel_dev(q.par, c.par).max(rel_dev(q.perp, c.perp)).max(rel_dev(q.rot, c.rot)))
                    })
                    .collect::<Result<_, csl_rotor::Error>>()?;
                ("closed forms vs geometry-tensor quadrature".into(), devs)
            }
            _ => {
                let tight = spec.with_rel_tol((spec.rel_tol / 100.0).max(1e-13))?;
                let devs = r_cs
                    .par_iter()
                    .zip(&sets)
                    .map(|(&rc, d)| {
                        let t = body_diffusion(&body, &csl.with_r_c(rc)?, &tight, None)?;
                        Ok(rel_dev(t.d_par, d.d_par).max(rel_dev(t.d_perp, d.d_perp)).max(rel_dev(t.d_rot, d.d_rot)))
                    })
                    .collect::<Result<_, csl_rotor::Error>>()?;
                (format!("quadrature rerun at rel_tol {:e}", tight.rel_tol), devs)
            }
        };
        Some(Check {
            deviation: devs.into_iter().fold(0.0, f64::max),
            what,
        })
    } else {
        None
    };
    Ok(Output {
        files: vec![("diffusion.csv".into(), csv.render())],
        summary: vec![format!("{} localization lengths", r_cs.len())],
        check,
    })
}

fn planar_inertia(raw: &RawConfig, given: Option<f64>) -> Result<f64, CliError> {
    match (given, &raw.body) {
        (Some(i), _) if i > 0.0 && i.is_finite() => Ok(i),
        (Some(_), _) => Err(CliError::config("planar.inertia", "must be finite and positive")),
        (None, Some(_)) => {
            let i = raw.body()?.transverse_inertia();
            if i > 0.0 {
                Ok(i)
            } else {
                Err(CliError::config("planar.inertia", "the body has no transverse moment of inertia"))
            }
        }
        (None, None) => Err(CliError::config("planar.inertia", "missing (or give a [body])")),
    }
}

pub fn planar(cfg: &Loaded, opts: &Options) -> Result<Output, CliError> {
    let raw = &cfg.raw;
    let sec = require(&raw.planar, "planar")?;
    if sec.times.is_empty() {
        return Err(CliError::config("planar.times", "sweep is empty"));
    }
    if let Some(t) = sec.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(CliError::config("planar.times", format!("time {t} must be finite and non-negative")));
    }
    if !(sec.d_rot >= 0.0 && sec.d_rot.is_finite()) {
        return Err(CliError::config("planar.d_rot", "must be finite and non-negative"));
    }
    let inertia = planar_inertia(raw, sec.inertia)?;
    let n_alpha = sec.n_alpha.unwrap_or(512);
    let series_points = sec.series_points.unwrap_or(201);
    if series_points < 2 {
        return Err(CliError::config("planar.series_points", "need at least 2 points"));
    }
    let params = PlanarParams::from_rotor_units(sec.d_rot, inertia, &sec.times)
        .map_err(|e| CliError::config("planar", e.to_string()))?;
    let sigma = sec.sigma_alpha;
    let m_max = match sec.m_max {
        Some(m) => m,
        None => {
            let z = 1.0 / (4.0 * sigma * sigma);
            let provisional = (z + 20.0 * z.sqrt() + 40.0).ceil() as usize;
            let w = initial_cos_squeezed(sigma, n_alpha, provisional, inertia)
                .map_err(|e| CliError::config("planar", e.to_string()))?;
            suggested_m_max(&w.marginals().1, &params)
        }
    };
    let w0 = initial_cos_squeezed(sigma, n_alpha, m_max, inertia).map_err(|e| CliError::config("planar", e.to_string()))?;
    let tu = params.time_unit();
    let states = params
        .times
        .iter()
        .map(|&t| evolve_exact(&w0, t, &params))
        .collect::<Result<Vec<_>, _>>()?;

    let base = provenance("planar", cfg, None, opts);
    let mut files = Vec::new();
    for (i, (w, t)) in states.iter().zip(&sec.times).enumerate() {
        let mut csv = Csv::new(base.clone(), &["alpha_rad", "m", "w"]);
        csv.meta("t", num(*t));
        csv.meta("D_rot", num(sec.d_rot));
        csv.meta("sigma_alpha", num(sigma));
        csv.meta("N_alpha", n_alpha);
        csv.meta("m_max", m_max);
        for (a, m, v) in w.snapshot_rows() {
            csv.row(vec![num(a), m.to_string(), num(v)]);
        }
        files.push((format!("snapshot_{i}.csv"), csv.render()));
    }

    let time_cols: Vec<String> = (0..states.len()).map(|i| format!("t{i}")).collect();
    let mut marg_head = base.clone();
    for (i, t) in sec.times.iter().enumerate() {
        marg_head.push((format!("t{i}"), num(*t)));
    }
    let marginals: Vec<(Vec<f64>, Vec<f64>)> = states.iter().map(PlanarWignerState::marginals).collect();
    let mut p_alpha = Csv::new(marg_head.clone(), &["alpha_rad"]);
    p_alpha.columns.extend(time_cols.iter().cloned());
    for j in 0..n_alpha {
        let mut row = vec![num(w0.alpha(j))];
        row.extend(marginals.iter().map(|(pa, _)| num(pa[j])));
        p_alpha.row(row);
    }
    let mut p_m = Csv::new(marg_head, &["m"]);
    p_m.columns.extend(time_cols);
    for r in 0..2 * m_max + 1 {
        let mut row = vec![(r as i64 - m_max as i64).to_string()];
        row.extend(marginals.iter().map(|(_, pm)| num(pm[r])));
        p_m.row(row);
    }
    files.push(("p_alpha.csv".into(), p_alpha.render()));
    files.push(("p_m.csv".into(), p_m.render()));

    let t_max = sec.times.iter().copied().fold(0.0, f64::max);
    let mut series = Csv::new(base.clone(), &["t", "sigma2_free", "sigma2_csl"]);
    for t in linspace(0.0, t_max, series_points) {
        series.row(vec![num(t), num(variance_free(&w0, t * tu, &params)), num(variance_csl(&w0, t * tu, &params))]);
    }
    files.push(("variance.csv".into(), series.render()));

    let mut moments = Csv::new(base, &["t", "norm", "sigma2_evolved", "mean_m2", "energy_j"]);
    for (w, t) in states.iter().zip(&sec.times) {
        moments.row(vec![num(*t), num(w.norm()), num(w.variance()), num(w.mean_m2()), num(w.energy())]);
    }
    files.push(("moments.csv".into(), moments.render()));

    let check = if opts.check {
        let step = suggested_ode_step(&params);
        let mut deviation = 0.0f64;
        for (w, &t) in states.iter().zip(&params.times) {
            deviation = deviation.max((w.variance() - variance_csl(&w0, t, &params)).abs());
            if t > 0.0 {
                let ode = evolve_ode(&w0, t, &params, step)?;
                deviation = deviation.max(w.max_abs_diff(&ode));
            }
        }
        Some(Check {
            deviation,
            what: "exact kernel vs step integrator (sup norm) and closed-form variance".into(),
        })
    } else {
        None
    };
    Ok(Output {
        files,
        summary: vec![format!(
            "{} snapshots on {n_alpha} angles x {} momenta",
            states.len(),
            2 * m_max + 1
        )],
        check,
    })
}

#[derive(Serialize)]
struct ExclusionJson<'a> {
    provenance: std::collections::BTreeMap<&'a str, &'a str>,
    gamma_cm_k_per_s: f64,
    gamma_rot_k_per_s: f64,
    rel_error: f64,
    r_c_m: &'a [f64],
    lambda_cm_bound: &'a [f64],
    lambda_rot_bound: &'a [f64],
    lambda_cm_low: &'a [f64],
    lambda_cm_high: &'a [f64],
    lambda_rot_low: &'a [f64],
    lambda_rot_high: &'a [f64],
    intersection: IntersectionJson,
}

#[derive(Serialize)]
struct IntersectionJson {
    r_c_m: f64,
    lambda_c_per_s: f64,
    r_c_range_m: (f64, f64),
    lambda_c_range_per_s: (f64, f64),
}

pub fn exclude(cfg: &Loaded, opts: &Options) -> Result<Output, CliError> {
    let raw = &cfg.raw;
    let body = raw.body()?;
    axisymmetric(&body, "exclude")?;
    let sec = require(&raw.exclusion, "exclusion")?;
    let r_cs = sweep("exclusion", &sec.r_c, &sec.r_c_min, &sec.r_c_max, sec.points)?;
    if r_cs.len() < 2 {
        return Err(CliError::config("exclusion.r_c", "need at least two points to bracket a crossing"));
    }
    if r_cs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::config("exclusion.r_c", "must be strictly increasing"));
    }
    let spec = raw.quadrature()?;
    let m0 = raw.m0()?;
    let e = sec.rel_error.unwrap_or(0.0);
    let meas = HeatingMeasurement::new(sec.gamma_cm, sec.gamma_rot, e, body.clone())
        .map_err(|err| CliError::config("exclusion", err.to_string()))?;
    let ex = Exclusion::new(meas, m0, spec)?;
    let cm = ex.curve(Channel::Cm, &r_cs)?;
    let rot = ex.curve(Channel::Rot, &r_cs)?;
    let hit = ex.intersect(&cm, &rot)?;

    let head = provenance("exclude", cfg, Some(&spec), opts);
    let mut csv = Csv::new(
        head.clone(),
        &["r_c_m", "lambda_cm_bound", "lambda_rot_bound", "lambda_cm_low", "lambda_cm_high", "lambda_rot_low", "lambda_rot_high"],
    );
    csv.meta("gamma_cm_k_per_s", num(sec.gamma_cm));
    csv.meta("gamma_rot_k_per_s", num(sec.gamma_rot));
    csv.meta("rel_error", num(e));
    csv.meta("m0_kg", num(m0));
    for i in 0..r_cs.len() {
        csv.row(vec![
            num(r_cs[i]),
            num(cm.lambda_bound[i]),
            num(rot.lambda_bound[i]),
            num(cm.band_low[i]),
            num(cm.band_high[i]),
            num(rot.band_low[i]),
            num(rot.band_high[i]),
        ]);
    }
    csv.trailer = vec![
        ("intersection_r_c_m".into(), num(hit.r_c)),
        ("intersection_lambda_c_per_s".into(), num(hit.lambda_c)),
        ("r_c_range_m".into(), format!("{} {}", num(hit.r_c_range.0), num(hit.r_c_range.1))),
        ("lambda_c_range_per_s".into(), format!("{} {}", num(hit.lambda_c_range.0), num(hit.lambda_c_range.1))),
    ];

    let json = ExclusionJson {
        provenance: head.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect(),
        gamma_cm_k_per_s: sec.gamma_cm,
        gamma_rot_k_per_s: sec.gamma_rot,
        rel_error: e,
        r_c_m: &r_cs,
        lambda_cm_bound: &cm.lambda_bound,
        lambda_rot_bound: &rot.lambda_bound,
        lambda_cm_low: &cm.band_low,
        lambda_cm_high: &cm.band_high,
        lambda_rot_low: &rot.band_low,
        lambda_rot_high: &rot.band_high,
        intersection: IntersectionJson {
            r_c_m: hit.r_c,
            lambda_c_per_s: hit.lambda_c,
            r_c_range_m: hit.r_c_range,
            lambda_c_range_per_s: hit.lambda_c_range,
        },
    };
    let mut json_text = serde_json::to_string_pretty(&json).expect("plain data serializes");
    json_text.push('\n');

    let check = if opts.check {
        let csl = csl_rotor::CslParams::new(hit.lambda_c, hit.r_c, m0)?;
        let h = forward_heating(&body, &csl, &spec, None)?;
        Some(Check {
            deviation: rel_dev(h.gamma_cm, sec.gamma_cm).max(rel_dev(h.gamma_rot, sec.gamma_rot)),
            what: "heating rates recomputed at the crossing vs the measured rates".into(),
        })
    } else {
        None
    };
    Ok(Output {
        files: vec![("exclusion.csv".into(), csv.render()), ("exclusion.json".into(), json_text)],
        summary: vec![format!(
            "crossing at r_c = {:.6e} m, lambda_c = {:.6e} /s; r_c in [{:.4e}, {:.4e}] m, lambda_c in [{:.4e}, {:.4e}] /s",
            hit.r_c, hit.lambda_c, hit.r_c_range.0, hit.r_c_range.1, hit.lambda_c_range.0, hit.lambda_c_range.1
        )],
        check,
    })
}
