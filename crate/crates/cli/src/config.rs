//! Run configuration read from TOML. Every table rejects unknown keys, and
//! values are validated into library types before any computation starts.

use std::path::Path;

use csl_rotor::params::material_density;
use csl_rotor::quadrature::Scheme;
use csl_rotor::{Atom, BodySpec, CslParams, MassSpec, PhysicalConstants, QuadratureSpec, Vec3};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub body: Option<RawBody>,
    pub csl: Option<RawCsl>,
    pub quadrature: Option<RawQuadrature>,
    pub formfactor: Option<RawFormFactor>,
    pub locrate: Option<RawLocRate>,
    pub diffusion: Option<RawSweep>,
    pub planar: Option<RawPlanar>,
    pub exclusion: Option<RawExclusion>,
}

/// A length in meters, either a bare number or a string with a unit suffix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Meters(f64),
    Text(String),
}

impl Length {
    pub fn meters(&self, key: &str) -> Result<f64, CliError> {
        let v = match self {
            Length::Meters(v) => *v,
            Length::Text(s) => parse_length(s).ok_or_else(|| CliError::config(key, format!("cannot read length {s:?}")))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::config(key, "must be finite"))
        }
    }
}

fn parse_length(s: &str) -> Option<f64> {
    let s = s.trim();
    let split = s
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_ascii_digit() || *c == '.')
        .map(|(i, c)| i + c.len_utf8())?;
    let (num, unit) = s.split_at(split);
    let exponent = match unit.trim() {
        "" | "m" => 0,
        "mm" => -3,
        "um" | "µm" | "μm" => -6,
        "nm" => -9,
        "pm" => -12,
        _ => return None,
    };
    let num = num.trim();
    if num.contains(['e', 'E']) {
        num.parse::<f64>().ok().map(|v| v * 10f64.powi(exponent))
    } else {
        // "10um" reads as 1e-5 exactly rather than 10 × 1e-6
        format!("{num}e{exponent}").parse::<f64>().ok()
    }
}

/// A mass in kg, as a number or `"amu"` / `"amu:N"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Mass {
    Kilograms(f64),
    Text(String),
}

impl Mass {
    pub fn kilograms(&self, key: &str) -> Result<f64, CliError> {
        let amu = PhysicalConstants::codata().amu();
        match self {
            Mass::Kilograms(v) => Ok(*v),
            Mass::Text(s) => {
                let s = s.trim();
                if s == "amu" {
                    return Ok(amu);
                }
                s.strip_prefix("amu:")
                    .and_then(|n| n.trim().parse::<f64>().ok())
                    .map(|n| n * amu)
                    .ok_or_else(|| CliError::config(key, format!("expected a mass in kg or \"amu:N\", got {s:?}")))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub mass: Mass,
    pub position: [Length; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBody {
    pub shape: String,
    pub length: Option<Length>,
    pub radius: Option<Length>,
    pub density: Option<f64>,
    pub material: Option<String>,
    pub mass: Option<f64>,
    pub atoms: Option<Vec<RawAtom>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCsl {
    pub lambda_c: Option<f64>,
    pub r_c: Option<Length>,
    pub m0: Option<Mass>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuadrature {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_evals: Option<usize>,
    pub scheme: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFormFactor {
    pub k_max: f64,
    pub points: usize,
    pub directions: Vec<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLocRate {
    pub r_c: Vec<Length>,
    pub alpha_points: Option<usize>,
}

/// `r_C` values as an explicit list or a log-spaced range.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub r_c: Option<Vec<Length>>,
    pub r_c_min: Option<Length>,
    pub r_c_max: Option<Length>,
    pub points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlanar {
    pub sigma_alpha: f64,
    pub d_rot: f64,
    pub times: Vec<f64>,
    pub inertia: Option<f64>,
    pub n_alpha: Option<usize>,
    pub m_max: Option<usize>,
    pub series_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExclusion {
    pub gamma_cm: f64,
    pub gamma_rot: f64,
    pub rel_error: Option<f64>,
    pub r_c: Option<Vec<Length>>,
    pub r_c_min: Option<Length>,
    pub r_c_max: Option<Length>,
    pub points: Option<usize>,
}

/// Parsed configuration together with the raw bytes it came from.
pub struct Loaded {
    pub raw: RawConfig,
    pub bytes: Vec<u8>,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::config("--config", "not valid UTF-8"))?;
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    Ok(Loaded { raw, bytes })
}

fn require<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::config(key, "missing"))
}

impl RawConfig {
    pub fn body(&self) -> Result<BodySpec, CliError> {
        let b = require(&self.body, "body")?;
        let lib = |key: &str, e: csl_rotor::Error| CliError::config(key, e.to_string());
        let shape = b.shape.to_ascii_lowercase();
        if shape == "atoms" {
            for (key, set) in [
                ("body.length", b.length.is_some()),
                ("body.radius", b.radius.is_some()),
                ("body.density", b.density.is_some()),
                ("body.material", b.material.is_some()),
                ("body.mass", b.mass.is_some()),
            ] {
                if set {
                    return Err(CliError::config(key, "not used for shape \"atoms\""));
                }
            }
            let atoms = require(&b.atoms, "body.atoms")?;
            let mut out = Vec::with_capacity(atoms.len());
            for (i, a) in atoms.iter().enumerate() {
                let key = format!("body.atoms[{i}]");
                let p = &a.position;
                out.push(Atom {
                    mass: a.mass.kilograms(&format!("{key}.mass"))?,
                    position: Vec3::new(
                        p[0].meters(&format!("{key}.position"))?,
                        p[1].meters(&format!("{key}.position"))?,
                        p[2].meters(&format!("{key}.position"))?,
                    ),
                });
            }
            return BodySpec::atoms(out).map_err(|e| lib("body.atoms", e));
        }
        if b.atoms.is_some() {
            return Err(CliError::config("body.atoms", "only used for shape \"atoms\""));
        }
        let mass = match (b.density, &b.material, b.mass) {
            (Some(rho), None, None) => MassSpec::Density(rho),
            (None, Some(name), None) => MassSpec::Density(
                material_density(name).ok_or_else(|| CliError::config("body.material", format!("unknown material {name:?}")))?,
            ),
            (None, None, Some(m)) => MassSpec::Mass(m),
            (None, None, None) => return Err(CliError::config("body", "one of density, material or mass is required")),
            _ => return Err(CliError::config("body", "give only one of density, material and mass")),
        };
        let radius = require(&b.radius, "body.radius")?.meters("body.radius")?;
        let body = match shape.as_str() {
            "sphere" => {
                if b.length.is_some() {
                    return Err(CliError::config("body.length", "not used for shape \"sphere\""));
                }
                BodySpec::sphere(radius, mass)
            }
            "cylinder" | "spheroid" => {
                let length = require(&b.length, "body.length")?.meters("body.length")?;
                if shape == "cylinder" {
                    BodySpec::cylinder(length, radius, mass)
                } else {
                    BodySpec::spheroid(length, radius, mass)
                }
            }
            other => {
                return Err(CliError::config(
                    "body.shape",
                    format!("unknown shape {other:?}; expected cylinder, spheroid, sphere or atoms"),
                ))
            }
        };
        body.map_err(|e| lib("body", e))
    }

    pub fn m0(&self) -> Result<f64, CliError> {
        match self.csl.as_ref().and_then(|c| c.m0.as_ref()) {
            Some(m) => m.kilograms("csl.m0"),
            None => Ok(PhysicalConstants::codata().amu()),
        }
    }

    /// CSL parameters; `r_c` may be left out when a command sweeps it.
    pub fn csl(&self, default_r_c: Option<f64>) -> Result<CslParams, CliError> {
        let c = require(&self.csl, "csl")?;
        let lambda = *require(&c.lambda_c, "csl.lambda_c")?;
        let r_c = match (&c.r_c, default_r_c) {
            (Some(r), _) => r.meters("csl.r_c")?,
            (None, Some(r)) => r,
            (None, None) => return Err(CliError::config("csl.r_c", "missing")),
        };
        CslParams::new(lambda, r_c, self.m0()?).map_err(|e| CliError::config("csl", e.to_string()))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let d = QuadratureSpec::default();
        let Some(q) = &self.quadrature else { return Ok(d) };
        let scheme = match q.scheme.as_deref() {
            None | Some("tensor") => Scheme::TensorSpherical3D,
            Some("cubature") => Scheme::AdaptiveCubature,
            Some(other) => {
                return Err(CliError::config(
                    "quadrature.scheme",
                    format!("unknown scheme {other:?}; expected \"tensor\" or \"cubature\""),
                ))
            }
        };
        QuadratureSpec::new(
            q.rel_tol.unwrap_or(d.rel_tol),
            q.abs_tol.unwrap_or(d.abs_tol),
            q.max_evals.unwrap_or(d.max_evals),
            scheme,
        )
        .map_err(|e| CliError::config("quadrature", e.to_string()))
    }
}

pub fn sweep(
    table: &str,
    list: &Option<Vec<Length>>,
    min: &Option<Length>,
    max: &Option<Length>,
    points: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    let key = |k: &str| format!("{table}.{k}");
    let values = match (list, min, max, points) {
        (Some(list), None, None, None) => list
            .iter()
            .map(|l| l.meters(&key("r_c")))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(lo), Some(hi), Some(n)) => {
            let (lo, hi) = (lo.meters(&key("r_c_min"))?, hi.meters(&key("r_c_max"))?);
            if !(lo > 0.0 && hi > lo) {
                return Err(CliError::config(&key("r_c_max"), "need 0 < r_c_min < r_c_max"));
            }
            if n == 0 {
                return Err(CliError::config(&key("points"), "sweep is empty"));
            }
            if n == 1 {
                vec![lo]
            } else {
                csl_rotor::num::logspace(lo, hi, n)
            }
        }
        (None, None, None, None) => return Err(CliError::config(&key("r_c"), "missing")),
        _ => {
            return Err(CliError::config(
                table,
                "give either r_c = [...] or all of r_c_min, r_c_max and points",
            ))
        }
    };
    if values.is_empty() {
        return Err(CliError::config(&key("r_c"), "sweep is empty"));
    }
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(CliError::config(&key("r_c"), format!("value {bad} must be positive")));
    }
    Ok(values)
}
