//! Momentum and angular-momentum diffusion coefficients `D∥`, `D⊥`,
//! `D_rot`, their cylinder closed forms and the resulting heating rates.
//!
//! With `x = R_C² = R²/2r_C²` and `y = L_C = L/2r_C` the cylinder results
//! factor into one-dimensional functions of `x` and `y`. They are evaluated
//! in a grouping where each factor is of order one (scaled Bessel functions,
//! Taylor series near the origin), so no intermediate overflows or cancels.

use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formfactor::FormFactor;
use crate::localization::{axial_tensor_integrals, geometry_tensors, AxialTensors, GeometryTensors};
use crate::num::{from_usize, lit, to_f64, Real};
use crate::params::{BodySpec, CslParams, MassSpec, PhysicalConstants, Shape};
use crate::quadrature::QuadratureSpec;
use crate::specfun::{bessel_i_scaled, erf, scaled_i_taylor};

/// Diffusion coefficients of a body: `d_par`, `d_perp` in kg²m²/s³,
/// `d_rot` in (J·s)²/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSet<T> {
    pub d_par: T,
    pub d_perp: T,
    pub d_rot: T,
    pub body: BodySpec<T>,
    pub csl: CslParams<T>,
}

/// Diffusion coefficients per unit `λ_C ℏ² (M/m₀)²` for a unit-mass body in
/// units of `r_C`: `D∥ = λ_C ℏ² (M/m₀)² par / r_C²`, likewise `D⊥`, and
/// `D_rot = λ_C ℏ² (M/m₀)² rot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDiffusion<T> {
    pub par: T,
    pub perp: T,
    pub rot: T,
}

impl<T: Real> ReducedDiffusion<T> {
    fn from_axial(a: &AxialTensors<T>) -> Self {
        let half = lit::<T>(0.5);
        ReducedDiffusion {
            par: a.cm_par * half,
            perp: a.cm_perp * half,
            rot: a.rot_perp * half,
        }
    }

    fn into_set(self, body: &BodySpec<T>, csl: &CslParams<T>) -> DiffusionSet<T> {
        let hbar = PhysicalConstants::<T>::codata().hbar();
        let ratio = body.mass() / csl.m0();
        let pre = csl.lambda_c() * hbar * hbar * ratio * ratio;
        let rc2 = csl.r_c() * csl.r_c();
        DiffusionSet {
            d_par: pre * self.par / rc2,
            d_perp: pre * self.perp / rc2,
            d_rot: pre * self.rot,
            body: body.clone(),
            csl: *csl,
        }
    }
}

const SERIES_TERMS: usize = 40;

fn poly<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

/// Radial factors of the cylinder closed form at `x = R_C²`:
/// `P = 1 − e^{−x}(I₀+I₁)`, `S/x = e^{−x}I₁/x`, `W = 1 − e^{−x}(I₀+2I₁)`,
/// `K₂ = ∫₀ˣ e^{−z}I₂(z)/z dz = ½ − e^{−x}(I₀+I₁) + e^{−x}I₁/x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RadialFactors<T> {
    pub p: T,
    pub s_over_x: T,
    pub w: T,
    pub k2: T,
}

pub(crate) fn radial_factors<T: Real>(x: T) -> RadialFactors<T> {
    if x < T::one() {
        let c0 = scaled_i_taylor::<T>(0, SERIES_TERMS + 1);
        let c1 = scaled_i_taylor::<T>(1, SERIES_TERMS + 1);
        let c2 = scaled_i_taylor::<T>(2, SERIES_TERMS + 1);
        // coefficients of x^p for p ≥ 1, shifted down by one power
        let p_over_x: Vec<T> = (1..=SERIES_TERMS).map(|p| -c0[p] - c1[p - 1]).collect();
        let w_over_x: Vec<T> = (1..=SERIES_TERMS).map(|p| -c0[p] - lit::<T>(2.0) * c1[p - 1]).collect();
        let k2_over_x2: Vec<T> = (0..SERIES_TERMS).map(|j| c2[j] / from_usize::<T>(j + 2)).collect();
        RadialFactors {
            p: x * poly(&p_over_x, x),
            s_over_x: poly(&c1[..SERIES_TERMS], x),
            w: x * poly(&w_over_x, x),
            k2: x * x * poly(&k2_over_x2, x),
        }
    } else {
        let i0 = bessel_i_scaled(0, x);
        let i1 = bessel_i_scaled(1, x);
        let s_over_x = i1 / x;
        RadialFactors {
            p: T::one() - (i0 + i1),
            s_over_x,
            w: T::one() - (i0 + i1 + i1),
            k2: lit::<T>(0.5) - (i0 + i1) + s_over_x,
        }
    }
}

/// Axial factors of the cylinder closed form at `y = L_C`, each divided by
/// `y²`: `h₁ = 1 − e^{−y²}`, `h₂ = √π y erf(y) − h₁`,
/// `(h₂ − h₁)` and `γ = (2/3)h₁ + (y²/3)(h₂ − 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AxialFactors<T> {
    pub h1: T,
    pub h2: T,
    pub diff: T,
    pub gamma: T,
}

pub(crate) fn axial_factors<T: Real>(y: T) -> AxialFactors<T> {
    let y2 = y * y;
    if y < T::one() {
        // h1 = Σ a_n y^{2n}, h2 = Σ b_n y^{2n}
        let n_max = SERIES_TERMS;
        let mut a = vec![T::zero(); n_max + 2];
        let mut b = vec![T::zero(); n_max + 2];
        let mut fact = T::one(); // n!
        let mut fact_m1 = T::one(); // (n-1)!
        for n in 1..=n_max + 1 {
            fact = fact * from_usize::<T>(n);
            if n > 1 {
                fact_m1 = fact_m1 * from_usize::<T>(n - 1);
            }
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            a[n] = sign / fact;
            b[n] = sign * (lit::<T>(2.0) / (fact_m1 * from_usize::<T>(2 * n - 1)) - T::one() / fact);
        }
        let third = lit::<T>(1.0 / 3.0);
        // series in t = y², each divided by y²
        let h1: Vec<T> = (1..=n_max).map(|n| a[n]).collect();
        let h2: Vec<T> = (1..=n_max).map(|n| b[n]).collect();
        let diff: Vec<T> = (1..=n_max).map(|n| b[n] - a[n]).collect();
        let gamma: Vec<T> = (1..=n_max)
            .map(|n| {
                let mut c = lit::<T>(2.0 / 3.0) * a[n] + if n >= 2 { third * b[n - 1] } else { T::zero() };
                if n == 1 {
                    c -= lit::<T>(2.0 / 3.0);
                }
                c
            })
            .collect();
        AxialFactors {
            h1: poly(&h1, y2),
            h2: poly(&h2, y2),
            diff: poly(&diff, y2),
            gamma: poly(&gamma, y2),
        }
    } else {
        let h1 = -(-y2).exp_m1();
        let h2 = T::PI().sqrt() * y * erf(y) - h1;
        AxialFactors {
            h1: h1 / y2,
            h2: h2 / y2,
            diff: (h2 - h1) / y2,
            gamma: (lit::<T>(2.0 / 3.0) * h1 + y2 / lit(3.0) * (h2 - lit(2.0))) / y2,
        }
    }
}

/// Cylinder closed forms in reduced units, as functions of
/// `R_C = R/√2 r_C` and `L_C = L/2 r_C`.
pub fn cylinder_reduced<T: Real>(r_cap: T, l_cap: T) -> ReducedDiffusion<T> {
    let x = r_cap * r_cap;
    let rad = radial_factors(x);
    let ax = axial_factors(l_cap);
    let half = lit::<T>(0.5);
    ReducedDiffusion {
        par: ax.h1 * rad.p / x * half,
        perp: ax.h2 * rad.s_over_x * half,
        rot: half * (rad.s_over_x * ax.gamma + rad.k2 * ax.h1 - rad.w / x * ax.diff),
    }
}

/// Closed-form diffusion coefficients of a uniform cylinder with mass `m`
/// (kg), radius `r` and length `l` (m).
pub fn cylinder_diffusion_closed<T: Real>(csl: &CslParams<T>, m: T, r: T, l: T) -> Result<DiffusionSet<T>> {
    let body = BodySpec::cylinder(l, r, MassSpec::Mass(m))?;
    let rc = csl.r_c();
    let r_cap = r / (lit::<T>(2.0).sqrt() * rc);
    let l_cap = l / (lit::<T>(2.0) * rc);
    Ok(cylinder_reduced(r_cap, l_cap).into_set(&body, csl))
}

/// Reads `(D∥, D⊥, D_rot)` from the geometry tensors of an axisymmetric
/// body: `D⊥,∥ = λ_C ℏ² A_cm,⊥∥ / 2r_C²`, `D_rot = λ_C ℏ² A_rot,⊥ / 2`.
pub fn diffusion_from_tensors<T: Real>(
    t: &GeometryTensors<T>,
    body: &BodySpec<T>,
    csl: &CslParams<T>,
) -> Result<DiffusionSet<T>> {
    let ax = t.axial(lit(1e-6))?;
    let hbar = PhysicalConstants::<T>::codata().hbar();
    let pre = csl.lambda_c() * hbar * hbar / lit(2.0);
    let rc2 = csl.r_c() * csl.r_c();
    Ok(DiffusionSet {
        d_par: pre * ax.cm_par / rc2,
        d_perp: pre * ax.cm_perp / rc2,
        d_rot: pre * ax.rot_perp,
        body: body.clone(),
        csl: *csl,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    kind: u8,
    radius: u64,
    length: u64,
    rel_tol: u64,
    scheme: u8,
}

/// Memo of reduced quadrature results keyed by shape and reduced
/// dimensions. Safe for concurrent use; a value is computed at most once
/// per key in the common case and is identical whichever thread wins.
#[derive(Debug, Default)]
pub struct DiffusionCache {
    map: RwLock<HashMap<CacheKey, [f64; 3]>>,
}

impl DiffusionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, key: &CacheKey) -> Option<[f64; 3]> {
        self.map.read().ok().and_then(|m| m.get(key).copied())
    }

    fn insert(&self, key: CacheKey, value: [f64; 3]) {
        if let Ok(mut m) = self.map.write() {
            m.entry(key).or_insert(value);
        }
    }
}

/// Reduced coefficients by quadrature of the geometry tensors, memoized.
pub fn reduced_by_quadrature<T: Real>(
    body: &BodySpec<T>,
    r_c: T,
    spec: &QuadratureSpec<T>,
    cache: Option<&DiffusionCache>,
) -> Result<ReducedDiffusion<T>> {
    let reduced = body.reduced(r_c)?;
    let (kind, radius, length) = match *reduced.shape() {
        Shape::Cylinder { length, radius } => (0u8, radius, length),
        Shape::Spheroid { length, radius } => (1, radius, length),
        Shape::Sphere { radius } => (2, radius, radius + radius),
        Shape::Atoms(_) => {
            return Err(Error::NotAxisymmetric {
                what: "reduced_by_quadrature",
            })
        }
    };
    let key = CacheKey {
        kind,
        radius: to_f64(radius).to_bits(),
        length: to_f64(length).to_bits(),
        rel_tol: to_f64(spec.rel_tol).to_bits(),
        scheme: spec.scheme as u8,
    };
    if let Some(v) = cache.and_then(|c| c.get(&key)) {
        return Ok(ReducedDiffusion {
            par: lit(v[0]),
            perp: lit(v[1]),
            rot: lit(v[2]),
        });
    }
    let axial = axial_tensor_integrals(&FormFactor::new(reduced), spec)?;
    let out = ReducedDiffusion::from_axial(&axial);
    if let Some(c) = cache {
        c.insert(key, [to_f64(out.par), to_f64(out.perp), to_f64(out.rot)]);
    }
    Ok(out)
}

/// Diffusion coefficients of any axisymmetric body: closed form for
/// cylinders, cached quadrature otherwise.
pub fn body_diffusion<T: Real>(
    body: &BodySpec<T>,
    csl: &CslParams<T>,
    spec: &QuadratureSpec<T>,
    cache: Option<&DiffusionCache>,
) -> Result<DiffusionSet<T>> {
    match *body.shape() {
        Shape::Cylinder { length, radius } => cylinder_diffusion_closed(csl, body.mass(), radius, length),
        Shape::Atoms(_) => {
            let t = geometry_tensors(&FormFactor::new(body.clone()), csl, spec)?;
            diffusion_from_tensors(&t, body, csl)
        }
        _ => Ok(reduced_by_quadrature(body, csl.r_c(), spec, cache)?.into_set(body, csl)),
    }
}

/// `(D∥, D⊥, D_rot)` over a sweep of localization lengths, in parallel.
pub fn diffusion_curve<T: Real>(
    body: &BodySpec<T>,
    csl: &CslParams<T>,
    r_cs: &[T],
    spec: &QuadratureSpec<T>,
    cache: Option<&DiffusionCache>,
) -> Result<Vec<DiffusionSet<T>>> {
    r_cs.par_iter()
        .map(|&rc| body_diffusion(body, &csl.with_r_c(rc)?, spec, cache))
        .collect()
}

/// Second-moment growth and heating rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatingRates<T> {
    /// `∂t⟨P²⟩ = 2D∥ + 4D⊥`, kg²m²/s³.
    pub dp2_dt: T,
    /// `∂t⟨J²⟩ = 4D_rot`, (J·s)²/s.
    pub dj2_dt: T,
    /// `Γ_cm = 2D⊥/(M k_B)`, K/s.
    pub gamma_cm: T,
    /// `Γ_rot = 2D_rot/(I⊥ k_B)`, K/s.
    pub gamma_rot: T,
}

pub fn heating_rates<T: Real>(d: &DiffusionSet<T>, body: &BodySpec<T>) -> HeatingRates<T> {
    let k_b = PhysicalConstants::<T>::codata().k_b();
    let two = lit::<T>(2.0);
    let i_perp = body.transverse_inertia();
    HeatingRates {
        dp2_dt: two * d.d_par + lit::<T>(4.0) * d.d_perp,
        dj2_dt: lit::<T>(4.0) * d.d_rot,
        gamma_cm: two * d.d_perp / (body.mass() * k_b),
        gamma_rot: if i_perp > T::zero() {
            two * d.d_rot / (i_perp * k_b)
        } else {
            T::zero()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_body_limits() {
        let r = cylinder_reduced(1e-4f64, 1e-4);
        assert!((r.par - 0.25).abs() < 1e-7);
        assert!((r.perp - 0.25).abs() < 1e-7);
        let (x, y) = (1e-8f64, 1e-4f64);
        let want = (y * y / 3.0 - x / 2.0).powi(2) / 8.0;
        assert!((r.rot - want).abs() < 1e-6 * want);
    }

    #[test]
    fn factors_continuous_at_switch() {
        let below = radial_factors(1.0f64 - 1e-12);
        let above = radial_factors(1.0f64);
        for (a, b) in [
            (below.p, above.p),
            (below.s_over_x, above.s_over_x),
            (below.w, above.w),
            (below.k2, above.k2),
        ] {
            assert!((a - b).abs() < 1e-10 * b.abs(), "{a} vs {b}");
        }
        let below = axial_factors(1.0f64 - 1e-12);
        let above = axial_factors(1.0f64);
        for (a, b) in [
            (below.h1, above.h1),
            (below.h2, above.h2),
            (below.diff, above.diff),
            (below.gamma, above.gamma),
        ] {
            assert!((a - b).abs() < 1e-10 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn zero_coefficients_give_zero_heating() {
        let body = BodySpec::sphere(1e-7, MassSpec::Mass(1e-18)).unwrap();
        let d = DiffusionSet {
            d_par: 0.0,
            d_perp: 0.0,
            d_rot: 0.0,
            body: body.clone(),
            csl: CslParams::with_amu(1e-8, 1e-7).unwrap(),
        };
        let h = heating_rates(&d, &body);
        assert_eq!((h.dp2_dt, h.dj2_dt, h.gamma_cm, h.gamma_rot), (0.0, 0.0, 0.0, 0.0));
    }
}
