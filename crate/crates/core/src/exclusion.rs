//! Lower bounds on `λ_C` from measured heating rates, and extraction of
//! `(r_C, λ_C)` where the translational and rotational bounds cross.
//!
//! Diffusion is linear in `λ_C`, so a heating rate `Γ` fixes
//! `λ_C = Γ X k_B / 2d(r_C)` with `d = D/λ_C` and `X = M` (centre of mass,
//! transverse `D⊥`) or `X = I⊥` (rotation, `D_rot`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{body_diffusion, heating_rates, DiffusionCache, HeatingRates};
use crate::error::{invalid, Error, Result};
use crate::num::{lit, to_f64, Real};
use crate::params::{BodySpec, CslParams, PhysicalConstants, Shape};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Cm,
    Rot,
}

/// Heating rates in K/s with a common fractional uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatingMeasurement<T> {
    pub gamma_cm: T,
    pub gamma_rot: T,
    pub rel_error: T,
    pub body: BodySpec<T>,
}

impl<T: Real> HeatingMeasurement<T> {
    pub fn new(gamma_cm: T, gamma_rot: T, rel_error: T, body: BodySpec<T>) -> Result<Self> {
        if !(gamma_cm > T::zero()) || !gamma_cm.is_finite() {
            return Err(invalid("gamma_cm", "must be finite and positive"));
        }
        if !(gamma_rot > T::zero()) || !gamma_rot.is_finite() {
            return Err(invalid("gamma_rot", "must be finite and positive"));
        }
        if !(rel_error >= T::zero() && rel_error < T::one()) {
            return Err(invalid("rel_error", "must lie in [0, 1)"));
        }
        Ok(HeatingMeasurement {
            gamma_cm,
            gamma_rot,
            rel_error,
            body,
        })
    }

    pub fn gamma(&self, channel: Channel) -> T {
        match channel {
            Channel::Cm => self.gamma_cm,
            Channel::Rot => self.gamma_rot,
        }
    }
}

/// Bound `λ_C(r_C)` for one channel, with the curves obtained by moving
/// `Γ` to `(1 ∓ rel_error) Γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionCurve<T> {
    pub channel: Channel,
    pub r_c: Vec<T>,
    pub lambda_bound: Vec<T>,
    pub band_low: Vec<T>,
    pub band_high: Vec<T>,
}

/// Crossing of the two bound curves. The error region is the rectangle
/// spanned by the four crossings of the shifted curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection<T> {
    pub r_c: T,
    pub lambda_c: T,
    pub r_c_range: (T, T),
    pub lambda_c_range: (T, T),
}

/// `D/λ_C` for one channel: `D⊥/λ_C` (kg²m²/s²) or `D_rot/λ_C` ((J·s)²).
pub fn per_lambda_coefficient<T: Real>(
    body: &BodySpec<T>,
    r_c: T,
    m0: T,
    channel: Channel,
    spec: &QuadratureSpec<T>,
    cache: Option<&DiffusionCache>,
) -> Result<T> {
    if channel == Channel::Rot && matches!(body.shape(), Shape::Sphere { .. }) {
        return Err(Error::ChannelInsensitive { r_c: to_f64(r_c) });
    }
    let csl = CslParams::new(T::one(), r_c, m0)?;
    let d = body_diffusion(body, &csl, spec, cache)?;
    let v = match channel {
        Channel::Cm => d.d_perp,
        Channel::Rot => d.d_rot,
    };
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::ChannelInsensitive { r_c: to_f64(r_c) });
    }
    Ok(v)
}

fn channel_inertia<T: Real>(body: &BodySpec<T>, channel: Channel) -> T {
    match channel {
        Channel::Cm => body.mass(),
        Channel::Rot => body.transverse_inertia(),
    }
}

/// Heating rates produced by given CSL parameters, the inverse of
/// [`lambda_bound`].
pub fn forward_heating<T: Real>(
    body: &BodySpec<T>,
    csl: &CslParams<T>,
    spec: &QuadratureSpec<T>,
    cache: Option<&DiffusionCache>,
) -> Result<HeatingRates<T>> {
    let d = body_diffusion(body, csl, spec, cache)?;
    Ok(heating_rates(&d, body))
}

/// Bound and evaluation context for one measurement.
#[derive(Debug)]
pub struct Exclusion<T> {
    pub measurement: HeatingMeasurement<T>,
    pub m0: T,
    pub spec: QuadratureSpec<T>,
    cache: DiffusionCache,
}

impl<T: Real> Exclusion<T> {
    pub fn new(measurement: HeatingMeasurement<T>, m0: T, spec: QuadratureSpec<T>) -> Result<Self> {
        if !(m0 > T::zero()) {
            return Err(invalid("m0", "must be positive"));
        }
        Ok(Exclusion {
            measurement,
            m0,
            spec,
            cache: DiffusionCache::new(),
        })
    }

    /// `λ_C = Γ X k_B / 2d(r_C)` in 1/s.
    pub fn lambda_bound(&self, r_c: T, channel: Channel) -> Result<T> {
        let body = &self.measurement.body;
        let d = per_lambda_coefficient(body, r_c, self.m0, channel, &self.spec, Some(&self.cache))?;
        let k_b = PhysicalConstants::<T>::codata().k_b();
        Ok(self.measurement.gamma(channel) * channel_inertia(body, channel) * k_b / (lit::<T>(2.0) * d))
    }

    /// Bound curve on a grid of `r_C` values (m), evaluated in parallel.
    pub fn curve(&self, channel: Channel, r_cs: &[T]) -> Result<ExclusionCurve<T>> {
        if r_cs.is_empty() {
            return Err(invalid("r_c", "grid is empty"));
        }
        let bounds: Vec<T> = r_cs
            .par_iter()
            .map(|&rc| self.lambda_bound(rc, channel))
            .collect::<Result<_>>()?;
        let e = self.measurement.rel_error;
        Ok(ExclusionCurve {
            channel,
            r_c: r_cs.to_vec(),
            band_low: bounds.iter().map(|b| *b * (T::one() - e)).collect(),
            band_high: bounds.iter().map(|b| *b * (T::one() + e)).collect(),
            lambda_bound: bounds,
        })
    }

    /// `log λ_cm − log λ_rot` at `r_C = e^{x}`.
    fn log_gap(&self, x: T) -> Result<T> {
        let rc = x.exp();
        Ok(self.lambda_bound(rc, Channel::Cm)?.ln() - self.lambda_bound(rc, Channel::Rot)?.ln())
    }

    /// Root of `log_gap(x) + shift` in `[lo, hi]` by bisection, with the
    /// gap values at the ends already known.
    fn bisect(&self, mut lo: T, mut hi: T, mut g_lo: T, shift: T) -> Result<T> {
        let tol = lit::<T>(1e-9);
        while hi - lo > tol {
            let mid = (lo + hi) / lit(2.0);
            let g_mid = self.log_gap(mid)? + shift;
            if g_mid == T::zero() {
                return Ok(mid);
            }
            if (g_mid > T::zero()) == (g_lo > T::zero()) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) / lit(2.0))
    }

    /// Locates the unique crossing of the two bound curves. The curves'
    /// common grid brackets the crossing, which is then refined in
    /// `log r_C` to a relative tolerance of `1e-8`.
    pub fn intersect(&self, cm: &ExclusionCurve<T>, rot: &ExclusionCurve<T>) -> Result<Intersection<T>> {
        if cm.channel != Channel::Cm || rot.channel != Channel::Rot {
            return Err(invalid("curves", "expected one cm and one rot curve"));
        }
        if cm.r_c != rot.r_c || cm.r_c.len() < 2 {
            return Err(invalid("curves", "must share an r_C grid of at least two points"));
        }
        let xs: Vec<T> = cm.r_c.iter().map(|r| r.ln()).collect();
        let gaps: Vec<T> = cm
            .lambda_bound
            .iter()
            .zip(&rot.lambda_bound)
            .map(|(a, b)| a.ln() - b.ln())
            .collect();
        let crossing = |shift: T| -> Result<T> {
            let mut brackets = Vec::new();
            for i in 0..xs.len() - 1 {
                let (a, b) = (gaps[i] + shift, gaps[i + 1] + shift);
                if a == T::zero() {
                    brackets.push((i, true));
                } else if (a > T::zero()) != (b > T::zero()) && b != T::zero() {
                    brackets.push((i, false));
                }
            }
            let last = *gaps.last().unwrap() + shift;
            if last == T::zero() {
                brackets.push((xs.len() - 1, true));
            }
            match brackets.len() {
                0 => Err(Error::NoIntersection),
                1 => {
                    let (i, exact) = brackets[0];
                    if exact {
                        Ok(xs[i])
                    } else {
                        self.bisect(xs[i], xs[i + 1], gaps[i] + shift, shift)
                    }
                }
                _ => Err(Error::AmbiguousIntersection {
                    roots: brackets.iter().map(|(i, _)| to_f64(cm.r_c[*i])).collect(),
                }),
            }
        };
        let x0 = crossing(T::zero())?;
        let r_c = x0.exp();
        let lambda_c = self.lambda_bound(r_c, Channel::Cm)?;

        let e = self.measurement.rel_error;
        let (mut r_lo, mut r_hi, mut l_lo, mut l_hi) = (r_c, r_c, lambda_c, lambda_c);
        if e > T::zero() {
            let factors = [T::one() - e, T::one() + e];
            for a in factors {
                for b in factors {
                    // log(a λ_cm) − log(b λ_rot) = gap + log(a/b)
                    let x = crossing((a / b).ln())?;
                    let rc = x.exp();
                    let lam = a * self.lambda_bound(rc, Channel::Cm)?;
                    r_lo = r_lo.min(rc);
                    r_hi = r_hi.max(rc);
                    l_lo = l_lo.min(lam);
                    l_hi = l_hi.max(lam);
                }
            }
        }
        Ok(Intersection {
            r_c,
            lambda_c,
            r_c_range: (r_lo, r_hi),
            lambda_c_range: (l_lo, l_hi),
        })
    }
}
