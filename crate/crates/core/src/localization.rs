//! Orientational localization rates and the geometry tensors `A_cm`,
//! `A_rot` that govern small displacements and small rotations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::formfactor::FormFactor;
use crate::linalg::{Mat3, Vec3};
use crate::num::{lit, Real};
use crate::params::{axis_angle_between, relative_orientation, BodySpec, CslParams, Orientation, Shape};
use crate::quadrature::{integrate_axisymmetric, integrate_radial_angular, integrate_radial_angular_grouped, QuadratureSpec, SphericalDomain};

/// Dimensionless geometry tensors in the body frame.
///
/// `a_cm = (r_C⁵/π^{3/2}m₀²) ∫d³k e^{−r_C²k²} |ρ̃|² k⊗k` and
/// `a_rot = (r_C³/π^{3/2}m₀²) ∫d³k e^{−r_C²k²} Re[(k×∇ρ̃)⊗(k×∇ρ̃)*]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryTensors<T> {
    pub a_cm: Mat3<T>,
    pub a_rot: Mat3<T>,
}

/// Transverse and axial entries of axisymmetric geometry tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialTensors<T> {
    pub cm_perp: T,
    pub cm_par: T,
    pub rot_perp: T,
}

impl<T: Real> GeometryTensors<T> {
    /// Reads `(A_cm,⊥, A_cm,∥, A_rot,⊥)` from tensors of an axisymmetric body,
    /// checking that they have the axisymmetric structure to within `tol`
    /// relative to their largest entry.
    pub fn axial(&self, tol: T) -> Result<AxialTensors<T>> {
        let cm = &self.a_cm;
        let rot = &self.a_rot;
        let scale_cm = cm.max_abs().max(T::min_positive_value());
        let scale_rot = rot.max_abs().max(T::min_positive_value());
        let offdiag = |m: &Mat3<T>| {
            let mut o = T::zero();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        o = o.max(m[(i, j)].abs());
                    }
                }
            }
            o
        };
        let ok = offdiag(cm) <= tol * scale_cm
            && offdiag(rot) <= tol * scale_rot
            && (cm[(0, 0)] - cm[(1, 1)]).abs() <= tol * scale_cm
            && (rot[(0, 0)] - rot[(1, 1)]).abs() <= tol * scale_rot
            && rot[(2, 2)].abs() <= tol * scale_rot;
        if !ok {
            return Err(Error::NotAxisymmetric {
                what: "reading diffusion coefficients from geometry tensors",
            });
        }
        let half = lit::<T>(0.5);
        Ok(AxialTensors {
            cm_perp: (cm[(0, 0)] + cm[(1, 1)]) * half,
            cm_par: cm[(2, 2)],
            rot_perp: (rot[(0, 0)] + rot[(1, 1)]) * half,
        })
    }
}

fn reduced_form_factor<T: Real>(ff: &FormFactor<T>, r_c: T) -> Result<FormFactor<T>> {
    Ok(FormFactor::new(ff.body().reduced(r_c)?))
}

/// Axisymmetric entries of the geometry tensors without the `(M/m₀)²` factor,
/// i.e. for a unit-mass body with lengths in units of `r_C`.
pub(crate) fn axial_tensor_integrals<T: Real>(
    reduced: &FormFactor<T>,
    spec: &QuadratureSpec<T>,
) -> Result<AxialTensors<T>> {
    let half = lit::<T>(0.5);
    let est = integrate_axisymmetric(
        |k, theta| {
            let (s, c) = theta.sin_cos();
            let (kp, kz) = (k * s, k * c);
            let smp = reduced.axial_sample(kp, kz).expect("axisymmetric body");
            let v2 = smp.value * smp.value;
            let d = smp.beta - smp.alpha;
            [v2 * kp * kp * half, v2 * kz * kz, d * d * kz * kz * kp * kp * half]
        },
        T::one(),
        true,
        spec,
    )?;
    let norm = T::one() / T::PI().powf(lit(1.5));
    Ok(AxialTensors {
        cm_perp: est.value[0] * norm,
        cm_par: est.value[1] * norm,
        rot_perp: est.value[2] * norm,
    })
}

/// Geometry tensors of a body by quadrature. Axisymmetric bodies use the 2D
/// path, point-mass bodies the full 3D path.
pub fn geometry_tensors<T: Real>(
    ff: &FormFactor<T>,
    csl: &CslParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<GeometryTensors<T>> {
    let reduced = reduced_form_factor(ff, csl.r_c())?;
    let ratio = ff.mass() / csl.m0();
    let m2 = ratio * ratio;
    if ff.body().is_axisymmetric() {
        let a = axial_tensor_integrals(&reduced, spec)?;
        return Ok(GeometryTensors {
            a_cm: Mat3::diag(a.cm_perp, a.cm_perp, a.cm_par).scale(m2),
            a_rot: Mat3::diag(a.rot_perp, a.rot_perp, T::zero()).scale(m2),
        });
    }
    let v = general_tensor_integrals(&reduced, spec)?;
    Ok(GeometryTensors {
        a_cm: v.a_cm.scale(m2),
        a_rot: v.a_rot.scale(m2),
    })
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn unit_direction<T: Real>(theta: T, phi: T) -> Vec3<T> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Geometry tensors of a reduced body on the full `k` sphere.
pub(crate) fn general_tensor_integrals<T: Real>(
    reduced: &FormFactor<T>,
    spec: &QuadratureSpec<T>,
) -> Result<GeometryTensors<T>> {
    let est = integrate_radial_angular_grouped(
        |k, theta, phi| {
            let kv = unit_direction(theta, phi) * k;
            let rho = reduced.at_body(kv);
            let g = reduced.gradient_at_body(kv);
            let a2 = rho.norm_sqr();
            // v = k × ∇ρ̃ (complex)
            let v = [
                g[2] * kv.y - g[1] * kv.z,
                g[0] * kv.z - g[2] * kv.x,
                g[1] * kv.x - g[0] * kv.y,
            ];
            let mut out = [T::zero(); 12];
            for (n, &(i, j)) in PAIRS.iter().enumerate() {
                out[n] = a2 * kv[i] * kv[j];
                out[6 + n] = (v[i] * v[j].conj()).re;
            }
            out
        },
        T::one(),
        SphericalDomain::UpperHalf,
        spec,
        &[1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2],
    )?;
    let norm = T::one() / T::PI().powf(lit(1.5));
    let mut a_cm = Mat3::zero();
    let mut a_rot = Mat3::zero();
    for (n, &(i, j)) in PAIRS.iter().enumerate() {
        a_cm[(i, j)] = est.value[n] * norm;
        a_cm[(j, i)] = est.value[n] * norm;
        a_rot[(i, j)] = est.value[6 + n] * norm;
        a_rot[(j, i)] = est.value[6 + n] * norm;
    }
    Ok(GeometryTensors { a_cm, a_rot })
}

/// Localization rate `F(Ω, Ω′)` in 1/s by quadrature of
/// `(r_C³λ_C/2π^{3/2}m₀²) ∫d³k e^{−r_C²k²} |ρ̃(Rᵀ(Ω)k) − ρ̃(Rᵀ(Ω′)k)|²`.
pub fn loc_rate_full<T: Real>(
    ff: &FormFactor<T>,
    csl: &CslParams<T>,
    a: &Orientation<T>,
    b: &Orientation<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if ff.body().is_axisymmetric() {
        let alpha = axis_angle_between(ff.body(), a, b)?;
        return loc_rate_axes(ff, csl, alpha, spec);
    }
    let reduced = reduced_form_factor(ff, csl.r_c())?;
    let rel = relative_orientation(a, b);
    let integral = integrate_radial_angular(
        |k, theta, phi| {
            let kv = unit_direction(theta, phi) * k;
            [(reduced.evaluate_rotated(kv, &rel) - reduced.at_body(kv)).norm_sqr()]
        },
        T::one(),
        SphericalDomain::UpperHalf,
        spec,
    )?;
    Ok(rate_prefactor(ff, csl) * integral.value[0])
}

fn rate_prefactor<T: Real>(ff: &FormFactor<T>, csl: &CslParams<T>) -> T {
    let ratio = ff.mass() / csl.m0();
    csl.lambda_c() * ratio * ratio / (lit::<T>(2.0) * T::PI().powf(lit(1.5)))
}

/// `F` for an axisymmetric body whose symmetry axes enclose the angle
/// `alpha` (rad). Exactly `0` and `π` return zero without quadrature.
pub fn loc_rate_axes<T: Real>(ff: &FormFactor<T>, csl: &CslParams<T>, alpha: T, spec: &QuadratureSpec<T>) -> Result<T> {
    if !ff.body().is_axisymmetric() {
        return Err(Error::NotAxisymmetric { what: "loc_rate_axes" });
    }
    if alpha == T::zero() || alpha == T::PI() {
        return Ok(T::zero());
    }
    if !alpha.is_finite() {
        return Err(invalid("alpha", "must be finite"));
    }
    let reduced = reduced_form_factor(ff, csl.r_c())?;
    // axes symmetric about e3 in the x–z plane: the integrand is even under
    // each coordinate reflection
    let (s, c) = (alpha / lit(2.0)).sin_cos();
    let m1 = Vec3::new(s, T::zero(), c);
    let m2 = Vec3::new(-s, T::zero(), c);
    let integral = integrate_radial_angular(
        |k, theta, phi| {
            let kv = unit_direction(theta, phi) * k;
            let d = reduced.axial_difference(kv, m1, m2);
            [d * d]
        },
        T::one(),
        SphericalDomain::Octant,
        spec,
    )?;
    Ok(rate_prefactor(ff, csl) * integral.value[0])
}

/// Body family for the small-particle closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallKind {
    Cylinder,
    Spheroid,
}

impl SmallKind {
    /// Constants `(a, b)` with `Q⊥ = M R²/a`, `Q∥ = M L²/b`.
    pub fn constants(self) -> (f64, f64) {
        match self {
            SmallKind::Cylinder => (4.0, 12.0),
            SmallKind::Spheroid => (5.0, 20.0),
        }
    }
}

/// Small-particle closed form
/// `F = (λ_C M²/8m₀²r_C⁴)(R²/a − L²/b)² sin²α` in 1/s, valid when the body
/// is much smaller than `r_C`.
pub fn loc_rate_small<T: Real>(kind: SmallKind, csl: &CslParams<T>, m: T, r: T, l: T, alpha: T) -> T {
    let (a, b) = kind.constants();
    let shape = r * r / lit(a) - l * l / lit(b);
    let rc2 = csl.r_c() * csl.r_c();
    let ratio = m / csl.m0();
    let sa = alpha.sin();
    csl.lambda_c() * ratio * ratio / lit(8.0) * (shape / rc2) * (shape / rc2) * sa * sa
}

/// Small-particle closed form for a continuous axisymmetric body.
pub fn loc_rate_small_body<T: Real>(body: &BodySpec<T>, csl: &CslParams<T>, alpha: T) -> Result<T> {
    let m = body.mass();
    match *body.shape() {
        Shape::Cylinder { length, radius } => Ok(loc_rate_small(SmallKind::Cylinder, csl, m, radius, length, alpha)),
        Shape::Spheroid { length, radius } => Ok(loc_rate_small(SmallKind::Spheroid, csl, m, radius, length, alpha)),
        Shape::Sphere { radius } => Ok(loc_rate_small(SmallKind::Spheroid, csl, m, radius, radius + radius, alpha)),
        Shape::Atoms(_) => Err(Error::NotAxisymmetric { what: "loc_rate_small" }),
    }
}

/// `F(α)` on a grid of axis angles, evaluated in parallel.
pub fn loc_rate_curve<T: Real>(
    ff: &FormFactor<T>,
    csl: &CslParams<T>,
    alphas: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Vec<T>> {
    if !ff.body().is_axisymmetric() {
        return Err(Error::NotAxisymmetric { what: "loc_rate_curve" });
    }
    alphas.par_iter().map(|&a| loc_rate_axes(ff, csl, a, spec)).collect()
}

/// Maximum of `F(α)` over `[0, π/2]`: coarse scan on `n_scan` points, then
/// golden-section refinement to `tol` rad. Returns `(α_max, F_max)`.
pub fn max_loc_rate<T: Real>(
    ff: &FormFactor<T>,
    csl: &CslParams<T>,
    spec: &QuadratureSpec<T>,
    n_scan: usize,
    tol: T,
) -> Result<(T, T)> {
    let n_scan = n_scan.max(3);
    let half_pi = T::FRAC_PI_2();
    let grid = crate::num::linspace(T::zero(), half_pi, n_scan);
    let values = loc_rate_curve(ff, csl, &grid, spec)?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n_scan - 1)];
    let f = |a: T| loc_rate_axes(ff, csl, a, spec);
    let (a_star, f_star) = golden_max(f, lo, hi, tol)?;
    if f_star > values[best] {
        Ok((a_star, f_star))
    } else {
        Ok((grid[best], values[best]))
    }
}

fn golden_max<T: Real>(f: impl Fn(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<(T, T)> {
    let g = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        }
    }
    // the maximum may sit on a bracket end
    for end in [lo, hi] {
        let v = f(end)?;
        if v > best.1 {
            best = (end, v);
        }
    }
    Ok(best)
}

/// Divides a rate curve by `f_max`. When the located maximum exceeds the
/// largest grid value by no more than `rel_tol`, the grid maximum is used
/// instead so the normalized curve peaks at exactly 1.
pub fn normalize_curve<T: Real>(values: &[T], f_max: T, rel_tol: T) -> Vec<T> {
    let grid_max = values.iter().copied().fold(T::zero(), T::max);
    let norm = if f_max <= grid_max * (T::one() + rel_tol) {
        grid_max.max(f_max.min(grid_max))
    } else {
        f_max
    };
    if norm == T::zero() {
        return vec![T::zero(); values.len()];
    }
    values.iter().map(|v| *v / norm).collect()
}

/// Spatial localization rate (1/s) for a small displacement `dr` (m) at
/// orientation `omega0`: `(λ_C/2r_C²) dr·R A_cm Rᵀ dr`.
pub fn cm_loc_rate<T: Real>(
    tensors: &GeometryTensors<T>,
    csl: &CslParams<T>,
    dr: Vec3<T>,
    omega0: &Orientation<T>,
) -> T {
    let a = tensors.a_cm.rotated(&omega0.matrix());
    csl.lambda_c() / (lit::<T>(2.0) * csl.r_c() * csl.r_c()) * a.quad_form(dr)
}

/// Orientational rate (1/s) for axisymmetric tensors,
/// `(λ_C A_rot,⊥/2) |m(Ω)×m(Ω′)|²`; other bodies fall back to
/// [`rot_loc_rate_small_angle`].
pub fn rot_loc_rate<T: Real>(
    tensors: &GeometryTensors<T>,
    csl: &CslParams<T>,
    a: &Orientation<T>,
    b: &Orientation<T>,
) -> T {
    match tensors.axial(lit(1e-6)) {
        Ok(ax) => {
            let c = a.symmetry_axis().cross(b.symmetry_axis());
            csl.lambda_c() * ax.rot_perp / lit(2.0) * c.norm_squared()
        }
        Err(_) => rot_loc_rate_small_angle(tensors, csl, a, b),
    }
}

/// `(λ_C/2) δΩ·R A_rot Rᵀ δΩ` with `δΩ` the rotation vector of
/// `R(Ω′)Rᵀ(Ω)`, valid for small relative rotations.
pub fn rot_loc_rate_small_angle<T: Real>(
    tensors: &GeometryTensors<T>,
    csl: &CslParams<T>,
    a: &Orientation<T>,
    b: &Orientation<T>,
) -> T {
    let d = b.compose(&a.inverse()).rotation_vector();
    let rot = tensors.a_rot.rotated(&a.matrix());
    csl.lambda_c() / lit(2.0) * rot.quad_form(d)
}
