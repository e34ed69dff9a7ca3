//! Fourier transforms `ρ̃(k) = ∫d³r ρ(r) e^{−ik·r}` of the body mass
//! density (kg), normalized to `ρ̃(0) = M`.

use num_complex::Complex;

use crate::linalg::Vec3;
use crate::num::{lit, Real};
use crate::params::{Atom, BodySpec, Orientation, Shape};
use crate::specfun::{bessel_j2_over_x2, jinc, sinc, sinc_prime_over_x, spherical_j1_over_x, spherical_j2_over_x2};

/// Uniform cylinder: `M · 2J₁(R k⊥)/(R k⊥) · sinc(L k∥/2)`.
pub fn cylinder_ff<T: Real>(k_perp: T, k_par: T, m: T, r: T, l: T) -> T {
    m * jinc(r * k_perp) * sinc(l * k_par / lit(2.0))
}

/// Uniform spheroid with full length `l` along the symmetry axis and
/// equatorial radius `r`: `M √(9π/2) J_{3/2}(u)/u^{3/2}` with
/// `u = √(R²k⊥² + L²k∥²/4)`, evaluated as `3M j₁(u)/u`.
pub fn spheroid_ff<T: Real>(k_perp: T, k_par: T, m: T, r: T, l: T) -> T {
    let u = spheroid_arg(k_perp, k_par, r, l);
    m * lit(3.0) * spherical_j1_over_x(u)
}

/// Uniform sphere: `3M (sin x − x cos x)/x³` with `x = kR`.
pub fn sphere_ff<T: Real>(k: T, m: T, r: T) -> T {
    m * lit(3.0) * spherical_j1_over_x(k * r)
}

/// Point masses: `Σ m_n e^{−ik·r_n}`.
pub fn atoms_ff<T: Real>(k: Vec3<T>, atoms: &[Atom<T>]) -> Complex<T> {
    atoms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, a| {
        let (s, c) = k.dot(a.position).sin_cos();
        acc + Complex::new(a.mass * c, -a.mass * s)
    })
}

fn spheroid_arg<T: Real>(k_perp: T, k_par: T, r: T, l: T) -> T {
    let a = r * k_perp;
    let b = l * k_par / lit(2.0);
    a.hypot(b)
}

/// Value and gradient of an axisymmetric form factor at `(k⊥, k∥)`; the
/// gradient is `∇ρ̃ = alpha · k⊥_vec + beta · k∥ e₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialSample<T> {
    pub value: T,
    pub alpha: T,
    pub beta: T,
}

/// Form factor of a rigid body, evaluated in body or space frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactor<T> {
    body: BodySpec<T>,
}

impl<T: Real> FormFactor<T> {
    pub fn new(body: BodySpec<T>) -> Self {
        FormFactor { body }
    }

    pub fn body(&self) -> &BodySpec<T> {
        &self.body
    }

    pub fn mass(&self) -> T {
        self.body.mass()
    }

    /// Whether `ρ̃(k) = ρ̃(−k)` is real (uniform continuous shapes).
    pub fn is_inversion_symmetric(&self) -> bool {
        self.body.is_axisymmetric()
    }

    /// Value at a body-frame wavevector (1/m).
    pub fn at_body(&self, k: Vec3<T>) -> Complex<T> {
        match self.body.shape() {
            Shape::Atoms(atoms) => atoms_ff(k, atoms),
            _ => {
                let k_perp = k.x.hypot(k.y);
                Complex::new(self.axial_value(k_perp, k.z), T::zero())
            }
        }
    }

    /// `ρ̃(Rᵀ(Ω) k)` for a space-frame wavevector `k`.
    pub fn evaluate_rotated(&self, k: Vec3<T>, orientation: &Orientation<T>) -> Complex<T> {
        self.at_body(orientation.to_body(k))
    }

    /// Value of an axisymmetric form factor; for point masses this returns
    /// the value on the body `x`–`z` plane.
    pub fn axial_value(&self, k_perp: T, k_par: T) -> T {
        let m = self.body.mass();
        match *self.body.shape() {
            Shape::Cylinder { length, radius } => cylinder_ff(k_perp, k_par, m, radius, length),
            Shape::Spheroid { length, radius } => spheroid_ff(k_perp, k_par, m, radius, length),
            Shape::Sphere { radius } => sphere_ff(k_perp.hypot(k_par), m, radius),
            Shape::Atoms(ref atoms) => atoms_ff(Vec3::new(k_perp, T::zero(), k_par), atoms).re,
        }
    }

    /// Value and analytic gradient of an axisymmetric form factor. `None`
    /// for point-mass bodies.
    pub fn axial_sample(&self, k_perp: T, k_par: T) -> Option<AxialSample<T>> {
        let m = self.body.mass();
        let quarter = lit::<T>(0.25);
        match *self.body.shape() {
            Shape::Cylinder { length, radius } => {
                let a = radius * k_perp;
                let b = length * k_par / lit(2.0);
                let (j, s) = (jinc(a), sinc(b));
                Some(AxialSample {
                    value: m * j * s,
                    alpha: -m * lit(2.0) * radius * radius * bessel_j2_over_x2(a) * s,
                    beta: m * j * length * length * quarter * sinc_prime_over_x(b),
                })
            }
            Shape::Spheroid { length, radius } => Some(spheroid_sample(m, radius, length, k_perp, k_par)),
            Shape::Sphere { radius } => Some(spheroid_sample(m, radius, radius + radius, k_perp, k_par)),
            Shape::Atoms(_) => None,
        }
    }

    /// Gradient `∇_k ρ̃` at a body-frame wavevector.
    pub fn gradient_at_body(&self, k: Vec3<T>) -> [Complex<T>; 3] {
        match self.body.shape() {
            Shape::Atoms(atoms) => {
                let zero = Complex::new(T::zero(), T::zero());
                atoms.iter().fold([zero; 3], |mut acc, a| {
                    let (s, c) = k.dot(a.position).sin_cos();
                    // −i m r e^{−ik·r} = m r (−sin − i cos)
                    for (d, slot) in acc.iter_mut().enumerate() {
                        let mr = a.mass * a.position[d];
                        *slot = *slot + Complex::new(-mr * s, -mr * c);
                    }
                    acc
                })
            }
            _ => {
                let k_perp = k.x.hypot(k.y);
                let s = self.axial_sample(k_perp, k.z).expect("continuous shape");
                [
                    Complex::new(s.alpha * k.x, T::zero()),
                    Complex::new(s.alpha * k.y, T::zero()),
                    Complex::new(s.beta * k.z, T::zero()),
                ]
            }
        }
    }
}

impl<T: Real> FormFactor<T> {
    /// `ρ̃(k; m₁) − ρ̃(k; m₂)` for an axisymmetric body whose symmetry axis
    /// points along the unit vectors `m1` and `m2`.
    ///
    /// The form factors depend on `k` through squared arguments whose
    /// difference is proportional to `(k·m₁)² − (k·m₂)² = k·(m₁−m₂) k·(m₁+m₂)`.
    /// For small arguments the difference is taken as that factor times a
    /// divided difference of the power series, so it keeps full relative
    /// precision for bodies much smaller than `1/k`.
    pub fn axial_difference(&self, k: Vec3<T>, m1: Vec3<T>, m2: Vec3<T>) -> T {
        let mass = self.body.mass();
        let (z1, z2) = (k.dot(m1), k.dot(m2));
        let k2 = k.norm_squared();
        let dz2 = k.dot(m1 - m2) * k.dot(m1 + m2);
        let p1 = (k2 - z1 * z1).max(T::zero());
        let p2 = (k2 - z2 * z2).max(T::zero());
        let quarter = lit::<T>(0.25);
        match *self.body.shape() {
            Shape::Cylinder { length, radius } => {
                let (r2, h2) = (radius * radius, length * length * quarter);
                let (a1, a2) = (r2 * p1, r2 * p2);
                let (b1, b2) = (h2 * z1 * z1, h2 * z2 * z2);
                if a1.max(a2).max(b1).max(b2) > lit(SERIES_LIMIT) {
                    return self.axial_value(p1.sqrt(), z1) - self.axial_value(p2.sqrt(), z2);
                }
                let dj = divided_difference(&JINC, a1, a2) * (-r2 * dz2);
                let ds = divided_difference(&SINC, b1, b2) * (h2 * dz2);
                mass * (dj * sinc(b1.sqrt()) + jinc(a2.sqrt()) * ds)
            }
            Shape::Spheroid { length, radius } => {
                let (r2, h2) = (radius * radius, length * length * quarter);
                let (s1, s2) = (r2 * p1 + h2 * z1 * z1, r2 * p2 + h2 * z2 * z2);
                if s1.max(s2) > lit(SERIES_LIMIT) {
                    return self.axial_value(p1.sqrt(), z1) - self.axial_value(p2.sqrt(), z2);
                }
                mass * lit(3.0) * divided_difference(&SPHERICAL_J1, s1, s2) * ((h2 - r2) * dz2)
            }
            Shape::Sphere { .. } => T::zero(),
            Shape::Atoms(_) => self.axial_value(p1.sqrt(), z1) - self.axial_value(p2.sqrt(), z2),
        }
    }
}

/// Power series `Σ c_k s^k` given by `c₀` and the ratio `c_k/c_{k−1} = num/(den(k))`.
struct Series {
    c0: f64,
    num: f64,
    den: fn(usize) -> f64,
}

/// `2J₁(x)/x` in `s = x²`.
const JINC: Series = Series {
    c0: 1.0,
    num: -0.25,
    den: |k| (k * (k + 1)) as f64,
};

/// `sin x / x` in `s = x²`.
const SINC: Series = Series {
    c0: 1.0,
    num: -1.0,
    den: |k| (2 * k * (2 * k + 1)) as f64,
};

/// `j₁(x)/x` in `s = x²`.
const SPHERICAL_J1: Series = Series {
    c0: 1.0 / 3.0,
    num: -0.5,
    den: |k| (k * (2 * k + 3)) as f64,
};

/// Largest squared argument handled by the series branch.
const SERIES_LIMIT: f64 = 4.0;
const SERIES_TERMS: usize = 30;

/// `[f(s₁) − f(s₂)]/(s₁ − s₂)` for a power series, summed with the complete
/// homogeneous polynomials `h_k = Σ_j s₁^j s₂^{k−1−j}`.
fn divided_difference<T: Real>(series: &Series, s1: T, s2: T) -> T {
    let mut c = lit::<T>(series.c0);
    let mut h = T::zero();
    let mut pow2 = T::one();
    let mut sum = T::zero();
    for k in 1..=SERIES_TERMS {
        c = c * lit::<T>(series.num) / lit::<T>((series.den)(k));
        h = s1 * h + pow2;
        pow2 = pow2 * s2;
        sum += c * h;
    }
    sum
}

fn spheroid_sample<T: Real>(m: T, r: T, l: T, k_perp: T, k_par: T) -> AxialSample<T> {
    let u = spheroid_arg(k_perp, k_par, r, l);
    // d/du [3 j1(u)/u] = −3 j2(u)/u, and ∇u = (R² k⊥_vec + L²/4 k∥ e₃)/u
    let psi = -lit::<T>(3.0) * spherical_j2_over_x2(u);
    AxialSample {
        value: m * lit(3.0) * spherical_j1_over_x(u),
        alpha: m * psi * r * r,
        beta: m * psi * l * l * lit(0.25),
    }
}

/// `ρ̃(Rᵀ(Ω) k)`, see [`FormFactor::evaluate_rotated`].
pub fn evaluate_rotated<T: Real>(ff: &FormFactor<T>, k: Vec3<T>, orientation: &Orientation<T>) -> Complex<T> {
    ff.evaluate_rotated(k, orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::MassSpec;

    #[test]
    fn normalization() {
        assert_eq!(cylinder_ff(0.0, 0.0, 2.0, 1.0, 3.0), 2.0);
        assert_eq!(spheroid_ff(0.0, 0.0, 2.0, 1.0, 3.0), 2.0);
        let atoms = [
            Atom { mass: 1.0, position: Vec3::new(0.1, 0.2, 0.3) },
            Atom { mass: 2.5, position: Vec3::new(-1.0, 0.0, 0.4) },
        ];
        let v = atoms_ff(Vec3::zero(), &atoms);
        assert_eq!(v, Complex::new(3.5, 0.0));
    }

    #[test]
    fn cylinder_transverse_limit() {
        let kp: f64 = 0.7;
        let v = cylinder_ff(0.0, kp, 1.5, 2.0, 3.0);
        assert!((v - 1.5 * sinc(1.5 * kp)).abs() < 1e-16);
    }

    #[test]
    fn two_atoms_cosine() {
        let a = 0.37;
        let atoms = [
            Atom { mass: 1.0, position: Vec3::new(0.0, 0.0, a) },
            Atom { mass: 1.0, position: Vec3::new(0.0, 0.0, -a) },
        ];
        for k3 in [0.0f64, 0.5, 3.0, 17.0] {
            let v = atoms_ff(Vec3::new(0.3, -1.0, k3), &atoms);
            assert!((v.re - 2.0 * (k3 * a).cos()).abs() < 1e-15);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn spin_about_axis_is_invisible() {
        let body = BodySpec::cylinder(1.0f64, 0.2, MassSpec::Mass(1.0)).unwrap();
        let ff = FormFactor::new(body);
        let k = Vec3::new(2.0, -3.0, 1.5);
        let tilt = Orientation::rot_x(0.4);
        let spun = tilt.compose(&Orientation::rot_z(1.1));
        let a = ff.evaluate_rotated(k, &tilt);
        let b = ff.evaluate_rotated(k, &spun);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let bodies = [
            BodySpec::cylinder(1.3f64, 0.4, MassSpec::Mass(1.0)).unwrap(),
            BodySpec::spheroid(1.3f64, 0.4, MassSpec::Mass(1.0)).unwrap(),
            BodySpec::atoms(vec![
                Atom { mass: 1.0, position: Vec3::new(0.1, 0.2, 0.3) },
                Atom { mass: 0.5, position: Vec3::new(-0.4, 0.1, 0.0) },
            ])
            .unwrap(),
        ];
        for body in bodies {
            let ff = FormFactor::new(body);
            let k = Vec3::new(1.1, -0.7, 2.3);
            let g = ff.gradient_at_body(k);
            let h = 1e-6;
            for d in 0..3 {
                let mut e = [0.0; 3];
                e[d] = h;
                let dk = Vec3::from_array(e);
                let fd = (ff.at_body(k + dk) - ff.at_body(k - dk)) / (2.0 * h);
                assert!((fd - g[d]).norm() < 1e-8, "component {d}: {fd} vs {}", g[d]);
            }
        }
    }

    #[test]
    fn axial_difference_matches_direct_difference() {
        let m1 = Vec3::new(0.6f64, 0.0, 0.8);
        let m2 = Vec3::new(-0.6, 0.0, 0.8);
        for body in [
            BodySpec::cylinder(1.3, 0.4, MassSpec::Mass(2.0)).unwrap(),
            BodySpec::spheroid(1.3, 0.4, MassSpec::Mass(2.0)).unwrap(),
        ] {
            let ff = FormFactor::new(body);
            for k in [Vec3::new(0.3, 0.2, 0.9), Vec3::new(1.5, -0.7, 0.4), Vec3::new(4.0, 3.0, -5.0)] {
                let direct = ff.axial_value(k.cross(m1).norm(), k.dot(m1)) - ff.axial_value(k.cross(m2).norm(), k.dot(m2));
                let d = ff.axial_difference(k, m1, m2);
                assert!((d - direct).abs() < 1e-14, "{d} vs {direct}");
            }
        }
    }
}
