//! Physical constants, CSL parameters, rigid-body descriptions and
//! orientations. Everything here is in SI units.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat3, Quaternion, Vec3};
use crate::num::{lit, Real};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit, kg (CODATA 2018).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Density of crystalline silicon, kg/m³.
pub const SILICON_DENSITY: f64 = 2329.0;

/// Fixed constants, converted into the working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    hbar: T,
    k_b: T,
    amu: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn codata() -> Self {
        PhysicalConstants {
            hbar: lit(HBAR),
            k_b: lit(K_B),
            amu: lit(AMU),
        }
    }

    /// ℏ in J·s.
    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// k_B in J/K.
    pub fn k_b(&self) -> T {
        self.k_b
    }

    /// Atomic mass unit in kg.
    pub fn amu(&self) -> T {
        self.amu
    }
}

/// Density of a named material in kg/m³.
pub fn material_density(name: &str) -> Option<f64> {
    match name.to_ascii_lowercase().as_str() {
        "silicon" | "si" => Some(SILICON_DENSITY),
        _ => None,
    }
}

/// Collapse rate `lambda_c` (1/s), localization length `r_c` (m) and
/// reference mass `m0` (kg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CslParams<T> {
    lambda_c: T,
    r_c: T,
    m0: T,
}

impl<T: Real> CslParams<T> {
    pub fn new(lambda_c: T, r_c: T, m0: T) -> Result<Self> {
        if !(lambda_c >= T::zero()) || !lambda_c.is_finite() {
            return Err(invalid("lambda_c", "must be finite and non-negative"));
        }
        if !(r_c > T::zero()) || !r_c.is_finite() {
            return Err(invalid("r_c", "must be finite and positive"));
        }
        if !(m0 > T::zero()) || !m0.is_finite() {
            return Err(invalid("m0", "must be finite and positive"));
        }
        Ok(CslParams { lambda_c, r_c, m0 })
    }

    /// Parameters with the reference mass set to one atomic mass unit.
    pub fn with_amu(lambda_c: T, r_c: T) -> Result<Self> {
        Self::new(lambda_c, r_c, lit(AMU))
    }

    pub fn lambda_c(&self) -> T {
        self.lambda_c
    }

    pub fn r_c(&self) -> T {
        self.r_c
    }

    pub fn m0(&self) -> T {
        self.m0
    }

    pub fn with_lambda_c(&self, lambda_c: T) -> Result<Self> {
        Self::new(lambda_c, self.r_c, self.m0)
    }

    pub fn with_r_c(&self, r_c: T) -> Result<Self> {
        Self::new(self.lambda_c, r_c, self.m0)
    }
}

/// Point mass of an atomic body, position in the body frame (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub mass: T,
    pub position: Vec3<T>,
}

/// Geometry of a rigid body. Symmetric shapes have their symmetry axis along
/// the body-frame `e3`; `length` is the full extent along that axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape<T> {
    Cylinder { length: T, radius: T },
    Spheroid { length: T, radius: T },
    Sphere { radius: T },
    Atoms(Vec<Atom<T>>),
}

/// How the mass of a continuous body is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MassSpec<T> {
    /// Uniform density, kg/m³.
    Density(T),
    /// Total mass, kg.
    Mass(T),
}

/// A rigid body with uniform density (or a set of point masses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec<T> {
    shape: Shape<T>,
    mass: T,
}

fn positive<T: Real>(x: T, name: &'static str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite and positive"))
    }
}

impl<T: Real> BodySpec<T> {
    pub fn new(shape: Shape<T>, mass: MassSpec<T>) -> Result<Self> {
        match &shape {
            Shape::Cylinder { length, radius } | Shape::Spheroid { length, radius } => {
                positive(*length, "length")?;
                positive(*radius, "radius")?;
            }
            Shape::Sphere { radius } => positive(*radius, "radius")?,
            Shape::Atoms(atoms) => {
                if atoms.is_empty() {
                    return Err(invalid("atoms", "needs at least one atom"));
                }
                for a in atoms {
                    positive(a.mass, "atom mass")?;
                    let p = a.position;
                    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                        return Err(invalid("atom position", "must be finite"));
                    }
                }
            }
        }
        let total = match (&shape, mass) {
            (Shape::Atoms(atoms), MassSpec::Mass(m)) => {
                positive(m, "mass")?;
                let sum = atoms.iter().fold(T::zero(), |acc, a| acc + a.mass);
                if (sum - m).abs() > lit::<T>(1e-12) * m {
                    return Err(invalid("mass", "must equal the sum of the atom masses"));
                }
                sum
            }
            (Shape::Atoms(_), MassSpec::Density(_)) => {
                return Err(invalid("density", "not defined for point-mass bodies"))
            }
            (_, MassSpec::Mass(m)) => {
                positive(m, "mass")?;
                m
            }
            (s, MassSpec::Density(rho)) => {
                positive(rho, "density")?;
                rho * volume_of(s).expect("continuous shape")
            }
        };
        Ok(BodySpec { shape, mass: total })
    }

    pub fn cylinder(length: T, radius: T, mass: MassSpec<T>) -> Result<Self> {
        Self::new(Shape::Cylinder { length, radius }, mass)
    }

    pub fn spheroid(length: T, radius: T, mass: MassSpec<T>) -> Result<Self> {
        Self::new(Shape::Spheroid { length, radius }, mass)
    }

    pub fn sphere(radius: T, mass: MassSpec<T>) -> Result<Self> {
        Self::new(Shape::Sphere { radius }, mass)
    }

    pub fn atoms(atoms: Vec<Atom<T>>) -> Result<Self> {
        let m = atoms.iter().fold(T::zero(), |acc, a| acc + a.mass);
        Self::new(Shape::Atoms(atoms), MassSpec::Mass(m))
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    /// Total mass, kg.
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Volume in m³, `None` for point masses.
    pub fn volume(&self) -> Option<T> {
        volume_of(&self.shape)
    }

    /// Uniform density in kg/m³, `None` for point masses.
    pub fn density(&self) -> Option<T> {
        self.volume().map(|v| self.mass / v)
    }

    /// Whether the body is symmetric under rotations about its `e3` axis.
    pub fn is_axisymmetric(&self) -> bool {
        !matches!(self.shape, Shape::Atoms(_))
    }

    /// Largest linear extent of the body, m.
    pub fn max_extent(&self) -> T {
        let two = lit::<T>(2.0);
        match &self.shape {
            Shape::Cylinder { length, radius } | Shape::Spheroid { length, radius } => {
                length.max(two * *radius)
            }
            Shape::Sphere { radius } => two * *radius,
            Shape::Atoms(atoms) => {
                let mut d = T::zero();
                for (i, a) in atoms.iter().enumerate() {
                    for b in &atoms[i + 1..] {
                        d = d.max((a.position - b.position).norm());
                    }
                }
                d
            }
        }
    }

    /// Uniformly scales every length by `s` at fixed density (mass ∝ s³).
    pub fn scaled(&self, s: T) -> Result<Self> {
        positive(s, "scale")?;
        let s3 = s * s * s;
        let shape = match &self.shape {
            Shape::Cylinder { length, radius } => Shape::Cylinder {
                length: *length * s,
                radius: *radius * s,
            },
            Shape::Spheroid { length, radius } => Shape::Spheroid {
                length: *length * s,
                radius: *radius * s,
            },
            Shape::Sphere { radius } => Shape::Sphere { radius: *radius * s },
            Shape::Atoms(atoms) => Shape::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        mass: a.mass * s3,
                        position: a.position * s,
                    })
                    .collect(),
            ),
        };
        Self::new(shape, MassSpec::Mass(self.mass * s3))
    }

    /// Dimensionless copy with lengths in units of `length_unit` and unit
    /// total mass.
    pub fn reduced(&self, length_unit: T) -> Result<Self> {
        self.scaled(T::one() / length_unit)?.with_mass(T::one())
    }

    /// Same geometry with a different total mass.
    pub fn with_mass(&self, mass: T) -> Result<Self> {
        match &self.shape {
            Shape::Atoms(atoms) => {
                let f = mass / self.mass;
                let atoms = atoms
                    .iter()
                    .map(|a| Atom {
                        mass: a.mass * f,
                        position: a.position,
                    })
                    .collect();
                Self::atoms(atoms)
            }
            s => Self::new(s.clone(), MassSpec::Mass(mass)),
        }
    }

    /// Centre of mass in the body frame, m.
    pub fn center_of_mass(&self) -> Vec3<T> {
        match &self.shape {
            Shape::Atoms(atoms) => {
                let sum = atoms
                    .iter()
                    .fold(Vec3::zero(), |acc, a| acc + a.position * a.mass);
                sum * (T::one() / self.mass)
            }
            _ => Vec3::zero(),
        }
    }

    /// Second mass moment `Q = ∫ρ(r) r⊗r d³r` about the body-frame origin, kg·m².
    pub fn second_moment(&self) -> Mat3<T> {
        let m = self.mass;
        match &self.shape {
            Shape::Cylinder { length, radius } => {
                let t = m * *radius * *radius / lit(4.0);
                Mat3::diag(t, t, m * *length * *length / lit(12.0))
            }
            Shape::Spheroid { length, radius } => {
                let t = m * *radius * *radius / lit(5.0);
                Mat3::diag(t, t, m * *length * *length / lit(20.0))
            }
            Shape::Sphere { radius } => {
                let t = m * *radius * *radius / lit(5.0);
                Mat3::diag(t, t, t)
            }
            Shape::Atoms(atoms) => atoms.iter().fold(Mat3::zero(), |acc, a| {
                acc + a.position.outer(a.position).scale(a.mass)
            }),
        }
    }

    /// Mass (kg) and inertia tensor about the centre of mass in the body
    /// frame (kg·m²).
    pub fn mass_and_inertia(&self) -> (T, Mat3<T>) {
        let c = self.center_of_mass();
        let q = self.second_moment() - c.outer(c).scale(self.mass);
        let i = Mat3::identity().scale(q.trace()) - q;
        (self.mass, i)
    }

    /// Moment of inertia about an axis perpendicular to `e3`, kg·m².
    pub fn transverse_inertia(&self) -> T {
        self.mass_and_inertia().1[(0, 0)]
    }
}

fn volume_of<T: Real>(shape: &Shape<T>) -> Option<T> {
    let pi = T::PI();
    match shape {
        Shape::Cylinder { length, radius } => Some(pi * *radius * *radius * *length),
        Shape::Spheroid { length, radius } => {
            Some(lit::<T>(2.0 / 3.0) * pi * *radius * *radius * *length)
        }
        Shape::Sphere { radius } => Some(lit::<T>(4.0 / 3.0) * pi * radius.powi(3)),
        Shape::Atoms(_) => None,
    }
}

/// Mass and inertia tensor of a body, see [`BodySpec::mass_and_inertia`].
pub fn body_mass_and_inertia<T: Real>(body: &BodySpec<T>) -> (T, Mat3<T>) {
    body.mass_and_inertia()
}

/// Proper rotation from the body frame to the space frame, stored as a unit
/// quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation<T> {
    q: Quaternion<T>,
}

impl<T: Real> Orientation<T> {
    pub fn identity() -> Self {
        Orientation {
            q: Quaternion::identity(),
        }
    }

    /// Normalizes `q`; fails for a zero or non-finite quaternion.
    pub fn from_quaternion(q: Quaternion<T>) -> Result<Self> {
        let n = q.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(invalid("quaternion", "must be finite and non-zero"));
        }
        Ok(Orientation { q: q.normalized() })
    }

    /// Rotation by `angle` (rad) about `axis`.
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Result<Self> {
        let n = axis.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(invalid("axis", "must be finite and non-zero"));
        }
        let (s, c) = (angle / lit(2.0)).sin_cos();
        let a = axis * (s / n);
        Self::from_quaternion(Quaternion::new(c, a.x, a.y, a.z))
    }

    pub fn rot_x(angle: T) -> Self {
        Self::from_axis_angle(Vec3::e1(), angle).expect("unit axis")
    }

    pub fn rot_y(angle: T) -> Self {
        Self::from_axis_angle(Vec3::e2(), angle).expect("unit axis")
    }

    pub fn rot_z(angle: T) -> Self {
        Self::from_axis_angle(Vec3::e3(), angle).expect("unit axis")
    }

    /// Shortest-arc rotation carrying the body `e3` onto the direction `m`.
    pub fn aligning_e3(m: Vec3<T>) -> Result<Self> {
        let n = m.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(invalid("axis", "must be finite and non-zero"));
        }
        let m = m * (T::one() / n);
        let e3 = Vec3::e3();
        let c = e3.dot(m);
        if c < lit(-0.5) {
            // close to antiparallel: flip about e1 first, then take the short arc
            let flip = Self::rot_x(T::PI());
            let rest = Self::aligning_e3_unit(flip.matrix().transpose().mul_vec(m));
            return Ok(flip.compose(&rest));
        }
        Ok(Self::aligning_e3_unit(m))
    }

    fn aligning_e3_unit(m: Vec3<T>) -> Self {
        // q = (1 + e3·m, e3 × m), normalized
        let e3 = Vec3::e3();
        let v = e3.cross(m);
        let q = Quaternion::new(T::one() + e3.dot(m), v.x, v.y, v.z);
        Orientation { q: q.normalized() }
    }

    pub fn quaternion(&self) -> Quaternion<T> {
        self.q
    }

    /// Rotation matrix `R(Ω)`.
    pub fn matrix(&self) -> Mat3<T> {
        self.q.to_matrix()
    }

    /// `R(self)·R(other)`, renormalized.
    pub fn compose(&self, other: &Self) -> Self {
        Orientation {
            q: self.q.mul(&other.q).normalized(),
        }
    }

    pub fn inverse(&self) -> Self {
        Orientation {
            q: self.q.conjugate(),
        }
    }

    /// Maps a body-frame vector into the space frame.
    pub fn to_space(&self, v: Vec3<T>) -> Vec3<T> {
        self.matrix().mul_vec(v)
    }

    /// Maps a space-frame vector into the body frame, `Rᵀ(Ω)·v`.
    pub fn to_body(&self, v: Vec3<T>) -> Vec3<T> {
        self.matrix().transpose().mul_vec(v)
    }

    /// Rotation vector (axis × angle, angle in `[0, π]`).
    pub fn rotation_vector(&self) -> Vec3<T> {
        let q = if self.q.w < T::zero() {
            Quaternion::new(-self.q.w, -self.q.x, -self.q.y, -self.q.z)
        } else {
            self.q
        };
        let v = Vec3::new(q.x, q.y, q.z);
        let s = v.norm();
        if s == T::zero() {
            return Vec3::zero();
        }
        let angle = lit::<T>(2.0) * s.atan2(q.w);
        v * (angle / s)
    }

    /// Symmetry axis `m(Ω) = R(Ω)·e3` of an axisymmetric body.
    pub fn symmetry_axis(&self) -> Vec3<T> {
        self.to_space(Vec3::e3())
    }
}

/// Orientation `Ω̃` with `R(Ω̃) = Rᵀ(b)·R(a)`.
pub fn relative_orientation<T: Real>(a: &Orientation<T>, b: &Orientation<T>) -> Orientation<T> {
    b.inverse().compose(a)
}

/// Angle in `[0, π]` between the symmetry axes `m(a)` and `m(b)`.
pub fn axis_angle_between<T: Real>(
    body: &BodySpec<T>,
    a: &Orientation<T>,
    b: &Orientation<T>,
) -> Result<T> {
    if !body.is_axisymmetric() {
        return Err(Error::NotAxisymmetric {
            what: "axis_angle_between",
        });
    }
    let (ma, mb) = (a.symmetry_axis(), b.symmetry_axis());
    Ok(ma.cross(mb).norm().atan2(ma.dot(mb)))
}
