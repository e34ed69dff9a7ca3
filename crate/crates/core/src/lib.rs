//! Continuous spontaneous localization (CSL) observables for rigid,
//! anisotropic bodies: orientational localization rates, momentum and
//! angular-momentum diffusion, planar-rotor Wigner dynamics and the
//! parameter bounds implied by measured heating rates.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (`f32` or `f64`). The aliases at the crate root fix `f64`, which is what
//! anything involving SI constants should use.

pub mod diffusion;
pub mod error;
pub mod exclusion;
pub mod formfactor;
pub mod linalg;
pub mod localization;
pub mod num;
pub mod params;
pub mod planar;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use num::Real;

pub type Vec3 = linalg::Vec3<f64>;
pub type Mat3 = linalg::Mat3<f64>;
pub type CslParams = params::CslParams<f64>;
pub type BodySpec = params::BodySpec<f64>;
pub type Shape = params::Shape<f64>;
pub type MassSpec = params::MassSpec<f64>;
pub type Atom = params::Atom<f64>;
pub type Orientation = params::Orientation<f64>;
pub type PhysicalConstants = params::PhysicalConstants<f64>;
pub type FormFactor = formfactor::FormFactor<f64>;
pub type QuadratureSpec = quadrature::QuadratureSpec<f64>;
pub type GeometryTensors = localization::GeometryTensors<f64>;
pub type DiffusionSet = diffusion::DiffusionSet<f64>;
pub type HeatingRates = diffusion::HeatingRates<f64>;
pub type PlanarWignerState = planar::PlanarWignerState<f64>;
pub type PlanarParams = planar::PlanarParams<f64>;
pub type HeatingMeasurement = exclusion::HeatingMeasurement<f64>;
pub type ExclusionCurve = exclusion::ExclusionCurve<f64>;
