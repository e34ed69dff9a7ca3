use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument is NaN in {0}")]
    NotANumber(&'static str),

    #[error("{what} requires an azimuthally symmetric body")]
    NotAxisymmetric { what: &'static str },

    #[error(
        "quadrature did not converge within {evals} evaluations: \
         best estimate {estimate:e}, error {error:e}, achieved relative tolerance {achieved_rel:e}"
    )]
    NoConvergence {
        evals: usize,
        estimate: f64,
        error: f64,
        achieved_rel: f64,
    },

    #[error("{what} not converged: achieved bound {bound:e}")]
    Truncation { what: &'static str, bound: f64 },

    #[error("angular-momentum range too small: {mass:e} of the norm sits at |m| = m_max, increase m_max")]
    MomentumRange { mass: f64 },

    #[error("integrator unstable: norm drifted by {drift:e}")]
    Unstable { drift: f64 },

    #[error("channel insensitive: reduced diffusion coefficient vanishes at r_C = {r_c:e} m")]
    ChannelInsensitive { r_c: f64 },

    #[error("no unique intersection of the bound curves on the search interval")]
    NoIntersection,

    #[error("ambiguous intersection: {} crossings at r_C = {roots:?}", roots.len())]
    AmbiguousIntersection { roots: Vec<f64> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
