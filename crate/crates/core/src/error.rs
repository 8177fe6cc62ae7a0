use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
///
/// Messages are static so the core stays allocation-free on the error path.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the function's domain: {0}")]
    Domain(&'static str),
    #[error("pole at s = 1")]
    Pole,
    #[error("singular evaluation: {0}")]
    Singularity(&'static str),
    #[error("no closed form is valid here ({0}); use the quadrature oracle")]
    UnsupportedRegion(&'static str),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(&'static str),
    #[error("numerical budget exceeded: best estimate {estimate} with error {error}")]
    Budget { estimate: f64, error: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("point is off the boundary by {0}")]
    OffSurface(f64),
    #[error("point is not in the exterior domain: {0}")]
    NotExterior(&'static str),
    #[error("no root in the supplied bracket")]
    NoRoot,
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("log-weight became non-finite")]
    Overflow,
    #[error("construction failed: {0}")]
    Construction(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Budget errors are recoverable in the sense that they carry a usable estimate.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
