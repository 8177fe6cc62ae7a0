//! Closed-form electrostatics of uniformly charged bodies and surfaces, log-potential
//! theory in the plane, and Monte Carlo machinery for Coulomb and log-gases.
//!
//! Every closed form in this crate is paired with an independent numerical route
//! (adaptive quadrature, Monte Carlo, or series) so that the two can be checked
//! against each other. The crate is `no_std` and needs only `alloc`.
//!
//! Sign conventions used throughout:
//!
//! * The pair potential is `Φ_d`: `−|x−x'|` (d = 1), `−ln|r−r'|` (d = 2),
//!   `|r−r'|^{2−d}` (d > 2).
//! * A "background" of a domain always carries total charge `−N`, so its potential at a
//!   unit positive test charge is `−ρ_b ∫_Ω Φ_d`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod balayage;
pub mod conformal;
pub mod domains;
mod error;
pub mod fluctuations;
pub mod gas;
pub mod quad;
pub mod riesz;
pub mod rng;
pub mod specfun;
pub mod surfaces;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::EvalResult;
