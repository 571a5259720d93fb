//! High-precision Padé and AAK approximation of Cauchy transforms with
//! rational perturbations, plus the potential-theoretic machinery used to
//! predict their asymptotic behaviour.

pub mod error;
pub mod kernel;
pub mod model;
pub mod conformal;
pub mod ortho;
pub mod pade;
pub mod aak;
pub mod asymptotics;

pub use error::{Error, Result};
