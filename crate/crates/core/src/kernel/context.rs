use crate::error::{Error, Result};
use crate::kernel::scalar::Real;

/// Working precision and the convergence tolerance derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    mantissa_bits: u32,
    convergence_tol: f64,
}

impl PrecisionContext {
    pub const DEFAULT_BITS: u32 = 256;

    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < 53 {
            return Err(Error::InvalidInput(format!(
                "mantissa_bits must be at least 53, got {mantissa_bits}"
            )));
        }
        Ok(PrecisionContext {
            mantissa_bits,
            convergence_tol: 2f64.powi(-(mantissa_bits as i32) / 2),
        })
    }

    pub fn with_tol(mut self, convergence_tol: f64) -> Result<Self> {
        if !(convergence_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "convergence_tol must be positive, got {convergence_tol}"
            )));
        }
        self.convergence_tol = convergence_tol;
        Ok(self)
    }

    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn tol(&self) -> f64 {
        self.convergence_tol
    }

    /// Unit roundoff of the working precision, `2^(1-bits)`.
    pub fn eps(&self) -> f64 {
        2f64.powi(1 - self.mantissa_bits as i32)
    }

    pub fn real(&self, x: f64) -> Real {
        Real::from_f64(x, self.mantissa_bits)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(Self::DEFAULT_BITS).expect("default precision is valid")
    }
}
