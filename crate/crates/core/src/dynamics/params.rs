use crate::error::{Error, Result};

/// Time-step controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub dt: f64,
    /// Coefficient of the critical dissipation `-eps Lambda theta`.
    pub eps_diss: f64,
    pub cfl: f64,
    pub dealias: bool,
    /// Upper bound on any CFL-derived step.
    pub dt_cap: f64,
    /// Uniform background velocity added to every layer.
    pub sweep: [f64; 2],
}

impl Default for StepParams {
    fn default() -> Self {
        Self { dt: 1e-2, eps_diss: 0.0, cfl: 0.4, dealias: true, dt_cap: 0.1, sweep: [0.0, 0.0] }
    }
}

impl StepParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParam(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.eps_diss.is_finite() && self.eps_diss >= 0.0) {
            return Err(Error::InvalidParam(format!("eps_diss = {} must be non-negative", self.eps_diss)));
        }
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return Err(Error::InvalidParam(format!("cfl = {} must be positive", self.cfl)));
        }
        if !(self.dt_cap > 0.0) {
            return Err(Error::InvalidParam(format!("dt_cap = {} must be positive", self.dt_cap)));
        }
        if !self.sweep.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParam("sweep velocity must be finite".into()));
        }
        Ok(())
    }
}
