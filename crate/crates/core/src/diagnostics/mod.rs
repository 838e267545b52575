//! Conserved quantities, energy flux and weak-formulation residuals.
//!
//! Everything here is read-only over states and trajectories. The energy is
//! evaluated in Green's form so that it is exactly the quadratic invariant of
//! the discrete transport; [`energy_quadrature`] is the direct check.

mod energy;
mod flux;
mod monitor;
mod testfn;
mod weak;

pub use energy::{energy, energy_quadrature, hamiltonian};
pub use flux::onsager_flux;
pub use monitor::{conservation_monitor, ConservationReport, MonitorParams};
pub use testfn::{TestFunctionSpec, TestKind};
pub use weak::{
    combined_residual, equivalence_report, time_weights, weak_residual_qg, weak_residual_qg_commutator, weak_residual_rqg,
    weak_terms, EquivalenceReport, EquivalenceRow, FormulationTerms, WeakTerms,
};

use crate::commutator::besov_norm;
use crate::dynamics::{velocity_from_state, SimState};
use crate::error::{Error, Result};
use crate::spectral::Mollifier;

/// Which quantities [`record`] evaluates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    /// Exponents `p` for `||theta||_p`.
    pub p_list: Vec<f64>,
    /// Exponents `q` for `||omega||_q`.
    pub q_list: Vec<f64>,
    /// Smoothness indices `alpha` for the `B^alpha_{3,inf}` norm of the surface velocity.
    pub besov_alphas: Vec<f64>,
    /// Mollifier width for the energy flux; `None` skips it.
    pub flux_eps: Option<f64>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { p_list: vec![2.0, 3.0, 4.0], q_list: vec![2.0], besov_alphas: vec![0.5], flux_eps: None }
    }
}

/// Diagnostics of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `||grad Psi||^2` over the half-space.
    pub energy: f64,
    /// `||theta||^2` in `H^{-1/2}`.
    pub hamiltonian: f64,
    /// `(p, ||theta||_p)`.
    pub theta_lp: Vec<(f64, f64)>,
    /// `(q, ||omega||_q)`.
    pub omega_lq: Vec<(f64, f64)>,
    /// `(alpha, max_j ||u_j||_{B^alpha_{3,inf}})` for the surface velocity.
    pub besov: Vec<(f64, f64)>,
    pub flux: Option<f64>,
    /// Named residuals attached after the fact.
    pub residuals: Vec<(String, f64)>,
}

impl DiagnosticsRecord {
    /// Every stored number is finite and the quadratic quantities are non-negative.
    pub fn is_valid(&self) -> bool {
        let vals = [self.t, self.energy, self.hamiltonian]
            .into_iter()
            .chain(self.theta_lp.iter().map(|v| v.1))
            .chain(self.omega_lq.iter().map(|v| v.1))
            .chain(self.besov.iter().map(|v| v.1))
            .chain(self.flux)
            .chain(self.residuals.iter().map(|v| v.1));
        vals.into_iter().all(f64::is_finite) && self.energy >= 0.0 && self.hamiltonian >= 0.0
    }
}

/// Evaluates the configured diagnostics on one state.
pub fn record(s: &SimState, cfg: &DiagnosticsConfig) -> Result<DiagnosticsRecord> {
    let theta_phys = s.theta().to_phys();
    let omega_phys = s.omega().to_phys();
    let theta_lp = cfg.p_list.iter().map(|&p| (p, theta_phys.lp_norm(p))).collect();
    let omega_lq = cfg
        .q_list
        .iter()
        .map(|&q| (q, crate::spectral::lq_norm_phys(s.slab(), &omega_phys, q)))
        .collect();
    let besov = if cfg.besov_alphas.is_empty() {
        Vec::new()
    } else {
        let u = velocity_from_state(s)?.surface;
        cfg.besov_alphas
            .iter()
            .map(|&a| (a, besov_norm(&u[0], a, 3.0).max(besov_norm(&u[1], a, 3.0))))
            .collect()
    };
    let flux = cfg.flux_eps.map(|e| Mollifier::new(e).and_then(|m| onsager_flux(s, &m))).transpose()?;
    let energy = energy(s)?;
    let out = DiagnosticsRecord {
        t: s.t(),
        energy,
        hamiltonian: hamiltonian(s.theta())?,
        theta_lp,
        omega_lq,
        besov,
        flux,
        residuals: Vec::new(),
    };
    if !out.is_valid() {
        return Err(Error::NonFinite("diagnostics record"));
    }
    Ok(out)
}
