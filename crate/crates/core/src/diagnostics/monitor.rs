use super::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Tolerances for [`conservation_monitor`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorParams {
    /// Relative increase of `||theta||_p` between records that counts as a violation.
    pub lp_tolerance: f64,
    /// Relative energy increase tolerated when checking the dissipation sign.
    pub energy_tolerance: f64,
    /// Constant of the a-priori bound `||theta(t)||_p <= C (||theta_0||_p + ||omega_0||_q + F(t))`.
    pub bound_constant: f64,
    /// Cumulative forcing `F(t)` per record, `int_0^t ||f_nu||_p + ||f_L||_q`;
    /// empty means unforced.
    pub forcing_integral: Vec<f64>,
}

impl Default for MonitorParams {
    fn default() -> Self {
        Self { lp_tolerance: 1e-8, energy_tolerance: 1e-10, bound_constant: 1.0, forcing_integral: Vec::new() }
    }
}

/// Summary of a diagnostics series.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_drift: f64,
    /// `max_t |H(t) - H(0)| / H(0)`.
    pub hamiltonian_drift: f64,
    /// Largest relative energy increase between consecutive records.
    pub max_energy_increase: f64,
    /// Per `p`, the number of consecutive records where `||theta||_p` grew
    /// by more than the tolerance.
    pub lp_violations: Vec<(f64, usize)>,
    /// Per `alpha`, the Besov norm of the surface velocity over time.
    pub besov_series: Vec<(f64, Vec<f64>)>,
    /// Smallest `C (...) - ||theta(t)||_p` over records and exponents; positive when the bound holds.
    pub bound_margin: f64,
}

impl ConservationReport {
    /// Energy never increased beyond the tolerance.
    pub fn energy_non_increasing(&self, tol: f64) -> bool {
        self.max_energy_increase <= tol
    }

    pub fn lp_monotone(&self) -> bool {
        self.lp_violations.iter().all(|v| v.1 == 0)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b != 0.0 {
        (a - b).abs() / b.abs()
    } else {
        (a - b).abs()
    }
}

/// Drifts, monotonicity and a-priori bound checks over a record series.
pub fn conservation_monitor(records: &[DiagnosticsRecord], params: &MonitorParams) -> Result<ConservationReport> {
    if records.len() < 2 {
        return Err(Error::EmptySeries);
    }
    if !params.forcing_integral.is_empty() && params.forcing_integral.len() != records.len() {
        return Err(Error::DimensionMismatch(format!(
            "forcing integral has {} entries for {} records",
            params.forcing_integral.len(),
            records.len()
        )));
    }
    let (e0, h0) = (records[0].energy, records[0].hamiltonian);
    let energy_drift = records.iter().map(|r| rel(r.energy, e0)).fold(0.0, f64::max);
    let hamiltonian_drift = records.iter().map(|r| rel(r.hamiltonian, h0)).fold(0.0, f64::max);
    let max_energy_increase = records
        .windows(2)
        .map(|w| (w[1].energy - w[0].energy) / w[0].energy.abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);

    let lp_violations = records[0]
        .theta_lp
        .iter()
        .enumerate()
        .map(|(k, &(p, _))| {
            let count = records
                .windows(2)
                .filter(|w| w[1].theta_lp[k].1 > w[0].theta_lp[k].1 * (1.0 + params.lp_tolerance))
                .count();
            (p, count)
        })
        .collect();
    let besov_series = records[0]
        .besov
        .iter()
        .enumerate()
        .map(|(k, &(a, _))| (a, records.iter().map(|r| r.besov[k].1).collect()))
        .collect();

    let omega0 = records[0].omega_lq.first().map_or(0.0, |v| v.1);
    let mut bound_margin = f64::INFINITY;
    for (n, r) in records.iter().enumerate() {
        let f = params.forcing_integral.get(n).copied().unwrap_or(0.0);
        for (k, &(_, v)) in r.theta_lp.iter().enumerate() {
            let rhs = params.bound_constant * (records[0].theta_lp[k].1 + omega0 + f);
            bound_margin = bound_margin.min(rhs - v);
        }
    }
    Ok(ConservationReport {
        energy_drift,
        hamiltonian_drift,
        max_energy_increase,
        lp_violations,
        besov_series,
        bound_margin,
    })
}
