use std::fmt;

use super::snapshot::{decode_snapshot, encode_snapshot};
use crate::commutator::{nonlinear_flux_commutator, nonlinear_flux_direct};
use crate::diagnostics::{energy, hamiltonian, DiagnosticsConfig, TestFunctionSpec, TestKind};
use crate::dynamics::{cfl_dt, run, velocity_from_state, ForcingSpec, RunSetup, SimState, StepParams};
use crate::error::Result;
use crate::harmonic::{lambda_pow, riesz, riesz_perp};
use crate::spectral::SpectralField2D;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<22} {:.3e} (tolerance {:.1e})", self.name, self.value, self.tolerance)
    }
}

fn max_coeff_diff(a: &SpectralField2D, b: &SpectralField2D) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_coeff(a: &SpectralField2D) -> f64 {
    a.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// Invariants and identities evaluated on `s`, plus a short unforced run from
/// `s` when `steps > 0`. Every entry is a relative defect against its tolerance.
pub fn verify_state(s: &SimState, steps: usize) -> Result<Vec<Check>> {
    let mut s = s.dealiased();
    let mut theta = s.theta().clone();
    theta.zero_mean();
    s.set_theta(theta.clone())?;
    let scale = max_coeff(&theta);
    let mut out = Vec::new();

    let r1 = riesz(1, &theta)?;
    let r2 = riesz(2, &theta)?;
    let sum = riesz(1, &r1)?.add(&riesz(2, &r2)?).add(&theta);
    out.push(Check { name: "riesz_square_sum", value: max_coeff_diff(&sum, &SpectralField2D::zeros(*sum.grid())) / scale, tolerance: 1e-12 });

    let back = lambda_pow(1.0, &lambda_pow(-1.0, &theta)?)?;
    out.push(Check { name: "lambda_inverse", value: max_coeff_diff(&back, &theta) / scale, tolerance: 1e-12 });

    if s.omega().is_zero() {
        let u = velocity_from_state(&s)?.surface;
        let r = riesz_perp(&theta)?;
        let d = max_coeff_diff(&u[0], &r[1]).max(max_coeff_diff(&u[1], &r[2]));
        out.push(Check { name: "surface_velocity", value: d / scale, tolerance: 1e-10 });

        let e = energy(&s)?;
        let h = hamiltonian(&theta)?;
        out.push(Check { name: "energy_hamiltonian", value: (e - h).abs() / h.max(f64::MIN_POSITIVE), tolerance: 1e-12 });
    }

    let mut worst = 0.0f64;
    for spec in TestFunctionSpec::suite(TestKind::Surface, 4, 11) {
        let phi = spec.spatial(s.grid()).to_phys();
        let direct = nonlinear_flux_direct(&theta, &phi)?;
        let comm = nonlinear_flux_commutator(&theta, &phi)?;
        let norm = theta.l2_norm().powi(2).max(f64::MIN_POSITIVE);
        worst = worst.max((direct + comm).abs() / norm);
    }
    out.push(Check { name: "flux_commutator", value: worst, tolerance: 1e-9 });

    let bytes = encode_snapshot(&s);
    let again = encode_snapshot(&decode_snapshot(&bytes)?);
    out.push(Check { name: "snapshot_roundtrip", value: if bytes == again { 0.0 } else { 1.0 }, tolerance: 0.0 });

    if steps > 0 && theta.l2_norm() > 0.0 {
        let params = StepParams::default();
        let dt = 0.5 * cfl_dt(&s, &params)?;
        let setup = RunSetup {
            initial: s.clone(),
            params: StepParams { dt, ..params },
            forcing: ForcingSpec::zero(),
            t_end: dt * steps as f64,
            auto_dt: false,
            snapshot_every: steps,
            diag_every: 1,
            diagnostics: DiagnosticsConfig { p_list: vec![], q_list: vec![], besov_alphas: vec![], flux_eps: None },
            blowup_factor: 1e3,
        };
        let a = run(&setup)?;
        let e0 = a.records[0].energy;
        let drift = a.records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max) / e0;
        out.push(Check { name: "energy_drift", value: drift, tolerance: 1e-8 });

        let b = run(&setup)?;
        let same = a.snapshots.iter().zip(&b.snapshots).all(|(x, y)| encode_snapshot(x) == encode_snapshot(y));
        out.push(Check { name: "determinism", value: if same { 0.0 } else { 1.0 }, tolerance: 0.0 });
    }
    Ok(out)
}
