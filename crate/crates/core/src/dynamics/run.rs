use super::forcing::ForcingSpec;
use super::params::StepParams;
use super::state::SimState;
use super::step::{cfl_dt, step_inner};
use crate::diagnostics::{record, DiagnosticsConfig, DiagnosticsRecord};
use crate::error::{Error, Result};

/// Everything needed to integrate from an initial state.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub initial: SimState,
    pub params: StepParams,
    pub forcing: ForcingSpec,
    pub t_end: f64,
    /// Choose `dt` from the initial CFL limit (times [`AUTO_DT_SAFETY`]) instead of `params.dt`.
    pub auto_dt: bool,
    pub snapshot_every: usize,
    pub diag_every: usize,
    pub diagnostics: DiagnosticsConfig,
    /// Halt once `max |u|` exceeds this multiple of `max(initial max |u|, 1)`.
    pub blowup_factor: f64,
}

/// Fraction of the initial CFL step used in auto mode, leaving room for velocity growth.
pub const AUTO_DT_SAFETY: f64 = 0.5;

/// Snapshots at uniform cadence plus the diagnostics series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<SimState>,
    pub records: Vec<DiagnosticsRecord>,
    pub params: StepParams,
    /// Set when the run stopped early, with the reason.
    pub halted: Option<String>,
}

impl Trajectory {
    /// Uniform spacing of the snapshots; errors if the cadence is not uniform.
    pub fn cadence(&self) -> Result<f64> {
        if self.snapshots.len() < 2 {
            return Err(Error::Trajectory("need at least two snapshots".into()));
        }
        let h = self.snapshots[1].t() - self.snapshots[0].t();
        for w in self.snapshots.windows(2) {
            let d = w[1].t() - w[0].t();
            if (d - h).abs() > 1e-9 * h.abs().max(1e-300) || !(h > 0.0) {
                return Err(Error::Trajectory("snapshot cadence is not uniform".into()));
            }
        }
        Ok(h)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Integrates the coupled system and collects snapshots and diagnostics.
///
/// The step count is rounded up to a multiple of both cadences so that the
/// final state is always stored.
pub fn run(setup: &RunSetup) -> Result<Trajectory> {
    let mut params = setup.params;
    params.validate()?;
    if !(setup.t_end >= 0.0 && setup.t_end.is_finite()) {
        return Err(Error::InvalidParam(format!("t_end = {} must be non-negative", setup.t_end)));
    }
    if setup.snapshot_every == 0 || setup.diag_every == 0 {
        return Err(Error::InvalidParam("cadences must be positive".into()));
    }
    let mut state = if params.dealias { setup.initial.dealiased() } else { setup.initial.clone() };
    let u0 = {
        let v = super::velocity::velocity_from_state(&state)?;
        v.max_speed(params.sweep)
    };
    if setup.auto_dt {
        params.dt = AUTO_DT_SAFETY * cfl_dt(&state, &params)?;
    }
    let block = setup.snapshot_every / gcd(setup.snapshot_every, setup.diag_every) * setup.diag_every;
    let mut steps = 0;
    if setup.t_end > 0.0 {
        steps = ((setup.t_end / params.dt) - 1e-9).ceil().max(1.0) as usize;
        steps = steps.div_ceil(block) * block;
        params.dt = setup.t_end / steps as f64;
    }
    let bound = setup.blowup_factor * u0.max(1.0);

    let t0 = state.t();
    let mut snapshots = vec![state.clone()];
    let mut records = vec![record(&state, &setup.diagnostics)?];
    let mut halted = None;
    for n in 1..=steps {
        let (next, umax) = match step_inner(&state, &params, &setup.forcing) {
            Ok(r) => r,
            Err(e @ Error::Cfl { .. }) => {
                halted = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        if umax > bound {
            halted = Some(format!("max |u| = {umax:e} exceeded the blow-up bound {bound:e}"));
            break;
        }
        // Pin the clock to the grid of step times to keep the cadence exact.
        state = next.with_time(t0 + n as f64 * params.dt);
        if n % setup.snapshot_every == 0 {
            snapshots.push(state.clone());
        }
        if n % setup.diag_every == 0 {
            records.push(record(&state, &setup.diagnostics)?);
        }
    }
    Ok(Trajectory { snapshots, records, params, halted })
}
