use std::f64::consts::PI;

use super::config::{ForcingKind, InitialSpec, RunConfig};
use super::snapshot::read_snapshot;
use crate::diagnostics::DiagnosticsConfig;
use crate::dynamics::{ForcingSpec, RunSetup, SimState, StepParams};
use crate::error::{Error, Result};
use crate::spectral::{random_field, LayeredField3D, PhysField2D, SlabGrid, SpectralField2D, TorusGrid};

fn normalized(f: SpectralField2D, amp: f64) -> SpectralField2D {
    let norm = f.l2_norm();
    if norm > 0.0 {
        f.scaled(amp / norm)
    } else {
        f
    }
}

/// Builds the initial state named by the config; `seed` overrides the config seed.
pub fn initial_state(cfg: &RunConfig, seed: Option<u64>) -> Result<SimState> {
    let g = TorusGrid::new(cfg.n, cfg.l)?;
    let slab = SlabGrid::new(g, cfg.nz, cfg.h)?;
    match &cfg.initial {
        InitialSpec::Random { kmax, decay, amp, interior_amp, seed: s } => {
            let seed = seed.unwrap_or(*s);
            let theta = normalized(random_field(g, *kmax, *decay, seed), *amp);
            if *interior_amp == 0.0 {
                return SimState::surface_only(0.0, theta, slab);
            }
            let layers = (0..cfg.nz)
                .map(|i| {
                    let damp = (-(slab.z(i) - 1.0).powi(2)).exp();
                    let layer = random_field(g, *kmax, *decay, seed.wrapping_add(1 + i as u64));
                    normalized(layer, interior_amp * damp)
                })
                .collect();
            SimState::new(0.0, theta, LayeredField3D::from_layers(slab, layers)?)
        }
        InitialSpec::Mode { k, amp } => {
            let kx = 2.0 * PI * *k as f64 / cfg.l;
            let theta = PhysField2D::from_fn(g, |x1, _| amp * (kx * x1).cos()).forward_transform()?;
            SimState::surface_only(0.0, theta, slab)
        }
        InitialSpec::Snapshot(path) => {
            let s = read_snapshot(path)?;
            if s.grid().n() != cfg.n || s.slab().nz() != cfg.nz {
                return Err(Error::DimensionMismatch(format!(
                    "snapshot has n = {}, nz = {} but the config asks for n = {}, nz = {}",
                    s.grid().n(),
                    s.slab().nz(),
                    cfg.n,
                    cfg.nz
                )));
            }
            Ok(s)
        }
    }
}

/// Forcing named by the config on the config grid.
pub fn forcing(cfg: &RunConfig) -> Result<ForcingSpec> {
    let g = TorusGrid::new(cfg.n, cfg.l)?;
    let slab = SlabGrid::new(g, cfg.nz, cfg.h)?;
    let wave = |k: i64| 2.0 * PI * k as f64 / cfg.l;
    Ok(match cfg.forcing {
        ForcingKind::None => ForcingSpec::zero(),
        ForcingKind::SteadySurface { k, amp } => {
            let kx = wave(k);
            let f = PhysField2D::from_fn(g, |_, x2| amp * (kx * x2).cos()).forward_transform()?;
            ForcingSpec::zero().with_surface(move |_| f.clone())
        }
        ForcingKind::SteadyInterior { k, amp } => {
            let kx = wave(k);
            let f = LayeredField3D::from_fn(slab, |z, x1, _| amp * (kx * x1).cos() * (-z).exp())?;
            ForcingSpec::zero().with_interior(move |_| f.clone())
        }
    })
}

/// Complete run description for [`crate::dynamics::run`].
pub fn run_setup(cfg: &RunConfig, seed: Option<u64>) -> Result<RunSetup> {
    let params = StepParams { dt: cfg.dt.unwrap_or(1e-2), eps_diss: cfg.eps_diss, cfl: cfg.cfl, ..StepParams::default() };
    Ok(RunSetup {
        initial: initial_state(cfg, seed)?,
        params,
        forcing: forcing(cfg)?,
        t_end: cfg.t_end,
        auto_dt: cfg.dt.is_none(),
        snapshot_every: cfg.snapshot_every,
        diag_every: cfg.diag_every,
        diagnostics: diagnostics_config(cfg),
        blowup_factor: cfg.blowup_factor,
    })
}

pub fn diagnostics_config(cfg: &RunConfig) -> DiagnosticsConfig {
    DiagnosticsConfig {
        p_list: cfg.p_list.clone(),
        q_list: cfg.q_list.clone(),
        besov_alphas: cfg.besov_alphas.clone(),
        flux_eps: cfg.flux_eps,
    }
}
