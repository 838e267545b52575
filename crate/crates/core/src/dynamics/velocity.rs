use rayon::prelude::*;

use super::state::SimState;
use crate::elliptic::{psi1_at, psi2_surface};
use crate::error::Result;
use crate::harmonic::lambda_pow;
use crate::spectral::{PhysField2D, SpectralField2D};

/// Horizontal velocity `(d_2 Psi, -d_1 Psi)` of a streamfunction level.
///
/// With this orientation the surface velocity of a harmonic streamfunction is
/// `(-R_2 theta, R_1 theta)`.
pub fn perp(psi: &SpectralField2D) -> [SpectralField2D; 2] {
    [psi.derivative(1), psi.derivative(0).scaled(-1.0)]
}

/// Surface and per-level horizontal velocities of a state.
#[derive(Debug, Clone)]
pub struct Velocity {
    /// `u_0` at `z = 0`, components `(x1, x2)`.
    pub surface: [SpectralField2D; 2],
    /// `u(z_i)` at every slab level; the vertical component is identically zero.
    pub layers: Vec<[SpectralField2D; 2]>,
}

impl Velocity {
    /// Largest pointwise speed including a uniform sweep.
    pub fn max_speed(&self, sweep: [f64; 2]) -> f64 {
        std::iter::once(&self.surface)
            .chain(self.layers.iter())
            .map(|u| speed(&u[0].to_phys(), &u[1].to_phys(), sweep))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn speed(u1: &PhysField2D, u2: &PhysField2D, sweep: [f64; 2]) -> f64 {
    u1.values()
        .iter()
        .zip(u2.values())
        .map(|(a, b)| (a + sweep[0]).powi(2) + (b + sweep[1]).powi(2))
        .fold(0.0, f64::max)
        .sqrt()
}

/// Surface streamfunction `Lambda^{-1} theta + Psi_2(0)`.
pub(crate) fn surface_stream(theta: &SpectralField2D, psi2_0: &SpectralField2D) -> Result<SpectralField2D> {
    Ok(lambda_pow(-1.0, theta)?.add(psi2_0))
}

/// Velocities induced by `(theta, omega)`.
///
/// Each level uses `Psi_1` exactly per mode plus the finite-difference `Psi_2`;
/// the surface uses `Lambda^{-1} theta` plus the Green's-function value of
/// `Psi_2(0)`, so that `u_0 = R_perp theta` whenever `omega = 0`.
pub fn velocity_from_state(s: &SimState) -> Result<Velocity> {
    let split = s.split()?;
    let slab = *s.slab();
    let psi_s = surface_stream(s.theta(), &psi2_surface(s.omega()))?;
    let layers = (0..slab.nz())
        .into_par_iter()
        .map(|i| {
            let psi = psi1_at(s.theta(), slab.z(i))?.add(split.psi2.layer(i));
            Ok(perp(&psi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Velocity { surface: perp(&psi_s), layers })
}
