use std::sync::OnceLock;

use crate::elliptic::EllipticSplit;
use crate::error::{Error, Result};
use crate::harmonic::check_mean_free;
use crate::spectral::{LayeredField3D, SlabGrid, SpectralField2D, TorusGrid};

/// Surface buoyancy `theta = -d_z Psi(0)` and interior potential vorticity
/// `omega = Laplacian Psi` at time `t`.
#[derive(Debug, Clone)]
pub struct SimState {
    t: f64,
    theta: SpectralField2D,
    omega: LayeredField3D,
    split: OnceLock<EllipticSplit>,
}

impl PartialEq for SimState {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.theta == other.theta && self.omega == other.omega
    }
}

fn check_finite(theta: &SpectralField2D, omega: &LayeredField3D) -> Result<()> {
    let ok = |f: &SpectralField2D| f.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite());
    if !ok(theta) {
        return Err(Error::NonFinite("surface field"));
    }
    if !omega.layers().iter().all(ok) {
        return Err(Error::NonFinite("interior field"));
    }
    Ok(())
}

impl SimState {
    pub fn new(t: f64, theta: SpectralField2D, omega: LayeredField3D) -> Result<Self> {
        if theta.grid() != omega.slab().torus() {
            return Err(Error::GridMismatch("surface grid differs from slab torus"));
        }
        check_mean_free(&theta)?;
        check_finite(&theta, &omega)?;
        Ok(Self { t, theta, omega, split: OnceLock::new() })
    }

    /// State with zero interior vorticity.
    pub fn surface_only(t: f64, theta: SpectralField2D, slab: SlabGrid) -> Result<Self> {
        Self::new(t, theta, LayeredField3D::zeros(slab))
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[inline]
    pub fn theta(&self) -> &SpectralField2D {
        &self.theta
    }

    #[inline]
    pub fn omega(&self) -> &LayeredField3D {
        &self.omega
    }

    #[inline]
    pub fn slab(&self) -> &SlabGrid {
        self.omega.slab()
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        self.theta.grid()
    }

    pub fn set_theta(&mut self, theta: SpectralField2D) -> Result<()> {
        if theta.grid() != self.grid() {
            return Err(Error::GridMismatch("surface grid differs from slab torus"));
        }
        check_mean_free(&theta)?;
        check_finite(&theta, &self.omega)?;
        self.theta = theta;
        self.split = OnceLock::new();
        Ok(())
    }

    pub fn set_omega(&mut self, omega: LayeredField3D) -> Result<()> {
        if omega.slab() != self.slab() {
            return Err(Error::GridMismatch("interior slab differs"));
        }
        check_finite(&self.theta, &omega)?;
        self.omega = omega;
        self.split = OnceLock::new();
        Ok(())
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Decomposition `Psi = Psi_1 + Psi_2`, computed once per state.
    pub fn split(&self) -> Result<&EllipticSplit> {
        if let Some(s) = self.split.get() {
            return Ok(s);
        }
        let s = EllipticSplit::new(&self.theta, &self.omega)?;
        Ok(self.split.get_or_init(|| s))
    }

    /// Applies the 2/3 rule to every field.
    pub fn dealiased(&self) -> Self {
        let theta = self.theta.clone().dealiased();
        let omega = self.omega.map_layers(|l| l.clone().dealiased());
        Self { t: self.t, theta, omega, split: OnceLock::new() }
    }
}
