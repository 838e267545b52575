use rayon::prelude::*;

use super::vertical::Vertical;
use crate::error::{Error, Result};
use crate::harmonic::check_mean_free;
use crate::spectral::{Complex64, LayeredField3D, SlabGrid, SpectralField2D};

/// `Psi_1` at height `z`: `theta_hat(k) exp(-|k| z) / |k|`, exact per mode.
pub fn psi1_at(theta: &SpectralField2D, z: f64) -> Result<SpectralField2D> {
    check_mean_free(theta)?;
    if !(z >= 0.0) {
        return Err(Error::NegativeHeight(z));
    }
    let ks = theta.grid().wavenumbers();
    Ok(theta.map_modes(|idx, c| {
        let k = ks[idx];
        if k == 0.0 {
            Complex64::default()
        } else {
            c * ((-k * z).exp() / k)
        }
    }))
}

/// `d_z Psi_1` at height `z`, exact per mode.
pub fn psi1_dz_at(theta: &SpectralField2D, z: f64) -> Result<SpectralField2D> {
    check_mean_free(theta)?;
    let ks = theta.grid().wavenumbers();
    Ok(theta.map_modes(|idx, c| {
        let k = ks[idx];
        if k == 0.0 {
            Complex64::default()
        } else {
            -c * (-k * z).exp()
        }
    }))
}

/// Harmonic potential with Neumann data `-d_z Psi_1 = theta` at `z = 0`,
/// sampled exactly at the slab levels.
pub fn solve_psi1(theta: &SpectralField2D, slab: &SlabGrid) -> Result<LayeredField3D> {
    if theta.grid() != slab.torus() {
        return Err(Error::GridMismatch("surface grid differs from slab torus"));
    }
    let layers = (0..slab.nz())
        .into_par_iter()
        .map(|i| psi1_at(theta, slab.z(i)))
        .collect::<Result<Vec<_>>>()?;
    LayeredField3D::from_layers(*slab, layers)
}

fn solve_columns(
    slab: &SlabGrid,
    rhs: impl Fn(usize) -> Vec<Complex64> + Sync,
) -> LayeredField3D {
    let g = *slab.torus();
    let v = Vertical::new(slab);
    let cols: Vec<Vec<Complex64>> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let r = rhs(idx);
            if r.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                return r;
            }
            let k = g.wavenumber(idx);
            if k == 0.0 {
                v.solve_zero_mode(&r)
            } else {
                v.solve(k, &r)
            }
        })
        .collect();
    LayeredField3D::from_columns(*slab, cols)
}

/// Finite-difference solve of `Laplacian Psi_2 = omega` with `d_z Psi_2 = 0`
/// at `z = 0` and decay (`d_z = -|k|`) at the top of the slab.
///
/// The horizontal mean of `Psi_2` is fixed by zero vertical average; its top
/// slope equals the vertical integral of the mean of `omega`.
pub fn solve_psi2(omega: &LayeredField3D) -> LayeredField3D {
    solve_columns(omega.slab(), |idx| omega.column(idx))
}

/// Discrete solve of the full Neumann problem `Laplacian Psi = omega`,
/// `-d_z Psi = theta` at `z = 0`, with the same stencil as [`solve_psi2`].
///
/// At the surface this differs from `Lambda^{-1} theta + Psi_2` by the
/// `O(dz^2)` discretization error of the harmonic part.
pub fn solve_neumann_fd(theta: &SpectralField2D, omega: &LayeredField3D) -> Result<LayeredField3D> {
    check_mean_free(theta)?;
    if theta.grid() != omega.slab().torus() {
        return Err(Error::GridMismatch("surface grid differs from slab torus"));
    }
    let s = 2.0 / omega.slab().dz();
    Ok(solve_columns(omega.slab(), |idx| {
        let mut col = omega.column(idx);
        col[0] -= s * theta.coeffs()[idx];
        col
    }))
}

/// Decomposition `Psi = Psi_1 + Psi_2` of the streamfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSplit {
    pub psi1: LayeredField3D,
    pub psi2: LayeredField3D,
}

impl EllipticSplit {
    pub fn new(theta: &SpectralField2D, omega: &LayeredField3D) -> Result<Self> {
        Ok(Self { psi1: solve_psi1(theta, omega.slab())?, psi2: solve_psi2(omega) })
    }

    pub fn total(&self) -> LayeredField3D {
        self.psi1.add(&self.psi2)
    }
}

/// Surface value of `Psi_2` from the half-space Neumann Green's function,
/// `Psi_2(0) = -int_0^H exp(-|k| z) omega_hat(z) / |k| dz`, trapezoid in z.
///
/// This is the adjoint of [`solve_psi1`] in the trapezoid inner product, which
/// makes the coupled surface/interior transport conserve a discrete energy
/// exactly. It agrees with the level-0 value of [`solve_psi2`] to `O(dz^2)`.
pub fn psi2_surface(omega: &LayeredField3D) -> SpectralField2D {
    let slab = *omega.slab();
    let g = *slab.torus();
    let ks = g.wavenumbers();
    let mut out = SpectralField2D::zeros(g);
    for (i, layer) in omega.layers().iter().enumerate() {
        if layer.is_zero() {
            continue;
        }
        let w = slab.trapezoid_weight(i) * slab.dz();
        let z = slab.z(i);
        for ((o, c), &k) in out.coeffs_mut().iter_mut().zip(layer.coeffs()).zip(&ks) {
            if k > 0.0 {
                *o -= c * (w * (-k * z).exp() / k);
            }
        }
    }
    out
}
