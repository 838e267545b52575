use rayon::prelude::*;

use super::field::{PhysField2D, SpectralField2D};
use super::layered::LayeredField3D;
use super::mollifier::{bump, Mollifier};
use crate::error::{Error, Result};

/// Truncates and smooths raw initial data at scale `eps`.
///
/// Samples with magnitude at least `1/eps`, or farther than `1/eps` from the
/// center of the periodic box (and, in the slab, from `z = 0`), are set to zero.
/// The surface field is then mollified on the torus and the interior field
/// with a three-dimensional bump extended by zero outside the slab. Both steps
/// are contractions in every `L^p`.
pub fn prepare_data(
    omega_raw: &LayeredField3D,
    theta_raw: &SpectralField2D,
    eps: f64,
) -> Result<(LayeredField3D, SpectralField2D)> {
    if omega_raw.slab().torus() != theta_raw.grid() {
        return Err(Error::GridMismatch("interior and surface grids differ"));
    }
    let moll = Mollifier::new(eps)?;
    let grid = *theta_raw.grid();
    let slab = *omega_raw.slab();
    let cap = 1.0 / eps;
    let c = 0.5 * grid.l();

    let mut theta = theta_raw.inverse_transform()?;
    for (idx, v) in theta.values_mut().iter_mut().enumerate() {
        let (x1, x2) = grid.node(idx);
        if v.abs() >= cap || (x1 - c).hypot(x2 - c) >= cap {
            *v = 0.0;
        }
    }
    let theta = moll.smooth(&theta.forward_unchecked())?;

    let masked: Vec<SpectralField2D> = omega_raw
        .layers()
        .par_iter()
        .enumerate()
        .map(|(i, layer)| {
            let z = slab.z(i);
            let mut f = layer.inverse_transform()?;
            for (idx, v) in f.values_mut().iter_mut().enumerate() {
                let (x1, x2) = grid.node(idx);
                let r = (z * z + (x1 - c).powi(2) + (x2 - c).powi(2)).sqrt();
                if v.abs() >= cap || r >= cap {
                    *v = 0.0;
                }
            }
            Ok(f.forward_unchecked())
        })
        .collect::<Result<_>>()?;

    // Kernel slices per vertical offset, jointly normalized to unit mass.
    let dx = grid.dx();
    let dz = slab.dz();
    let rz = (eps / dz).floor() as i64;
    let rx = (eps / dx).floor() as i64;
    let n = grid.n() as i64;
    let mut slices = Vec::new();
    let mut total = 0.0;
    for cz in -rz..=rz {
        let mut k = PhysField2D::zeros(grid);
        let mut mass = 0.0;
        for a in -rx..=rx {
            for b in -rx..=rx {
                let r = ((cz as f64 * dz).powi(2) + ((a * a + b * b) as f64) * dx * dx).sqrt();
                let v = bump(r, eps);
                if v > 0.0 {
                    k.values_mut()[(a.rem_euclid(n) * n + b.rem_euclid(n)) as usize] += v;
                    mass += v;
                }
            }
        }
        if mass > 0.0 {
            total += mass;
            slices.push((cz, k));
        }
    }
    if slices.is_empty() {
        let mut k = PhysField2D::zeros(grid);
        k.values_mut()[0] = 1.0;
        total = 1.0;
        slices.push((0, k));
    }
    let scale = grid.len() as f64 / total;
    let symbols: Vec<(i64, Vec<f64>)> = slices
        .into_iter()
        .map(|(cz, k)| (cz, k.forward_unchecked().coeffs().iter().map(|c| c.re * scale).collect()))
        .collect();

    let nz = slab.nz() as i64;
    let layers = (0..slab.nz())
        .into_par_iter()
        .map(|i| {
            let mut out = SpectralField2D::zeros(grid);
            for (cz, sym) in &symbols {
                let j = i as i64 - cz;
                if j < 0 || j >= nz {
                    continue;
                }
                let w = slab.trapezoid_weight(j as usize);
                let src = masked[j as usize].coeffs();
                for (o, (s, v)) in out.coeffs_mut().iter_mut().zip(sym.iter().zip(src)) {
                    *o += w * s * v;
                }
            }
            out
        })
        .collect();
    Ok((LayeredField3D::from_layers(slab, layers)?, theta))
}
