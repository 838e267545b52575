use rayon::prelude::*;

use crate::dynamics::SimState;
use crate::elliptic::vertical::Vertical;
use crate::elliptic::{psi1_at, psi1_dz_at};
use crate::error::Result;
use crate::spectral::{Complex64, Mollifier, PhysField2D, SpectralField2D};

/// Mollified energy flux
/// `-2 int < (u (x) grad Psi)^eps - u^eps (x) grad Psi^eps, grad_h grad Psi^eps >`
/// with `u = (d_2 Psi, -d_1 Psi)` and the mollifier acting in `x` only,
/// level by level, trapezoid in `z`.
///
/// For smooth states it decays like `eps^2` or faster as the width shrinks.
pub fn onsager_flux(s: &SimState, gamma: &Mollifier) -> Result<f64> {
    let theta = s.theta();
    let g = *theta.grid();
    let slab = *s.slab();
    let sym = gamma.symbol(&g)?;
    let smooth = |f: &SpectralField2D| f.map_modes(|idx, c| c * sym.coeffs()[idx].re);
    let psi2 = &s.split()?.psi2;
    let v = Vertical::new(&slab);
    let cols: Vec<Vec<Complex64>> = (0..g.len()).map(|idx| v.derivative(&psi2.column(idx))).collect();

    let per_level = (0..slab.nz())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let z = slab.z(i);
            let psi = psi1_at(theta, z)?.add(psi2.layer(i));
            let mut pz = psi1_dz_at(theta, z)?;
            for (idx, c) in pz.coeffs_mut().iter_mut().enumerate() {
                *c += cols[idx][i];
            }
            // grad Psi in (z, x1, x2) order and u in (x1, x2) order.
            let grad = [pz, psi.derivative(0), psi.derivative(1)];
            let u = [grad[2].clone(), grad[1].scaled(-1.0)];
            let grad_e: Vec<SpectralField2D> = grad.iter().map(&smooth).collect();
            let u_e: Vec<PhysField2D> = u.iter().map(|f| smooth(f).to_phys()).collect();
            let grad_p: Vec<PhysField2D> = grad.iter().map(SpectralField2D::to_phys).collect();
            let u_p: Vec<PhysField2D> = u.iter().map(SpectralField2D::to_phys).collect();
            let grad_ep: Vec<PhysField2D> = grad_e.iter().map(SpectralField2D::to_phys).collect();
            let mut acc = 0.0;
            for j in 0..2 {
                for gi in 0..3 {
                    let prod = u_p[j].mul(&grad_p[gi]).forward_unchecked();
                    let comm = smooth(&prod).to_phys().sub(&u_e[j].mul(&grad_ep[gi]));
                    let test = grad_e[gi].derivative(j).to_phys();
                    acc += comm.dot(&test);
                }
            }
            Ok(slab.trapezoid_weight(i) * slab.dz() * acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(-2.0 * per_level.iter().sum::<f64>())
}
