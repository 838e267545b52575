use crate::dynamics::SimState;
use crate::elliptic::{psi1_at, psi1_dz_at, psi2_surface};
use crate::elliptic::vertical::Vertical;
use crate::error::Result;
use crate::harmonic::check_mean_free;
use crate::spectral::SpectralField2D;

/// `||theta||^2` in `H^{-1/2}`: `l^2 sum_{k != 0} |theta_hat(k)|^2 / |k|`.
pub fn hamiltonian(theta: &SpectralField2D) -> Result<f64> {
    check_mean_free(theta)?;
    let g = *theta.grid();
    let s: f64 = theta
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(idx, _)| g.wavenumber(*idx) > 0.0)
        .map(|(idx, c)| c.norm_sqr() / g.wavenumber(idx))
        .sum();
    Ok(g.l() * g.l() * s)
}

/// `||grad Psi||^2` over the half-space in Green's form,
/// `int_{z=0} Psi theta - int Psi omega`, with `Psi(0)` from the Green's
/// function and `Psi_2` from the finite-difference solve.
///
/// This is the quadratic invariant of the discrete coupled transport. It
/// coincides with [`hamiltonian`] when `omega = 0`. The horizontal mean mode
/// carries no velocity and is excluded.
pub fn energy(s: &SimState) -> Result<f64> {
    let theta = s.theta();
    let g = *theta.grid();
    let slab = *s.slab();
    let mut e = hamiltonian(theta)?;
    if s.omega().is_zero() {
        return Ok(e);
    }
    let psi2 = &s.split()?.psi2;
    let ps = psi2_surface(s.omega());
    let l2 = g.l() * g.l();
    let mut acc = 0.0;
    for idx in 0..g.len() {
        if g.wavenumber(idx) == 0.0 {
            continue;
        }
        acc += 2.0 * (theta.coeffs()[idx].conj() * ps.coeffs()[idx]).re;
        for i in 0..slab.nz() {
            let w = slab.trapezoid_weight(i) * slab.dz();
            acc -= w * (s.omega().layer(i).coeffs()[idx].conj() * psi2.layer(i).coeffs()[idx]).re;
        }
    }
    e += l2 * acc;
    Ok(e)
}

/// Direct quadrature of `|grad Psi|^2`: trapezoid over the slab levels plus
/// the closed-form harmonic tail `l^2 sum |k| |Psi_hat(H)|^2` above the slab.
///
/// `Psi_1` and its vertical derivative are exact per level, `Psi_2` uses the
/// finite-difference solution. Agrees with [`energy`] up to quadrature error.
pub fn energy_quadrature(s: &SimState) -> Result<f64> {
    let theta = s.theta();
    let g = *theta.grid();
    let slab = *s.slab();
    let psi2 = &s.split()?.psi2;
    let v = Vertical::new(&slab);
    let l2 = g.l() * g.l();
    let mut dz2 = vec![Vec::new(); g.len()];
    for (idx, col) in dz2.iter_mut().enumerate() {
        *col = v.derivative(&psi2.column(idx));
    }
    let mut total = 0.0;
    for i in 0..slab.nz() {
        let z = slab.z(i);
        let w = slab.trapezoid_weight(i) * slab.dz();
        let p = psi1_at(theta, z)?.add(psi2.layer(i));
        let pz = psi1_dz_at(theta, z)?;
        let mut lvl = 0.0;
        for idx in 0..g.len() {
            let k = g.wavenumber(idx);
            if k == 0.0 {
                continue;
            }
            let dz = pz.coeffs()[idx] + dz2[idx][i];
            lvl += k * k * p.coeffs()[idx].norm_sqr() + dz.norm_sqr();
        }
        total += w * l2 * lvl;
    }
    let top = psi1_at(theta, slab.h())?.add(psi2.layer(slab.nz() - 1));
    let tail: f64 = (0..g.len()).map(|idx| g.wavenumber(idx) * top.coeffs()[idx].norm_sqr()).sum();
    Ok(total + l2 * tail)
}
