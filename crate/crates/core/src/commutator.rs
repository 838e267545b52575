//! Commutators, nonlinear boundary flux and Littlewood-Paley diagnostics.
//!
//! The boundary nonlinearity `int theta (R_perp theta . grad phi)` can be
//! rewritten through the Calderon commutator `[Lambda, grad phi] Lambda^{-1}`:
//!
//! ```text
//! int theta (R_perp theta . grad phi) = -1/2 int R_perp theta . [Lambda, grad phi] Lambda^{-1} theta
//! ```
//!
//! for mean-free `theta`. Both sides are available here so that callers can
//! check one against the other.

use rayon::prelude::*;

use crate::error::Result;
use crate::harmonic::{check_mean_free, lambda_pow, riesz_perp};
use crate::spectral::{Mollifier, PhysField2D, SpectralField2D, TorusGrid};

/// `Lambda(d_j phi Lambda^{-1} theta) - d_j phi theta` for `j = 1, 2`, dealiased,
/// returned in `(z, x1, x2)` order with a zero first component.
pub fn calderon_commutator(theta: &SpectralField2D, phi: &PhysField2D) -> Result<[PhysField2D; 3]> {
    check_mean_free(theta)?;
    let g = *theta.grid();
    let phi_hat = phi.forward_transform()?;
    let inv = lambda_pow(-1.0, theta)?.to_phys();
    let th = theta.to_phys();
    let comp = |axis: usize| -> Result<PhysField2D> {
        let d = phi_hat.derivative(axis).to_phys();
        let a = d.mul(&inv).forward_unchecked().dealiased();
        let b = d.mul(&th).forward_unchecked().dealiased();
        Ok(lambda_pow(1.0, &a)?.sub(&b).to_phys())
    };
    Ok([PhysField2D::zeros(g), comp(0)?, comp(1)?])
}

/// `1/2 int R_perp theta . [Lambda, grad phi] Lambda^{-1} theta`.
pub fn nonlinear_flux_commutator(theta: &SpectralField2D, phi: &PhysField2D) -> Result<f64> {
    let c = calderon_commutator(theta, phi)?;
    let r = riesz_perp(theta)?;
    Ok(0.5 * (r[1].to_phys().dot(&c[1]) + r[2].to_phys().dot(&c[2])))
}

/// `int theta (R_perp theta . grad phi)` by node quadrature.
pub fn nonlinear_flux_direct(theta: &SpectralField2D, phi: &PhysField2D) -> Result<f64> {
    check_mean_free(theta)?;
    let phi_hat = phi.forward_transform()?;
    let r = riesz_perp(theta)?;
    let th = theta.to_phys();
    let mut s = 0.0;
    for axis in 0..2 {
        let d = phi_hat.derivative(axis).to_phys();
        s += th.mul(&r[axis + 1].to_phys()).dot(&d);
    }
    Ok(s)
}

/// Dyadic annulus `2^j <= |m| < 2^{j+1}` in integer mode units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DyadicBand {
    pub j: u32,
}

impl DyadicBand {
    #[inline]
    pub fn contains(&self, m1: i64, m2: i64) -> bool {
        let r2 = m1 * m1 + m2 * m2;
        let lo = 1i64 << (2 * self.j);
        let hi = 1i64 << (2 * (self.j + 1));
        r2 >= lo && r2 < hi
    }

    /// All bands meeting the nonzero modes of `grid`.
    pub fn all(grid: &TorusGrid) -> Vec<DyadicBand> {
        let half = (grid.n() / 2) as i64;
        let rmax2 = 2 * half * half;
        let mut bands = Vec::new();
        let mut j = 0;
        while (1i64 << (2 * j)) <= rmax2 {
            bands.push(DyadicBand { j });
            j += 1;
        }
        bands
    }
}

/// Sharp Littlewood-Paley projection onto one dyadic band.
pub fn lp_project(u: &SpectralField2D, band: DyadicBand) -> SpectralField2D {
    let g = *u.grid();
    u.map_modes(|idx, c| {
        let (m1, m2) = g.modes(idx);
        if band.contains(m1, m2) {
            c
        } else {
            Default::default()
        }
    })
}

/// `max_j 2^{j alpha} ||Delta_j u||_{L^p}` over the resolved bands.
pub fn besov_norm(u: &SpectralField2D, alpha: f64, p: f64) -> f64 {
    besov_profile(u, alpha, p).into_iter().map(|(_, v)| v).fold(0.0, f64::max)
}

/// Per-band contributions `2^{j alpha} ||Delta_j u||_{L^p}`.
pub fn besov_profile(u: &SpectralField2D, alpha: f64, p: f64) -> Vec<(DyadicBand, f64)> {
    DyadicBand::all(u.grid())
        .into_par_iter()
        .map(|b| {
            let v = 2f64.powf(b.j as f64 * alpha) * lp_project(u, b).to_phys().lp_norm(p);
            (b, v)
        })
        .collect()
}

/// Both sides of the mollifier commutator identity
/// `(f g)^eps - f^eps g^eps = int int (f(x - y) - f(x)) (g(x - y) - g(x - y')) gamma(y) gamma(y')`.
#[derive(Debug, Clone)]
pub struct CommutatorCheck {
    /// Left side through FFT convolutions.
    pub direct: PhysField2D,
    /// Right side by direct summation over the kernel support.
    pub double: PhysField2D,
    pub max_deviation: f64,
}

pub fn mollifier_commutator_check(f: &PhysField2D, g: &PhysField2D, gamma: &Mollifier) -> Result<CommutatorCheck> {
    let grid = *f.grid();
    let fe = gamma.mollify(f)?;
    let ge = gamma.mollify(g)?;
    let fge = gamma.mollify(&f.mul(g))?;
    let direct_vals: Vec<f64> = (0..grid.len()).map(|i| fge.values()[i] - fe.values()[i] * ge.values()[i]).collect();

    let w = gamma.weights(&grid)?;
    let n = grid.n() as i64;
    let at = |field: &PhysField2D, idx: usize, a: i64, b: i64| {
        let i = idx as i64 / n;
        let j = idx as i64 % n;
        field.values()[((i - a).rem_euclid(n) * n + (j - b).rem_euclid(n)) as usize]
    };
    let double_vals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let fx = f.values()[idx];
            let mut s = 0.0;
            for &(a, b, wa) in &w {
                let df = at(f, idx, a, b) - fx;
                let ga = at(g, idx, a, b);
                let inner: f64 = w.iter().map(|&(c, d, wb)| wb * (ga - at(g, idx, c, d))).sum();
                s += wa * df * inner;
            }
            s
        })
        .collect();
    let max_deviation = direct_vals.iter().zip(&double_vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(CommutatorCheck {
        direct: PhysField2D::from_values(grid, direct_vals)?,
        double: PhysField2D::from_values(grid, double_vals)?,
        max_deviation,
    })
}
