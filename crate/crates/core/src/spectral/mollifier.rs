use rustfft::num_complex::Complex64;

use super::field::{PhysField2D, SpectralField2D};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Radial bump `exp(-1 / (1 - (r/eps)^2))` on `r < eps`, unnormalized.
#[inline]
pub fn bump(r: f64, eps: f64) -> f64 {
    let s = r / eps;
    if s < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Compactly supported radial mollifier of width `eps`.
///
/// On a grid the kernel is sampled at node offsets and normalized to unit
/// discrete mass, so smoothing preserves means exactly and never increases
/// any `L^p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    eps: f64,
}

impl Mollifier {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParam(format!("mollifier width {eps} must be positive")));
        }
        Ok(Self { eps })
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn check(&self, grid: &TorusGrid) -> Result<()> {
        let limit = 0.25 * grid.l();
        if self.eps >= limit {
            return Err(Error::MollifierTooWide { eps: self.eps, limit });
        }
        Ok(())
    }

    /// Normalized node weights as `(offset1, offset2, weight)`.
    pub fn weights(&self, grid: &TorusGrid) -> Result<Vec<(i64, i64, f64)>> {
        self.check(grid)?;
        let dx = grid.dx();
        let r = (self.eps / dx).floor() as i64;
        let mut w = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                let v = bump(dx * ((a * a + b * b) as f64).sqrt(), self.eps);
                if v > 0.0 {
                    w.push((a, b, v));
                }
            }
        }
        if w.is_empty() {
            w.push((0, 0, 1.0));
        }
        let total: f64 = w.iter().map(|t| t.2).sum();
        w.iter_mut().for_each(|t| t.2 /= total);
        Ok(w)
    }

    /// Fourier symbol of the discrete kernel, `sum_y w(y) e^{-i k.y}`.
    pub fn symbol(&self, grid: &TorusGrid) -> Result<SpectralField2D> {
        let n = grid.n() as i64;
        let mut k = PhysField2D::zeros(*grid);
        for (a, b, v) in self.weights(grid)? {
            let idx = (a.rem_euclid(n) * n + b.rem_euclid(n)) as usize;
            k.values_mut()[idx] += v;
        }
        let mut s = k.forward_unchecked();
        let scale = grid.len() as f64;
        // The kernel is even, so its symbol is real.
        s.coeffs_mut().iter_mut().for_each(|c| *c = Complex64::new(c.re * scale, 0.0));
        Ok(s)
    }

    /// Periodic convolution of a spectral field with the kernel.
    pub fn smooth(&self, f: &SpectralField2D) -> Result<SpectralField2D> {
        let s = self.symbol(f.grid())?;
        Ok(f.map_modes(|idx, c| c * s.coeffs()[idx].re))
    }

    /// Periodic convolution of nodal samples with the kernel.
    pub fn mollify(&self, f: &PhysField2D) -> Result<PhysField2D> {
        let c = f.forward_transform()?;
        Ok(self.smooth(&c)?.to_phys())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn width_limit() {
        let g = TorusGrid::new(16, 1.0).unwrap();
        let m = Mollifier::new(0.25).unwrap();
        assert!(matches!(m.mollify(&PhysField2D::zeros(g)), Err(Error::MollifierTooWide { .. })));
    }

    #[test]
    fn subgrid_width_is_identity() {
        let g = TorusGrid::new(16, 2.0 * PI).unwrap();
        let f = PhysField2D::from_fn(g, |x1, x2| (x1 + 2.0 * x2).sin());
        let m = Mollifier::new(0.5 * g.dx()).unwrap().mollify(&f).unwrap();
        for (a, b) in f.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
