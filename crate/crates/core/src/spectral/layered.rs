use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::field::{PhysField2D, SpectralField2D};
use super::grid::SlabGrid;
use crate::error::{Error, Result};

/// A field on the slab stored as one spectral field per z level.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredField3D {
    slab: SlabGrid,
    layers: Vec<SpectralField2D>,
}

impl LayeredField3D {
    pub fn zeros(slab: SlabGrid) -> Self {
        let layers = vec![SpectralField2D::zeros(*slab.torus()); slab.nz()];
        Self { slab, layers }
    }

    pub fn from_layers(slab: SlabGrid, layers: Vec<SpectralField2D>) -> Result<Self> {
        if layers.len() != slab.nz() {
            return Err(Error::GridMismatch("layer count differs from nz"));
        }
        if layers.iter().any(|l| l.grid() != slab.torus()) {
            return Err(Error::GridMismatch("layer grid differs from slab torus"));
        }
        Ok(Self { slab, layers })
    }

    /// Samples `f(z, x1, x2)` at every slab node.
    pub fn from_fn(slab: SlabGrid, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Result<Self> {
        let layers = (0..slab.nz())
            .into_par_iter()
            .map(|i| {
                let z = slab.z(i);
                PhysField2D::from_fn(*slab.torus(), |x1, x2| f(z, x1, x2)).forward_transform()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { slab, layers })
    }

    /// Builds a field from per-mode vertical columns `col(idx) -> [nz values]`.
    pub(crate) fn from_columns(slab: SlabGrid, cols: Vec<Vec<Complex64>>) -> Self {
        let g = *slab.torus();
        let mut layers: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); g.len()]; slab.nz()];
        for (idx, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                layers[i][idx] = *v;
            }
        }
        let layers = layers
            .into_iter()
            .map(|c| SpectralField2D::from_coeffs(g, c).expect("layer length"))
            .collect();
        Self { slab, layers }
    }

    /// Vertical column of coefficients for mode `idx`.
    pub(crate) fn column(&self, idx: usize) -> Vec<Complex64> {
        self.layers.iter().map(|l| l.coeffs()[idx]).collect()
    }

    #[inline]
    pub fn slab(&self) -> &SlabGrid {
        &self.slab
    }

    #[inline]
    pub fn layers(&self) -> &[SpectralField2D] {
        &self.layers
    }

    #[inline]
    pub fn layers_mut(&mut self) -> &mut [SpectralField2D] {
        &mut self.layers
    }

    #[inline]
    pub fn layer(&self, i: usize) -> &SpectralField2D {
        &self.layers[i]
    }

    pub fn to_phys(&self) -> Vec<PhysField2D> {
        self.layers.par_iter().map(|l| l.to_phys()).collect()
    }

    pub fn map_layers(&self, f: impl Fn(&SpectralField2D) -> SpectralField2D + Sync + Send) -> Self {
        Self { slab: self.slab, layers: self.layers.par_iter().map(f).collect() }
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (l, m) in self.layers.iter_mut().zip(&x.layers) {
            l.axpy(a, m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_layers(|l| l.scaled(a))
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(SpectralField2D::is_zero)
    }

    /// `L^q` norm over the slab, trapezoid in z and node sums in x.
    pub fn lq_norm(&self, q: f64) -> f64 {
        lq_norm_phys(&self.slab, &self.to_phys(), q)
    }

    /// Trapezoid-in-z `L^2` inner product.
    pub fn inner(&self, other: &Self) -> f64 {
        let dz = self.slab.dz();
        self.layers
            .iter()
            .zip(&other.layers)
            .enumerate()
            .map(|(i, (a, b))| self.slab.trapezoid_weight(i) * dz * a.inner(b))
            .sum()
    }
}

/// `L^q` norm of per-level physical samples on the slab.
pub fn lq_norm_phys(slab: &SlabGrid, levels: &[PhysField2D], q: f64) -> f64 {
    if q.is_infinite() {
        return levels.iter().map(PhysField2D::max_abs).fold(0.0, f64::max);
    }
    let area = slab.torus().cell_area();
    let s: f64 = levels
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let w = slab.trapezoid_weight(i) * slab.dz() * area;
            w * f.values().iter().map(|v| v.abs().powf(q)).sum::<f64>()
        })
        .sum();
    s.powf(1.0 / q)
}
