use rustfft::num_complex::Complex64;

use super::fft::fft2;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Real samples on the torus nodes, row-major `[i1 * n + i2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysField2D {
    grid: TorusGrid,
    values: Vec<f64>,
}

/// Fourier coefficients `c(k) = n^-2 sum_x f(x) e^{-i k.x}`, same index layout.
///
/// Coefficients of a real field satisfy `c(-k) = conj(c(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl PhysField2D {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("value count differs from n^2"));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x1, x2)` at every node.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x1, x2) = grid.node(idx);
                f(x1, x2)
            })
            .collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Forward transform; rejects NaN or infinite samples.
    pub fn forward_transform(&self) -> Result<SpectralField2D> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("physical field"));
        }
        Ok(self.forward_unchecked())
    }

    /// Forward transforms of two real fields with one complex transform of `a + i b`,
    /// separated by conjugate symmetry.
    pub(crate) fn forward_pair(a: &Self, b: &Self) -> (SpectralField2D, SpectralField2D) {
        debug_assert_eq!(a.grid, b.grid);
        let g = a.grid;
        let mut buf: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(&x, &y)| Complex64::new(x, y)).collect();
        fft2(&mut buf, g.n(), false);
        let s = 1.0 / g.len() as f64;
        let mut fa = Vec::with_capacity(buf.len());
        let mut fb = Vec::with_capacity(buf.len());
        for (idx, z) in buf.iter().enumerate() {
            let w = buf[g.conjugate_index(idx)].conj();
            fa.push(0.5 * s * (z + w));
            let d = 0.5 * s * (z - w);
            fb.push(Complex64::new(d.im, -d.re));
        }
        (SpectralField2D { grid: g, coeffs: fa }, SpectralField2D { grid: g, coeffs: fb })
    }

    pub(crate) fn forward_unchecked(&self) -> SpectralField2D {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, false);
        let s = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        SpectralField2D { grid: self.grid, coeffs: buf }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `L^p` norm with the node quadrature; `p = inf` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s * self.grid.cell_area()).powf(1.0 / p)
    }

    /// Node-quadrature integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Node-quadrature integral of the pointwise product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_area()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self { grid: self.grid, values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, values }
    }
}

impl SpectralField2D {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch("coefficient count differs from n^2"));
        }
        Ok(Self { grid, coeffs })
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Spatial mean (the zero mode).
    #[inline]
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn zero_mean(&mut self) {
        self.coeffs[0] = Complex64::default();
    }

    /// Largest `|c(k) - conj(c(-k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|idx| (self.coeffs[idx] - self.coeffs[self.grid.conjugate_index(idx)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replaces the coefficients with their Hermitian part.
    pub fn hermitian_project(&mut self) {
        let src = self.coeffs.clone();
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            *c = 0.5 * (src[idx] + src[self.grid.conjugate_index(idx)].conj());
        }
    }

    /// Inverse transform; rejects coefficients that do not describe a real field.
    pub fn inverse_transform(&self) -> Result<PhysField2D> {
        if self.coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("spectral field"));
        }
        let scale = self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.norm()));
        let defect = self.hermitian_defect();
        if defect > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(self.to_phys())
    }

    /// Inverse transform keeping the real part.
    pub(crate) fn to_phys(&self) -> PhysField2D {
        let mut buf = self.coeffs.clone();
        fft2(&mut buf, self.grid.n(), true);
        PhysField2D { grid: self.grid, values: buf.iter().map(|c| c.re).collect() }
    }

    /// Inverse transforms of two real fields with one complex transform of `a + i b`.
    pub(crate) fn to_phys_pair(a: &Self, b: &Self) -> (PhysField2D, PhysField2D) {
        debug_assert_eq!(a.grid, b.grid);
        let mut buf: Vec<Complex64> =
            a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + Complex64::new(-y.im, y.re)).collect();
        fft2(&mut buf, a.grid.n(), true);
        let re = PhysField2D { grid: a.grid, values: buf.iter().map(|c| c.re).collect() };
        let im = PhysField2D { grid: a.grid, values: buf.iter().map(|c| c.im).collect() };
        (re, im)
    }

    /// Multiplies by the symbol `m(k1, k2)` and projects back onto real fields.
    ///
    /// A non-finite symbol value at `k = 0` removes the mean; anywhere else it is an error.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.grid.wavevector(idx);
            let v = m(k1, k2);
            if v.re.is_finite() && v.im.is_finite() {
                *c *= v;
            } else if idx == 0 {
                *c = Complex64::default();
            } else {
                return Err(Error::SingularMultiplier(k1, k2));
            }
        }
        out.hermitian_project();
        Ok(out)
    }

    /// Multiplication by a symbol known to be finite and odd-Hermitian, without projection.
    pub(crate) fn map_modes(&self, m: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(idx, &c)| m(idx, c)).collect();
        Self { grid: self.grid, coeffs }
    }

    /// Zeroes modes with `max(|m1|, |m2|) > n/3`.
    pub fn dealias(&mut self) {
        let cut = self.grid.dealias_cutoff();
        let g = self.grid;
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            let (m1, m2) = g.modes(idx);
            if m1.abs().max(m2.abs()) > cut {
                *c = Complex64::default();
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// Partial derivative along `x1` (`axis = 0`) or `x2` (`axis = 1`).
    pub fn derivative(&self, axis: usize) -> Self {
        let g = self.grid;
        let n = g.n();
        let s = 2.0 * std::f64::consts::PI / g.l();
        // The Nyquist mode has no real derivative.
        let k: Vec<f64> =
            (0..n).map(|i| if 2 * i == n { 0.0 } else { s * g.mode(i) as f64 }).collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let kj = if axis == 0 { k[idx / n] } else { k[idx % n] };
                Complex64::new(-c.im * kj, c.re * kj)
            })
            .collect();
        Self { grid: g, coeffs }
    }

    /// `L^2` inner product over the torus via Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum();
        s * self.grid.l() * self.grid.l()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += a * d;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_, c| a * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}
