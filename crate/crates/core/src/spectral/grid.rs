use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the square torus `[0, l)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    n: usize,
    l: f64,
}

impl TorusGrid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {n} must be even and at least 8")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("period l = {l} must be positive")));
        }
        Ok(Self { n, l })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn l(&self) -> f64 {
        self.l
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Number of grid nodes (and of Fourier coefficients).
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    /// Area element of the node quadrature.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Signed integer mode number of FFT index `i`; the Nyquist index maps to `-n/2`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Integer mode pair of a flat coefficient index.
    #[inline]
    pub fn modes(&self, idx: usize) -> (i64, i64) {
        (self.mode(idx / self.n), self.mode(idx % self.n))
    }

    /// Wavevector of a flat coefficient index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let (m1, m2) = self.modes(idx);
        let s = 2.0 * PI / self.l;
        (s * m1 as f64, s * m2 as f64)
    }

    #[inline]
    pub fn wavenumber(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        (k1 * k1 + k2 * k2).sqrt()
    }

    /// `|k|` for every flat index, in index order.
    pub(crate) fn wavenumbers(&self) -> Vec<f64> {
        let s = 2.0 * PI / self.l;
        let k: Vec<f64> = (0..self.n).map(|i| s * self.mode(i) as f64).collect();
        let mut out = Vec::with_capacity(self.len());
        for a in &k {
            out.extend(k.iter().map(|b| (a * a + b * b).sqrt()));
        }
        out
    }

    /// Flat index of the mode `-k` for the coefficient at `idx`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j) = (idx / n, idx % n);
        ((n - i) % n) * n + (n - j) % n
    }

    /// Largest integer mode kept by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Coordinates of node `idx`.
    #[inline]
    pub fn node(&self, idx: usize) -> (f64, f64) {
        let dx = self.dx();
        ((idx / self.n) as f64 * dx, (idx % self.n) as f64 * dx)
    }
}

/// Truncated half-space: the torus times levels `z_i = i * dz`, `i = 0..nz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabGrid {
    torus: TorusGrid,
    nz: usize,
    h: f64,
}

impl SlabGrid {
    pub fn new(torus: TorusGrid, nz: usize, h: f64) -> Result<Self> {
        if nz < 16 {
            return Err(Error::InvalidGrid(format!("nz = {nz} must be at least 16")));
        }
        if !(h.is_finite() && h >= 0.5 * torus.l()) {
            return Err(Error::InvalidGrid(format!(
                "slab height {h} must be at least l/2 = {}",
                0.5 * torus.l()
            )));
        }
        Ok(Self { torus, nz, h })
    }

    #[inline]
    pub fn torus(&self) -> &TorusGrid {
        &self.torus
    }

    #[inline]
    pub fn nz(&self) -> usize {
        self.nz
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        self.h / (self.nz - 1) as f64
    }

    #[inline]
    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.dz()
    }

    /// Trapezoid weights in z (without the `dz` factor).
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nz {
            0.5
        } else {
            1.0
        }
    }
}
