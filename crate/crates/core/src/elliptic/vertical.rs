//! Second-order finite differences along z for a single Fourier mode.

use crate::spectral::{Complex64, SlabGrid};

/// Vertical discretization on `z_i = i dz`, `i = 0..nz`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Vertical {
    nz: usize,
    dz: f64,
}

impl Vertical {
    pub fn new(slab: &SlabGrid) -> Self {
        Self { nz: slab.nz(), dz: slab.dz() }
    }

    /// Solves `(d_zz - kappa^2) psi = rhs` for `kappa > 0` with `psi'(0) = 0`
    /// imposed through a ghost point and `psi'(H) = -kappa psi(H)` on top.
    pub fn solve(&self, kappa: f64, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.nz;
        let h2 = 1.0 / (self.dz * self.dz);
        let diag = -2.0 * h2 - kappa * kappa;
        let sub = |i: usize| if i + 1 == n { 2.0 * h2 } else { h2 };
        let sup = |i: usize| if i == 0 { 2.0 * h2 } else { h2 };
        let dia = |i: usize| if i + 1 == n { -(2.0 + 2.0 * self.dz * kappa) * h2 - kappa * kappa } else { diag };

        let mut cp = vec![0.0; n];
        let mut dp = vec![Complex64::default(); n];
        cp[0] = sup(0) / dia(0);
        dp[0] = rhs[0] / dia(0);
        for i in 1..n {
            let m = dia(i) - sub(i) * cp[i - 1];
            if i + 1 < n {
                cp[i] = sup(i) / m;
            }
            dp[i] = (rhs[i] - sub(i) * dp[i - 1]) / m;
        }
        let mut x = dp;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= cp[i] * next;
        }
        x
    }

    /// Zero-mode problem `psi'' = rhs`, `psi'(0) = 0`, with zero trapezoid mean.
    ///
    /// The top slope is then `psi'(H) = int_0^H rhs dz` up to discretization error.
    pub fn solve_zero_mode(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.nz;
        let d2 = self.dz * self.dz;
        let mut x = vec![Complex64::default(); n];
        x[1] = 0.5 * d2 * rhs[0];
        for i in 1..n - 1 {
            x[i + 1] = 2.0 * x[i] - x[i - 1] + d2 * rhs[i];
        }
        let mean = self.trapezoid(&x) / (self.dz * (n - 1) as f64);
        x.iter_mut().for_each(|v| *v -= mean);
        x
    }

    pub fn trapezoid(&self, col: &[Complex64]) -> Complex64 {
        let n = col.len();
        let inner: Complex64 = col[1..n - 1].iter().sum();
        self.dz * (inner + 0.5 * (col[0] + col[n - 1]))
    }

    /// Centered first derivative with one-sided second-order ends.
    pub fn derivative(&self, col: &[Complex64]) -> Vec<Complex64> {
        let n = col.len();
        let s = 0.5 / self.dz;
        let mut d = vec![Complex64::default(); n];
        d[0] = s * (-3.0 * col[0] + 4.0 * col[1] - col[2]);
        for i in 1..n - 1 {
            d[i] = s * (col[i + 1] - col[i - 1]);
        }
        d[n - 1] = s * (3.0 * col[n - 1] - 4.0 * col[n - 2] + col[n - 3]);
        d
    }

    /// Dense row-major matrix of [`Vertical::derivative`].
    pub fn derivative_matrix(&self) -> Vec<f64> {
        let n = self.nz;
        let s = 0.5 / self.dz;
        let mut m = vec![0.0; n * n];
        m[0] = -3.0 * s;
        m[1] = 4.0 * s;
        m[2] = -s;
        for i in 1..n - 1 {
            m[i * n + i - 1] = -s;
            m[i * n + i + 1] = s;
        }
        let r = (n - 1) * n;
        m[r + n - 1] = 3.0 * s;
        m[r + n - 2] = -4.0 * s;
        m[r + n - 3] = s;
        m
    }

    /// Trapezoid weights including the `dz` factor.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.nz)
            .map(|i| if i == 0 || i + 1 == self.nz { 0.5 * self.dz } else { self.dz })
            .collect()
    }
}

/// Cubic Lagrange interpolation stencil at height `z`: first level and weights.
pub(crate) fn lagrange_stencil(slab: &SlabGrid, z: f64) -> (usize, [f64; 4]) {
    let nz = slab.nz();
    let dz = slab.dz();
    let s = (z / dz).clamp(0.0, (nz - 1) as f64);
    let start = (s.floor() as usize).saturating_sub(1).min(nz - 4);
    let mut w = [0.0; 4];
    for (a, wa) in w.iter_mut().enumerate() {
        let xa = (start + a) as f64;
        *wa = (0..4)
            .filter(|&b| b != a)
            .map(|b| {
                let xb = (start + b) as f64;
                (s - xb) / (xa - xb)
            })
            .product();
    }
    (start, w)
}

/// In-place Cholesky factorization of a symmetric positive definite matrix.
pub(crate) fn cholesky(a: &mut [f64], n: usize) {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
}

/// Solves `L L^T x = b` with the factor from [`cholesky`].
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &mut [Complex64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
