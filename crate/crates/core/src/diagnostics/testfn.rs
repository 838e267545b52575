use crate::error::{Error, Result};
use crate::spectral::{random_field, SpectralField2D, TorusGrid};

/// Support class of a space-time test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// Compact in the open slab: vanishes at `z = 0` and `z = R` to third order.
    Interior,
    /// Compact in the closed half-space: nonzero at `z = 0`, vanishes at `z = R`.
    Closure,
    /// Surface function `phi(t, x)` with no vertical dependence.
    Surface,
}

/// Separable test function `w(t) zeta(z) chi(x)`.
///
/// `chi` is a seeded band-limited trigonometric polynomial plus a constant,
/// `w` is a flat-top window equal to one near `t = 0` that vanishes smoothly
/// with all derivatives at `t = T`. All derivatives are in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionSpec {
    pub kind: TestKind,
    pub seed: u64,
    /// Largest horizontal mode of `chi`.
    pub kmax: i64,
    /// Vertical support radius `R`; `None` uses the slab height.
    pub height: Option<f64>,
}

fn flat(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

fn flat_d(s: f64) -> f64 {
    if s > 0.0 {
        flat(s) / (s * s)
    } else {
        0.0
    }
}

impl TestFunctionSpec {
    pub fn new(kind: TestKind, seed: u64) -> Self {
        Self { kind, seed, kmax: 3, height: None }
    }

    /// Seeded family of `count` test functions of one kind.
    pub fn suite(kind: TestKind, count: usize, seed: u64) -> Vec<Self> {
        (0..count as u64).map(|i| Self::new(kind, seed.wrapping_add(i))).collect()
    }

    /// Same horizontal and temporal profile with a different kind.
    pub fn with_kind(self, kind: TestKind) -> Self {
        Self { kind, ..self }
    }

    /// `(w(t), w'(t))` for a window over `[0, t_end]`; flat up to `t_end / 4`.
    pub fn temporal(&self, t: f64, t_end: f64) -> (f64, f64) {
        if t_end <= 0.0 {
            return (1.0, 0.0);
        }
        let a = 0.25 * t_end;
        if t <= a {
            return (1.0, 0.0);
        }
        if t >= t_end {
            return (0.0, 0.0);
        }
        let span = t_end - a;
        let s = (t - a) / span;
        let (f, fr) = (flat(s), flat(1.0 - s));
        let d = f + fr;
        let step = f / d;
        let dstep = (flat_d(s) * fr + f * flat_d(1.0 - s)) / (d * d);
        (1.0 - step, -dstep / span)
    }

    /// `(zeta(z), zeta'(z))` for a support radius `r`.
    pub fn vertical(&self, z: f64, r: f64) -> (f64, f64) {
        if z >= r || z < 0.0 {
            return (0.0, 0.0);
        }
        let s = z / r;
        match self.kind {
            TestKind::Interior => {
                let (a, b) = (s * (1.0 - s), 1.0 - 2.0 * s);
                (256.0 * a.powi(4), 1024.0 * a.powi(3) * b / r)
            }
            TestKind::Closure => {
                let a = 1.0 - s * s;
                (a.powi(4), -8.0 * s * a.powi(3) / r)
            }
            TestKind::Surface => (if z == 0.0 { 1.0 } else { 0.0 }, 0.0),
        }
    }

    /// Support radius on a slab of height `h`.
    pub fn radius(&self, h: f64) -> Result<f64> {
        let r = self.height.unwrap_or(h);
        if !(r > 0.0 && r <= h * (1.0 + 1e-12)) {
            return Err(Error::InvalidParam(format!("test-function height {r} outside (0, {h}]")));
        }
        Ok(r.min(h))
    }

    /// Horizontal profile `chi`: unit coefficient energy plus a constant `1/2`.
    ///
    /// The profile depends only on the seed, not on the grid resolution.
    pub fn spatial(&self, grid: &TorusGrid) -> SpectralField2D {
        let mut chi = random_field(*grid, self.kmax, 0.0, self.seed);
        let energy: f64 = chi.coeffs().iter().map(|c| c.norm_sqr()).sum();
        if energy > 0.0 {
            chi = chi.scaled(1.0 / energy.sqrt());
        }
        chi.coeffs_mut()[0].re += 0.5;
        chi
    }
}
