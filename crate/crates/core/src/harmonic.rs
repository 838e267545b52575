//! Nonlocal surface operators: Riesz transforms, fractional Laplacians and the
//! harmonic (Poisson) extension into the half-space.
//!
//! All operators here are Fourier multipliers that are homogeneous or vanish at
//! `k = 0`; they act on the mean-free part of their input and return a
//! mean-free result. The Riesz transform has symbol `-i k_j / |k|`, so
//! `R_j = -d_j Lambda^{-1}` and `R_1 cos(x1) = sin(x1)` on the `2 pi` torus.

use crate::error::{Error, Result};
use crate::spectral::{Complex64, SpectralField2D};

/// Riesz transform along `x1` (`j = 1`) or `x2` (`j = 2`).
pub fn riesz(j: usize, theta: &SpectralField2D) -> Result<SpectralField2D> {
    if j != 1 && j != 2 {
        return Err(Error::InvalidParam(format!("Riesz index {j} must be 1 or 2")));
    }
    theta.apply_multiplier(|k1, k2| {
        let k = (k1 * k1 + k2 * k2).sqrt();
        let kj = if j == 1 { k1 } else { k2 };
        if k == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(0.0, -kj / k)
        }
    })
}

/// Rotated Riesz vector `(0, -R_2 theta, R_1 theta)` in `(z, x1, x2)` order.
pub fn riesz_perp(theta: &SpectralField2D) -> Result<[SpectralField2D; 3]> {
    Ok([
        SpectralField2D::zeros(*theta.grid()),
        riesz(2, theta)?.scaled(-1.0),
        riesz(1, theta)?,
    ])
}

/// `Lambda^s` with `Lambda = (-Laplacian)^{1/2}`, symbol `|k|^s`.
///
/// Negative powers need a mean-free input.
pub fn lambda_pow(s: f64, theta: &SpectralField2D) -> Result<SpectralField2D> {
    if !s.is_finite() {
        return Err(Error::InvalidParam(format!("power {s} must be finite")));
    }
    if s < 0.0 {
        check_mean_free(theta)?;
    }
    theta.apply_multiplier(|k1, k2| {
        let k = (k1 * k1 + k2 * k2).sqrt();
        if k == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(k.powf(s), 0.0)
        }
    })
}

/// Harmonic extension evaluated at height `z`, symbol `exp(-z |k|)`.
pub fn poisson_extend(theta: &SpectralField2D, z: f64) -> Result<SpectralField2D> {
    if !(z >= 0.0) {
        return Err(Error::NegativeHeight(z));
    }
    theta.apply_multiplier(|k1, k2| {
        let k = (k1 * k1 + k2 * k2).sqrt();
        if k == 0.0 {
            Complex64::default()
        } else {
            Complex64::new((-z * k).exp(), 0.0)
        }
    })
}

/// Dirichlet-to-Neumann map of the half-space, equal to `Lambda`.
pub fn dirichlet_to_neumann(theta: &SpectralField2D) -> Result<SpectralField2D> {
    lambda_pow(1.0, theta)
}

/// Named surface operator, for configuration-driven dispatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    Riesz1,
    Riesz2,
    RieszPerp,
    LambdaPow(f64),
    PoissonExt(f64),
    DtN,
}

/// Result of an [`OperatorTag`]: a scalar field or a `(z, x1, x2)` vector.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorOutput {
    Scalar(SpectralField2D),
    Vector([SpectralField2D; 3]),
}

impl OperatorTag {
    pub fn apply(&self, theta: &SpectralField2D) -> Result<OperatorOutput> {
        use OperatorOutput::Scalar;
        Ok(match *self {
            OperatorTag::Riesz1 => Scalar(riesz(1, theta)?),
            OperatorTag::Riesz2 => Scalar(riesz(2, theta)?),
            OperatorTag::RieszPerp => OperatorOutput::Vector(riesz_perp(theta)?),
            OperatorTag::LambdaPow(s) => Scalar(lambda_pow(s, theta)?),
            OperatorTag::PoissonExt(z) => Scalar(poisson_extend(theta, z)?),
            OperatorTag::DtN => Scalar(dirichlet_to_neumann(theta)?),
        })
    }
}

pub(crate) fn check_mean_free(theta: &SpectralField2D) -> Result<()> {
    let scale = theta.coeffs().iter().fold(0.0, |m: f64, c| m.max(c.norm()));
    let mean = theta.mean();
    if mean.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::NonzeroMean(mean));
    }
    Ok(())
}
