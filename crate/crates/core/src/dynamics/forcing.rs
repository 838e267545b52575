use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonic::check_mean_free;
use crate::spectral::{LayeredField3D, SpectralField2D};

type SurfaceGen = Arc<dyn Fn(f64) -> SpectralField2D + Send + Sync>;
type InteriorGen = Arc<dyn Fn(f64) -> LayeredField3D + Send + Sync>;

/// Time-dependent surface forcing `f_nu(t)` and interior forcing `f_L(t)`.
///
/// A missing generator stands for zero forcing.
#[derive(Clone, Default)]
pub struct ForcingSpec {
    surface: Option<SurfaceGen>,
    interior: Option<InteriorGen>,
}

impl fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForcingSpec")
            .field("surface", &self.surface.is_some())
            .field("interior", &self.interior.is_some())
            .finish()
    }
}

impl ForcingSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with_surface(mut self, f: impl Fn(f64) -> SpectralField2D + Send + Sync + 'static) -> Self {
        self.surface = Some(Arc::new(f));
        self
    }

    pub fn with_interior(mut self, f: impl Fn(f64) -> LayeredField3D + Send + Sync + 'static) -> Self {
        self.interior = Some(Arc::new(f));
        self
    }

    pub fn has_surface(&self) -> bool {
        self.surface.is_some()
    }

    pub fn has_interior(&self) -> bool {
        self.interior.is_some()
    }

    /// `f_nu(t)`, checked to be finite and mean-free.
    pub fn surface_at(&self, t: f64) -> Result<Option<SpectralField2D>> {
        let Some(gen) = &self.surface else { return Ok(None) };
        let f = gen(t);
        if f.coeffs().iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("surface forcing"));
        }
        check_mean_free(&f)?;
        Ok(Some(f))
    }

    /// `f_L(t)`, checked to be finite.
    pub fn interior_at(&self, t: f64) -> Result<Option<LayeredField3D>> {
        let Some(gen) = &self.interior else { return Ok(None) };
        let f = gen(t);
        let finite = f.layers().iter().all(|l| l.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        if !finite {
            return Err(Error::NonFinite("interior forcing"));
        }
        Ok(Some(f))
    }
}
