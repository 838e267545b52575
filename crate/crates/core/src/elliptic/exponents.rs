use crate::error::{Error, Result};

fn open(value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::ExponentRange { value, range })
    }
}

/// Sobolev exponent `3q / (3 - q)` of `W^{1,q}` in three dimensions.
pub fn sobolev_lift(q: f64) -> Result<f64> {
    open(q, 1.0, 3.0, "(1, 3)")?;
    Ok(3.0 * q / (3.0 - q))
}

/// Trace exponent `2q / (3 - q)` on the boundary plane.
pub fn trace_exponent(q: f64) -> Result<f64> {
    open(q, 1.0, 3.0, "(1, 3)")?;
    Ok(2.0 * q / (3.0 - q))
}

/// Integrability `3p / 2` of the gradient of a harmonic extension of `L^p` data.
pub fn neumann_lift(p: f64) -> Result<f64> {
    if p.is_infinite() {
        return Err(Error::ExponentRange { value: p, range: "(1, inf)" });
    }
    open(p, 1.0, f64::INFINITY, "(1, inf)")?;
    Ok(1.5 * p)
}

/// Exponent `2q / (3(q - 1))` above which commutator terms are controlled.
pub fn commutator_threshold(q: f64) -> Result<f64> {
    if !(q > 1.0 && q <= 3.0) {
        return Err(Error::ExponentRange { value: q, range: "(1, 3]" });
    }
    Ok(2.0 * q / (3.0 * (q - 1.0)))
}
