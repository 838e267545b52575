use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::SpectralField2D;
use super::grid::TorusGrid;
use super::Complex64;

/// Seeded smooth random field with modes `1 <= max(|m1|, |m2|) <= kmax`.
///
/// Amplitudes decay like `|m|^-decay`; the mean is zero and the result is
/// exactly Hermitian.
pub fn random_field(grid: TorusGrid, kmax: i64, decay: f64, seed: u64) -> SpectralField2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField2D::zeros(grid);
    let kmax = kmax.min(grid.n() as i64 / 2 - 1);
    // Draw in a fixed mode order so the result does not depend on n.
    for m1 in -kmax..=kmax {
        for m2 in -kmax..=kmax {
            let amp: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            if (m1, m2) <= (0, 0) && !(m1 == 0 && m2 > 0) {
                continue;
            }
            let r = ((m1 * m1 + m2 * m2) as f64).sqrt();
            let c = Complex64::from_polar(amp * r.powf(-decay), phase);
            let n = grid.n() as i64;
            let idx = (m1.rem_euclid(n) * n + m2.rem_euclid(n)) as usize;
            f.coeffs_mut()[idx] = c;
            f.coeffs_mut()[grid.conjugate_index(idx)] = c.conj();
        }
    }
    f
}
