use std::collections::BTreeMap;

use rayon::prelude::*;

use super::vertical::{cholesky, cholesky_solve, Vertical};
use crate::error::{Error, Result};
use crate::spectral::{Complex64, LayeredField3D, PhysField2D};

/// Components of a vector field on the slab in `(z, x1, x2)` order.
pub type VectorField3D = [LayeredField3D; 3];

/// Spectral horizontal derivatives and second-order differences in z.
pub fn gradient(f: &LayeredField3D) -> VectorField3D {
    let v = Vertical::new(f.slab());
    let g = *f.slab().torus();
    let cols: Vec<Vec<Complex64>> =
        (0..g.len()).into_par_iter().map(|idx| v.derivative(&f.column(idx))).collect();
    [
        LayeredField3D::from_columns(*f.slab(), cols),
        f.map_layers(|l| l.derivative(0)),
        f.map_layers(|l| l.derivative(1)),
    ]
}

/// Surface values of a slab field.
pub fn boundary_trace(f: &LayeredField3D) -> PhysField2D {
    f.layer(0).to_phys()
}

/// Orthogonal projection onto discrete gradients in the trapezoid `L^2`
/// inner product of the slab.
///
/// Each Fourier mode solves the normal equations
/// `(kappa^2 W + D^T W D) w = W (-i k . v_h) + D^T W v_z`, where `D` is the
/// vertical difference operator of [`gradient`] and `W` the trapezoid weights,
/// and returns the discrete gradient of `w`. The result is idempotent and
/// `v - P v` is orthogonal to every discrete gradient.
pub fn hodge_project(v: &VectorField3D) -> Result<VectorField3D> {
    let slab = *v[0].slab();
    if v[1].slab() != &slab || v[2].slab() != &slab {
        return Err(Error::GridMismatch("vector components live on different slabs"));
    }
    let g = *slab.torus();
    let vert = Vertical::new(&slab);
    let nz = slab.nz();
    let w = vert.weights();
    let d = vert.derivative_matrix();
    let mut dtwd = vec![0.0; nz * nz];
    for i in 0..nz {
        for j in 0..nz {
            dtwd[i * nz + j] = (0..nz).map(|r| d[r * nz + i] * w[r] * d[r * nz + j]).sum();
        }
    }
    let keys: Vec<i64> = {
        let mut k: Vec<i64> = (0..g.len())
            .map(|idx| {
                let (m1, m2) = g.modes(idx);
                m1 * m1 + m2 * m2
            })
            .collect();
        k.sort_unstable();
        k.dedup();
        k
    };
    let scale = 2.0 * std::f64::consts::PI / g.l();
    let factors: BTreeMap<i64, Vec<f64>> = keys
        .par_iter()
        .map(|&key| {
            let k2 = key as f64 * scale * scale;
            let mut m = dtwd.clone();
            for i in 0..nz {
                m[i * nz + i] += k2 * w[i];
            }
            if key == 0 {
                // Pin the constant null space with a rank-one term.
                for i in 0..nz {
                    for j in 0..nz {
                        m[i * nz + j] += w[i] * w[j];
                    }
                }
            }
            cholesky(&mut m, nz);
            (key, m)
        })
        .collect();

    let cols: Vec<Vec<Complex64>> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let (m1, m2) = g.modes(idx);
            let (k1, k2) = g.wavevector(idx);
            let vz = v[0].column(idx);
            let v1 = v[1].column(idx);
            let v2 = v[2].column(idx);
            let mut rhs: Vec<Complex64> = (0..nz)
                .map(|i| {
                    let horiz = Complex64::new(0.0, -1.0) * (k1 * v1[i] + k2 * v2[i]);
                    let vert: Complex64 = (0..nz).map(|r| d[r * nz + i] * w[r] * vz[r]).sum();
                    w[i] * horiz + vert
                })
                .collect();
            cholesky_solve(&factors[&(m1 * m1 + m2 * m2)], nz, &mut rhs);
            rhs
        })
        .collect();
    let pot = LayeredField3D::from_columns(slab, cols);
    Ok(gradient(&pot))
}

/// `sum_j int (a_j b_j)` over the slab with the trapezoid rule.
pub fn vector_inner(a: &VectorField3D, b: &VectorField3D) -> f64 {
    (0..3).map(|c| a[c].inner(&b[c])).sum()
}
