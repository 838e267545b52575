use rayon::prelude::*;

use super::forcing::ForcingSpec;
use super::params::StepParams;
use super::state::SimState;
use super::velocity::{perp, speed, surface_stream, velocity_from_state};
use crate::elliptic::{psi1_at, psi2_surface, solve_psi1, solve_psi2};
use crate::error::{Error, Result};
use crate::harmonic::lambda_pow;
use crate::spectral::{LayeredField3D, PhysField2D, SpectralField2D, TorusGrid};

/// `-(u . grad q)` at the grid nodes, or `None` when `q` vanishes, plus `max |u|`.
fn transport_product(u: &[SpectralField2D; 2], q: &SpectralField2D, p: &StepParams) -> (Option<PhysField2D>, f64) {
    let (u1, u2) = SpectralField2D::to_phys_pair(&u[0], &u[1]);
    let umax = speed(&u1, &u2, p.sweep);
    if q.is_zero() {
        return (None, umax);
    }
    let (q1, q2) = SpectralField2D::to_phys_pair(&q.derivative(0), &q.derivative(1));
    let vals: Vec<f64> = (0..u1.values().len())
        .map(|i| {
            -((u1.values()[i] + p.sweep[0]) * q1.values()[i] + (u2.values()[i] + p.sweep[1]) * q2.values()[i])
        })
        .collect();
    (Some(PhysField2D::from_values(*q.grid(), vals).expect("grid length")), umax)
}

fn finish(mut f: SpectralField2D, p: &StepParams) -> SpectralField2D {
    if p.dealias {
        f.dealias();
    }
    f.zero_mean();
    f
}

/// Transforms node values back, two fields per complex transform; `None` maps to zero.
fn transform_products(products: Vec<Option<PhysField2D>>, grid: TorusGrid, p: &StepParams) -> Vec<SpectralField2D> {
    let single = |f: &Option<PhysField2D>| match f {
        Some(f) => finish(f.forward_unchecked(), p),
        None => SpectralField2D::zeros(grid),
    };
    products
        .par_chunks(2)
        .flat_map_iter(|pair| match pair {
            [Some(a), Some(b)] => {
                let (fa, fb) = PhysField2D::forward_pair(a, b);
                vec![finish(fa, p), finish(fb, p)]
            }
            _ => pair.iter().map(single).collect(),
        })
        .collect()
}

/// `-(u . grad q)` transformed, dealiased and made mean-free, plus `max |u|`.
fn advection(u: &[SpectralField2D; 2], q: &SpectralField2D, p: &StepParams) -> (SpectralField2D, f64) {
    let (prod, umax) = transport_product(u, q, p);
    let out = match prod {
        Some(f) => finish(f.forward_unchecked(), p),
        None => SpectralField2D::zeros(*q.grid()),
    };
    (out, umax)
}

pub(crate) struct Tendency {
    pub theta: SpectralField2D,
    pub omega: LayeredField3D,
    pub umax: f64,
}

/// Tendencies of `(theta, omega)` without dissipation.
pub(crate) fn evaluate(
    theta: &SpectralField2D,
    omega: &LayeredField3D,
    t: f64,
    f: &ForcingSpec,
    p: &StepParams,
) -> Result<Tendency> {
    let slab = *omega.slab();
    let interior = !omega.is_zero();
    let (psi2, psi2_0) = if interior {
        (Some(solve_psi2(omega)), psi2_surface(omega))
    } else {
        (None, SpectralField2D::zeros(*theta.grid()))
    };
    let psi_s = surface_stream(theta, &psi2_0)?;
    let (mut dtheta, mut umax) = advection(&perp(&psi_s), theta, p);
    if let Some(fs) = f.surface_at(t)? {
        dtheta.axpy(1.0, &fs);
    }

    // With omega = 0 the interior speed is bounded by the surface speed, since
    // the harmonic extension averages the surface velocity.
    let mut domega = LayeredField3D::zeros(slab);
    if let Some(psi2) = &psi2 {
        let results = (0..slab.nz())
            .into_par_iter()
            .map(|i| {
                let psi = psi1_at(theta, slab.z(i))?.add(psi2.layer(i));
                Ok(transport_product(&perp(&psi), omega.layer(i), p))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut products = Vec::with_capacity(results.len());
        for (prod, m) in results {
            products.push(prod);
            umax = umax.max(m);
        }
        for (layer, adv) in domega.layers_mut().iter_mut().zip(transform_products(products, *theta.grid(), p)) {
            *layer = adv;
        }
    }
    if let Some(fl) = f.interior_at(t)? {
        domega.axpy(1.0, &fl);
    }
    Ok(Tendency { theta: dtheta, omega: domega, umax })
}

/// Right-hand side `(d theta/dt, d omega/dt)` excluding dissipation.
pub fn rhs(s: &SimState, f: &ForcingSpec, p: &StepParams) -> Result<(SpectralField2D, LayeredField3D)> {
    let e = evaluate(s.theta(), s.omega(), s.t(), f, p)?;
    Ok((e.theta, e.omega))
}

/// Largest stable step `cfl dx / max |u|`, capped at `dt_cap`.
pub fn cfl_dt(s: &SimState, p: &StepParams) -> Result<f64> {
    let v = velocity_from_state(s)?;
    Ok(dt_from_speed(v.max_speed(p.sweep), s, p))
}

fn dt_from_speed(umax: f64, s: &SimState, p: &StepParams) -> f64 {
    (p.cfl * s.grid().dx() / umax.max(1e-12)).min(p.dt_cap)
}

/// One classical fourth-order Runge-Kutta step with the dissipation
/// `exp(-eps |k| t)` integrated exactly.
pub fn step_rk4(s: &SimState, p: &StepParams, f: &ForcingSpec) -> Result<SimState> {
    p.validate()?;
    step_inner(s, p, f).map(|r| r.0)
}

/// Step plus the maximum speed of the starting state.
pub(crate) fn step_inner(s: &SimState, p: &StepParams, f: &ForcingSpec) -> Result<(SimState, f64)> {
    let (dt, t) = (p.dt, s.t());
    let k1 = evaluate(s.theta(), s.omega(), t, f, p)?;
    let dt_max = dt_from_speed(k1.umax, s, p);
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, recommended: dt_max });
    }
    let g = *s.grid();
    let decay: Vec<f64> = (0..g.len()).map(|idx| (-0.5 * p.eps_diss * g.wavenumber(idx) * dt).exp()).collect();
    let half = |f: &SpectralField2D| f.map_modes(|idx, c| c * decay[idx]);

    let th0 = s.theta();
    let om0 = s.omega();
    let lin = |a: &LayeredField3D, b: &LayeredField3D, w: f64| {
        let mut out = a.clone();
        out.axpy(w, b);
        out
    };

    let mut a_th = th0.clone();
    a_th.axpy(0.5 * dt, &k1.theta);
    let a_th = half(&a_th);
    let a_om = lin(om0, &k1.omega, 0.5 * dt);
    let k2 = evaluate(&a_th, &a_om, t + 0.5 * dt, f, p)?;

    let mut b_th = half(th0);
    b_th.axpy(0.5 * dt, &k2.theta);
    let b_om = lin(om0, &k2.omega, 0.5 * dt);
    let k3 = evaluate(&b_th, &b_om, t + 0.5 * dt, f, p)?;

    let mut c_th = half(&half(th0));
    c_th.axpy(dt, &half(&k3.theta));
    let c_om = lin(om0, &k3.omega, dt);
    let k4 = evaluate(&c_th, &c_om, t + dt, f, p)?;

    let mut th = half(&half(th0));
    let mut acc = half(&half(&k1.theta));
    acc.axpy(2.0, &half(&k2.theta.add(&k3.theta)));
    acc.axpy(1.0, &k4.theta);
    th.axpy(dt / 6.0, &acc);

    let mut om = om0.clone();
    om.axpy(dt / 6.0, &k1.omega);
    om.axpy(dt / 3.0, &k2.omega);
    om.axpy(dt / 3.0, &k3.omega);
    om.axpy(dt / 6.0, &k4.omega);
    Ok((SimState::new(t + dt, th, om)?, k1.umax))
}

/// Potential `F` with `Laplacian F = f_L` and Neumann data `f_nu - eps Lambda theta`.
pub fn solve_forcing_potential(s: &SimState, f: &ForcingSpec, p: &StepParams) -> Result<LayeredField3D> {
    let slab = *s.slab();
    let mut data = lambda_pow(1.0, s.theta())?.scaled(-p.eps_diss);
    if let Some(fs) = f.surface_at(s.t())? {
        data.axpy(1.0, &fs);
    }
    let mut out = solve_psi1(&data, &slab)?;
    if let Some(fl) = f.interior_at(s.t())? {
        out.axpy(1.0, &solve_psi2(&fl));
    }
    Ok(out)
}
