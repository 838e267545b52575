use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use super::testfn::{TestFunctionSpec, TestKind};
use crate::commutator::nonlinear_flux_commutator;
use crate::dynamics::{perp, ForcingSpec, SimState, Trajectory};
use crate::elliptic::vertical::{lagrange_stencil, Vertical};
use crate::elliptic::{psi1_at, psi1_dz_at, psi2_surface, solve_psi2};
use crate::error::{Error, Result};
use crate::harmonic::lambda_pow;
use crate::spectral::{Complex64, LayeredField3D, PhysField2D, SlabGrid, SpectralField2D};

/// Gauss-Legendre nodes per panel of the graded vertical rule.
const GL_NODES: usize = 12;

/// The four space-time integrals of a weak formulation.
///
/// The identity being tested is `time + nonlinear + forcing + initial = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakTerms {
    /// `int int d_t phi (...)`.
    pub time: f64,
    /// Transport term.
    pub nonlinear: f64,
    /// Forcing term.
    pub forcing: f64,
    /// Initial-data term at `t = 0`.
    pub initial: f64,
}

impl WeakTerms {
    /// Signed defect of the identity.
    pub fn raw(&self) -> f64 {
        self.time + self.nonlinear + self.forcing + self.initial
    }

    /// Sum of the term magnitudes.
    pub fn magnitude(&self) -> f64 {
        self.time.abs() + self.nonlinear.abs() + self.forcing.abs() + self.initial.abs()
    }

    /// `|raw| / magnitude`, zero when every term vanishes.
    pub fn residual(&self) -> f64 {
        normalized(self.raw(), self.magnitude())
    }
}

fn normalized(raw: f64, mag: f64) -> f64 {
    if mag > 0.0 {
        raw.abs() / mag
    } else {
        0.0
    }
}

/// Residual of the interior/boundary pair read as one identity, the form in
/// which the reformulated weak solution splits.
pub fn combined_residual(interior: &WeakTerms, boundary: &WeakTerms) -> f64 {
    normalized(boundary.raw() - interior.raw(), boundary.magnitude() + interior.magnitude())
}

/// All weak-form terms for one test function.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FormulationTerms {
    /// Gradient form, tested against `grad phi`.
    pub rqg: WeakTerms,
    /// Interior transport of `omega` tested against `phi`.
    pub qg_interior: WeakTerms,
    /// Surface transport of `theta` tested against `phi(z = 0)`.
    pub qg_boundary: WeakTerms,
    /// Surface transport with the nonlinear term in commutator form.
    pub qg_commutator_boundary: WeakTerms,
}

#[derive(Debug, Clone, Copy)]
struct Needs {
    rqg: bool,
    qg: bool,
    commutator: bool,
}

/// Per-snapshot integrals for one test function, before time weighting.
#[derive(Debug, Clone, Copy, Default)]
struct SnapVals {
    b_a: f64,
    b_n: f64,
    b_nc: f64,
    b_f: f64,
    i_a: f64,
    i_n: f64,
    i_f: f64,
    r_a: f64,
    r_b: f64,
    r_c: f64,
}

/// Horizontal profile of a test function and its first and second derivatives.
struct Profile {
    spec: TestFunctionSpec,
    radius: f64,
    chi: PhysField2D,
    d: [PhysField2D; 2],
    dd: [[PhysField2D; 2]; 2],
}

impl Profile {
    fn new(spec: TestFunctionSpec, slab: &SlabGrid) -> Result<Self> {
        let c = spec.spatial(slab.torus());
        let d1 = c.derivative(0);
        let d2 = c.derivative(1);
        let d12 = d1.derivative(1).to_phys();
        Ok(Self {
            spec,
            radius: spec.radius(slab.h())?,
            chi: c.to_phys(),
            dd: [[d1.derivative(0).to_phys(), d12.clone()], [d12, d2.derivative(1).to_phys()]],
            d: [d1.to_phys(), d2.to_phys()],
        })
    }

    fn zeta(&self, z: f64) -> (f64, f64) {
        self.spec.vertical(z, self.radius)
    }

    /// `int q (v . grad chi)`.
    fn transport(&self, q: &PhysField2D, v: &[PhysField2D; 2]) -> f64 {
        let (q, v0, v1, c0, c1) = (q.values(), v[0].values(), v[1].values(), self.d[0].values(), self.d[1].values());
        let s: f64 = (0..q.len()).map(|i| q[i] * (v0[i] * c0[i] + v1[i] * c1[i])).sum();
        s * self.chi.grid().cell_area()
    }

    /// `int grad_h chi . grad_h g` for horizontal components `g`.
    fn grad_dot(&self, g: &[PhysField2D]) -> f64 {
        self.d[0].dot(&g[0]) + self.d[1].dot(&g[1])
    }

    /// `int sum_{j,m} v_j d_j d_m chi g_m`.
    fn hessian_form(&self, v: &[PhysField2D; 2], g: &[PhysField2D]) -> f64 {
        let mut s = 0.0;
        for j in 0..2 {
            for m in 0..2 {
                let (a, h, b) = (v[j].values(), self.dd[j][m].values(), g[m].values());
                s += (0..a.len()).map(|i| a[i] * h[i] * b[i]).sum::<f64>();
            }
        }
        s * self.chi.grid().cell_area()
    }
}

/// Interpolates finite-difference level data to height `z` (cubic Lagrange).
fn interp(cols: &[Vec<Complex64>], slab: &SlabGrid, z: f64) -> SpectralField2D {
    let (start, w) = lagrange_stencil(slab, z);
    let coeffs = cols
        .iter()
        .map(|c| (0..4).map(|a| c[start + a] * w[a]).sum())
        .collect();
    SpectralField2D::from_coeffs(*slab.torus(), coeffs).expect("column count matches grid")
}

/// Vertical columns of a layered field and of its centered z-derivative.
fn columns(f: &LayeredField3D) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let slab = *f.slab();
    let v = Vertical::new(&slab);
    let n = slab.torus().len();
    let vals: Vec<Vec<Complex64>> = (0..n).map(|idx| f.column(idx)).collect();
    let der = vals.iter().map(|c| v.derivative(c)).collect();
    (vals, der)
}

/// Graded composite Gauss-Legendre rule on `[0, r]` resolving `exp(-c z)`
/// for every rate up to `cmax`.
fn graded_rule(r: f64, cmax: f64) -> Vec<(f64, f64)> {
    let levels = (cmax * r).max(1.0).log2().ceil() as i32;
    let mut edges = vec![0.0];
    for j in (0..=levels).rev() {
        edges.push(r * 0.5f64.powi(j));
    }
    let gl = GaussLegendre::new(NonZeroUsize::new(GL_NODES).expect("nonzero"));
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        for &(x, wt) in gl.as_node_weight_pairs() {
            out.push((0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * wt));
        }
    }
    out
}

fn grads(psi: &SpectralField2D, dz: SpectralField2D) -> [PhysField2D; 3] {
    [dz.to_phys(), psi.derivative(0).to_phys(), psi.derivative(1).to_phys()]
}

fn velocity(psi: &SpectralField2D, sweep: [f64; 2]) -> [PhysField2D; 2] {
    let [a, b] = perp(psi);
    let shift = |f: SpectralField2D, s: f64| {
        let mut p = f.to_phys();
        p.values_mut().iter_mut().for_each(|v| *v += s);
        p
    };
    [shift(a, sweep[0]), shift(b, sweep[1])]
}

fn snapshot_values(
    s: &SimState,
    profiles: &[Profile],
    forcing: &ForcingSpec,
    eps_diss: f64,
    sweep: [f64; 2],
    needs: Needs,
) -> Result<Vec<SnapVals>> {
    let slab = *s.slab();
    let g = *slab.torus();
    let theta = s.theta();
    let omega = s.omega();
    let has_interior = !omega.is_zero();
    let mut out = vec![SnapVals::default(); profiles.len()];

    let mut fnu = lambda_pow(1.0, theta)?.scaled(-eps_diss);
    if let Some(f) = forcing.surface_at(s.t())? {
        fnu.axpy(1.0, &f);
    }
    let fl = forcing.interior_at(s.t())?;

    if needs.qg || needs.commutator {
        let psi2s = psi2_surface(omega);
        let th = theta.to_phys();
        let fnu_p = fnu.to_phys();
        let psi_s = lambda_pow(-1.0, theta)?.add(&psi2s);
        let u0 = velocity(&psi_s, sweep);
        let u2 = velocity(&psi2s, sweep);
        for (v, p) in out.iter_mut().zip(profiles) {
            v.b_a = p.chi.dot(&th);
            v.b_f = p.chi.dot(&fnu_p);
            if needs.qg {
                v.b_n = p.transport(&th, &u0);
            }
            if needs.commutator {
                let c = if theta.is_zero() { 0.0 } else { nonlinear_flux_commutator(theta, &p.chi)? };
                v.b_nc = -c + p.transport(&th, &u2);
            }
        }
        if needs.qg && (has_interior || fl.is_some()) {
            let psi2 = &s.split()?.psi2;
            for i in 0..slab.nz() {
                let z = slab.z(i);
                let wz = slab.trapezoid_weight(i) * slab.dz();
                let zetas: Vec<f64> = profiles.iter().map(|p| p.zeta(z).0).collect();
                if zetas.iter().all(|&z| z == 0.0) {
                    continue;
                }
                let om = omega.layer(i).to_phys();
                let u = velocity(&psi1_at(theta, z)?.add(psi2.layer(i)), sweep);
                let f_i = fl.as_ref().map(|f| f.layer(i).to_phys());
                for ((v, p), zeta) in out.iter_mut().zip(profiles).zip(&zetas) {
                    if *zeta == 0.0 {
                        continue;
                    }
                    let c = wz * zeta;
                    v.i_a += c * p.chi.dot(&om);
                    v.i_n += c * p.transport(&om, &u);
                    if let Some(f) = &f_i {
                        v.i_f += c * p.chi.dot(f);
                    }
                }
            }
        }
    }

    if needs.rqg {
        let r = profiles.iter().map(|p| p.radius).fold(0.0, f64::max);
        let kmax = (0..g.len()).map(|idx| g.wavenumber(idx)).fold(0.0, f64::max);
        let rule = graded_rule(r, 2.0 * kmax);
        let psi2 = if has_interior { Some(columns(&s.split()?.psi2)) } else { None };
        let f2 = fl.as_ref().map(|f| columns(&solve_psi2(f)));
        let per_node = rule
            .par_iter()
            .map(|&(z, wz)| -> Result<Vec<[f64; 3]>> {
                let mut psi = psi1_at(theta, z)?;
                let mut pz = psi1_dz_at(theta, z)?;
                if let Some((v, d)) = &psi2 {
                    psi = psi.add(&interp(v, &slab, z));
                    pz = pz.add(&interp(d, &slab, z));
                }
                let mut fpot = psi1_at(&fnu, z)?;
                let mut fz = psi1_dz_at(&fnu, z)?;
                if let Some((v, d)) = &f2 {
                    fpot = fpot.add(&interp(v, &slab, z));
                    fz = fz.add(&interp(d, &slab, z));
                }
                let gp = grads(&psi, pz);
                let gf = grads(&fpot, fz);
                let u = velocity(&psi, sweep);
                profiles
                    .iter()
                    .map(|p| {
                        let (zeta, dzeta) = p.zeta(z);
                        if zeta == 0.0 && dzeta == 0.0 {
                            return Ok([0.0; 3]);
                        }
                        let a = dzeta * p.chi.dot(&gp[0]) + zeta * p.grad_dot(&gp[1..]);
                        let mut b = zeta * p.hessian_form(&u, &gp[1..]);
                        if dzeta != 0.0 {
                            b += dzeta * p.transport(&gp[0], &u);
                        }
                        let c = dzeta * p.chi.dot(&gf[0]) + zeta * p.grad_dot(&gf[1..]);
                        Ok([wz * a, wz * b, wz * c])
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        for node in per_node {
            for (v, t) in out.iter_mut().zip(node) {
                v.r_a += t[0];
                v.r_b += t[1];
                v.r_c += t[2];
            }
        }
    }
    Ok(out)
}

/// Gregory end-correction coefficients for differences of order 1 to 4.
const GREGORY: [f64; 4] = [1.0 / 12.0, -1.0 / 24.0, 19.0 / 720.0, -3.0 / 160.0];

/// Trapezoid weights on `m` uniform nodes with Gregory end corrections,
/// which raise the order from two to six for smooth integrands. Falls back to
/// the plain trapezoid rule when there are too few nodes.
pub fn time_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; m];
    if m == 1 {
        return vec![0.0];
    }
    w[0] = 0.5 * h;
    w[m - 1] = 0.5 * h;
    if m < 2 * (GREGORY.len() + 1) {
        return w;
    }
    let binom = |k: usize, j: usize| (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64);
    for (k1, c) in GREGORY.iter().enumerate() {
        let k = k1 + 1;
        for j in 0..=k {
            let b = binom(k, j);
            // Forward difference at the left end: sum_j (-1)^{k-j} C(k, j) f_j.
            let left = if (k - j) % 2 == 0 { b } else { -b };
            w[j] += h * c * left;
            // Backward difference at the right end: sum_j (-1)^j C(k, j) f_{m-1-j},
            // entering with coefficient -|c| (-1)^{k+1} relative to the left end.
            let right = if j % 2 == 0 { b } else { -b };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            w[m - 1 - j] += h * c * sign * right;
        }
    }
    w
}

fn accumulate(
    traj: &Trajectory,
    specs: &[TestFunctionSpec],
    forcing: &ForcingSpec,
    needs: Needs,
) -> Result<Vec<FormulationTerms>> {
    let h = traj.cadence()?;
    let snaps = &traj.snapshots;
    let slab = *snaps[0].slab();
    if snaps.iter().any(|s| s.slab() != &slab) {
        return Err(Error::Trajectory("snapshots live on different grids".into()));
    }
    let profiles = specs.iter().map(|s| Profile::new(*s, &slab)).collect::<Result<Vec<_>>>()?;
    let t0 = snaps[0].t();
    let t_end = snaps[snaps.len() - 1].t() - t0;
    let weights = time_weights(snaps.len(), h);
    let mut out = vec![FormulationTerms::default(); specs.len()];
    for (n, s) in snaps.iter().enumerate() {
        let vals = snapshot_values(s, &profiles, forcing, traj.params.eps_diss, traj.params.sweep, needs)?;
        let tau = weights[n];
        for ((o, v), p) in out.iter_mut().zip(&vals).zip(&profiles) {
            let (w, dw) = p.spec.temporal(s.t() - t0, t_end);
            let z0 = match p.spec.kind {
                TestKind::Surface => 1.0,
                _ => p.zeta(0.0).0,
            };
            let add = |t: &mut WeakTerms, a: f64, nl: f64, f: f64| {
                t.time += tau * dw * a;
                t.nonlinear += tau * w * nl;
                t.forcing += tau * w * f;
                if n == 0 {
                    t.initial = a;
                }
            };
            add(&mut o.qg_boundary, z0 * v.b_a, z0 * v.b_n, z0 * v.b_f);
            add(&mut o.qg_commutator_boundary, z0 * v.b_a, z0 * v.b_nc, z0 * v.b_f);
            if p.spec.kind != TestKind::Surface {
                add(&mut o.qg_interior, v.i_a, v.i_n, v.i_f);
                add(&mut o.rqg, v.r_a, v.r_b, v.r_c);
            }
        }
    }
    Ok(out)
}

/// Weak-form terms of every formulation for a family of test functions.
///
/// Time integrals use the end-corrected trapezoid rule [`time_weights`] on the
/// snapshot cadence, horizontal
/// integrals the node quadrature. The interior transport uses the slab
/// levels; the gradient form uses a graded Gauss-Legendre rule in `z` with
/// `Psi_1` exact and `Psi_2` interpolated from the levels.
pub fn weak_terms(traj: &Trajectory, specs: &[TestFunctionSpec], forcing: &ForcingSpec) -> Result<Vec<FormulationTerms>> {
    accumulate(traj, specs, forcing, Needs { rqg: true, qg: true, commutator: true })
}

fn require(spec: &TestFunctionSpec, kinds: &[TestKind], what: &str) -> Result<()> {
    if kinds.contains(&spec.kind) {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{what} test function has kind {:?}", spec.kind)))
    }
}

/// Normalized residual of the gradient-form (reformulated) weak identity.
pub fn weak_residual_rqg(traj: &Trajectory, phi: &TestFunctionSpec, forcing: &ForcingSpec) -> Result<f64> {
    require(phi, &[TestKind::Closure, TestKind::Interior], "gradient-form")?;
    let t = accumulate(traj, &[*phi], forcing, Needs { rqg: true, qg: false, commutator: false })?;
    Ok(t[0].rqg.residual())
}

/// `(interior, boundary)` residuals of the transport weak form.
pub fn weak_residual_qg(
    traj: &Trajectory,
    phi: &TestFunctionSpec,
    phi_bar: &TestFunctionSpec,
    forcing: &ForcingSpec,
) -> Result<(f64, f64)> {
    require(phi, &[TestKind::Interior, TestKind::Closure], "interior")?;
    require(phi_bar, &[TestKind::Surface], "boundary")?;
    let t = accumulate(traj, &[*phi, *phi_bar], forcing, Needs { rqg: false, qg: true, commutator: false })?;
    Ok((t[0].qg_interior.residual(), t[1].qg_boundary.residual()))
}

/// `(interior, boundary)` residuals with the boundary nonlinearity written as
/// `-1/2 int R_perp theta . [Lambda, grad phi] Lambda^{-1} theta` plus the
/// transport by the surface value of `grad_perp Psi_2`.
pub fn weak_residual_qg_commutator(
    traj: &Trajectory,
    phi: &TestFunctionSpec,
    phi_bar: &TestFunctionSpec,
    forcing: &ForcingSpec,
) -> Result<(f64, f64)> {
    require(phi, &[TestKind::Interior, TestKind::Closure], "interior")?;
    require(phi_bar, &[TestKind::Surface], "boundary")?;
    let t = accumulate(traj, &[*phi, *phi_bar], forcing, Needs { rqg: false, qg: true, commutator: true })?;
    Ok((t[0].qg_interior.residual(), t[1].qg_commutator_boundary.residual()))
}

/// One test function's residuals under the three formulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceRow {
    pub spec: TestFunctionSpec,
    pub rqg: f64,
    /// Interior and boundary identities combined, `phi_bar = phi(z = 0)`.
    pub qg: f64,
    pub qg_commutator: f64,
}

impl EquivalenceRow {
    /// `[|rqg - qg|, |rqg - commutator|, |qg - commutator|]`.
    pub fn differences(&self) -> [f64; 3] {
        [
            (self.rqg - self.qg).abs(),
            (self.rqg - self.qg_commutator).abs(),
            (self.qg - self.qg_commutator).abs(),
        ]
    }

    pub fn max_difference(&self) -> f64 {
        self.differences().into_iter().fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.rqg.max(self.qg).max(self.qg_commutator)
    }
}

/// Side-by-side residuals of the three weak formulations.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceReport {
    pub fn max_difference(&self) -> f64 {
        self.rows.iter().map(EquivalenceRow::max_difference).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(EquivalenceRow::max_residual).fold(0.0, f64::max)
    }

    /// Smallest residual of each formulation over the suite.
    pub fn min_residuals(&self) -> [f64; 3] {
        let m = |f: fn(&EquivalenceRow) -> f64| self.rows.iter().map(f).fold(f64::INFINITY, f64::min);
        [m(|r| r.rqg), m(|r| r.qg), m(|r| r.qg_commutator)]
    }

    /// Pairwise differences all within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.max_difference() <= tol
    }
}

/// Evaluates the three formulations on a suite of closure-kind test functions.
pub fn equivalence_report(
    traj: &Trajectory,
    suite: &[TestFunctionSpec],
    forcing: &ForcingSpec,
) -> Result<EquivalenceReport> {
    for s in suite {
        require(s, &[TestKind::Closure, TestKind::Interior], "equivalence")?;
    }
    let terms = weak_terms(traj, suite, forcing)?;
    let rows = suite
        .iter()
        .zip(terms)
        .map(|(spec, t)| EquivalenceRow {
            spec: *spec,
            rqg: t.rqg.residual(),
            qg: combined_residual(&t.qg_interior, &t.qg_boundary),
            qg_commutator: combined_residual(&t.qg_interior, &t.qg_commutator_boundary),
        })
        .collect();
    Ok(EquivalenceReport { rows })
}
