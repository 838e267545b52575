use std::f64::consts::PI;

use proptest::prelude::*;
use qg_halfspace::elliptic::*;
use qg_halfspace::spectral::*;

fn torus(n: usize) -> TorusGrid {
    TorusGrid::new(n, 2.0 * PI).unwrap()
}

fn max_err(f: &LayeredField3D, exact: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let slab = *f.slab();
    f.to_phys()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let g = *layer.grid();
            layer
                .values()
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let (x1, x2) = g.node(idx);
                    (v - exact(slab.z(i), x1, x2)).abs()
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn psi1_examples_are_exact() {
    let g = torus(16);
    let slab = SlabGrid::new(g, 33, 2.0 * PI).unwrap();
    assert!(solve_psi1(&SpectralField2D::zeros(g), &slab).unwrap().is_zero());
    let theta = PhysField2D::from_fn(g, |x1, _| x1.cos()).forward_transform().unwrap();
    let p = solve_psi1(&theta, &slab).unwrap();
    assert!(max_err(&p, |z, x1, _| (-z).exp() * x1.cos()) < 1e-12);
    let t2 = PhysField2D::from_fn(g, |x1, x2| (2.0 * x1 + x2).sin()).forward_transform().unwrap();
    let p2 = solve_psi1(&t2, &slab).unwrap();
    let k = 5f64.sqrt();
    assert!(max_err(&p2, |z, x1, x2| (-k * z).exp() / k * (2.0 * x1 + x2).sin()) < 1e-12);
    // -d_z Psi_1 at the surface reproduces theta exactly per mode.
    assert!(psi1_dz_at(&t2, 0.0).unwrap().add(&t2).l2_norm() < 1e-14);
    // Trace of the extension of cos(x1) is cos(x1) since |k| = 1.
    let tr = boundary_trace(&p);
    let want = PhysField2D::from_fn(g, |x1, _| x1.cos());
    assert!(tr.values().iter().zip(want.values()).all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn psi1_energy_with_tail_equals_negative_sobolev_norm() {
    let g = torus(32);
    let theta = random_field(g, 8, 1.0, 21);
    let h = PI;
    // Gauss-Legendre in z on [0, h] of the per-mode extension, plus the exact tail.
    let rule = gauss_quad::legendre::GaussLegendre::new(std::num::NonZeroUsize::new(40).unwrap());
    let mut total = 0.0;
    for &(x, w) in rule.as_node_weight_pairs() {
        let z = 0.5 * h * (x + 1.0);
        let p = psi1_at(&theta, z).unwrap();
        let pz = psi1_dz_at(&theta, z).unwrap();
        let horiz = p.derivative(0).inner(&p.derivative(0)) + p.derivative(1).inner(&p.derivative(1));
        total += 0.5 * h * w * (horiz + pz.inner(&pz));
    }
    let mut tail = 0.0;
    let mut hneg = 0.0;
    for (idx, c) in theta.coeffs().iter().enumerate() {
        let k = g.wavenumber(idx);
        if k > 0.0 {
            tail += c.norm_sqr() / k * (-2.0 * k * h).exp();
            hneg += c.norm_sqr() / k;
        }
    }
    total += tail * g.l() * g.l();
    hneg *= g.l() * g.l();
    assert!((total - hneg).abs() < 1e-10 * hneg, "{total} vs {hneg}");
}

fn manufactured(nz: usize) -> f64 {
    let g = torus(8);
    let h = PI;
    let slab = SlabGrid::new(g, nz, h).unwrap();
    let profile = |z: f64| (-z).exp() * (1.0 + z - z * z / (2.0 * h));
    let source = |z: f64| (-z).exp() * (-1.0 / h - 2.0 * (1.0 - z / h));
    let omega = LayeredField3D::from_fn(slab, |z, x1, _| source(z) * x1.cos()).unwrap();
    let psi = solve_psi2(&omega);
    max_err(&psi, |z, x1, _| profile(z) * x1.cos())
}

#[test]
fn psi2_manufactured_second_order() {
    let errs: Vec<f64> = [32, 64, 128].iter().map(|&nz| manufactured(nz)).collect();
    for pair in errs.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order >= 1.9, "order {order} from {errs:?}");
    }
}

#[test]
fn psi2_zero_and_symmetry() {
    let g = torus(16);
    let slab = SlabGrid::new(g, 17, PI).unwrap();
    assert!(solve_psi2(&LayeredField3D::zeros(slab)).is_zero());
    // Even in x: omega_hat(-k) = omega_hat(k) exactly, so Psi_2 inherits it.
    let base = random_field(g, 6, 1.0, 9);
    let mut even = base.clone();
    for idx in 0..g.len() {
        let c = base.coeffs()[idx] + base.coeffs()[g.conjugate_index(idx)];
        even.coeffs_mut()[idx] = Complex64::new(c.re, 0.0);
    }
    let layers = (0..slab.nz()).map(|i| even.scaled(1.0 - slab.z(i))).collect();
    let omega = LayeredField3D::from_layers(slab, layers).unwrap();
    let psi = solve_psi2(&omega);
    for layer in psi.layers() {
        for idx in 0..g.len() {
            let (m1, m2) = g.modes(idx);
            if 2 * m1.unsigned_abs().max(m2.unsigned_abs()) as usize == g.n() {
                continue;
            }
            assert_eq!(layer.coeffs()[idx], layer.coeffs()[g.conjugate_index(idx)]);
        }
    }
}

#[test]
fn zero_mode_top_slope_matches_integral() {
    let g = torus(8);
    let slab = SlabGrid::new(g, 129, PI).unwrap();
    let omega = LayeredField3D::from_fn(slab, |z, _, _| (z).sin() + 0.3).unwrap();
    let psi = solve_psi2(&omega);
    let grad = gradient(&psi);
    let top = grad[0].layer(slab.nz() - 1).mean();
    let integral = 2.0 + 0.3 * PI;
    assert!((top - integral).abs() < 1e-3, "{top} vs {integral}");
}

#[test]
fn gradient_examples() {
    let g = torus(16);
    let slab = SlabGrid::new(g, 65, PI).unwrap();
    let c = LayeredField3D::from_fn(slab, |_, _, _| 2.5).unwrap();
    assert!(gradient(&c).iter().all(|f| f.layers().iter().all(|l| l.l2_norm() < 1e-12)));
    let f = LayeredField3D::from_fn(slab, |z, x1, _| (-z).exp() * x1.cos()).unwrap();
    let gr = gradient(&f);
    assert!(max_err(&gr[1], |z, x1, _| -(-z).exp() * x1.sin()) < 1e-12);
    let ez = |nz: usize| {
        let s = SlabGrid::new(g, nz, PI).unwrap();
        let f = LayeredField3D::from_fn(s, |z, x1, _| (-z).exp() * x1.cos()).unwrap();
        max_err(&gradient(&f)[0], |z, x1, _| -(-z).exp() * x1.cos())
    };
    let order = (ez(33) / ez(65)).log2();
    assert!(order > 1.9, "order {order}");
    // -d_z of the harmonic extension at the surface reproduces theta to O(dz^2).
    let theta = PhysField2D::from_fn(g, |x1, x2| x1.cos() + x2.sin()).forward_transform().unwrap();
    let err = |nz: usize| {
        let s = SlabGrid::new(g, nz, PI).unwrap();
        let d = gradient(&solve_psi1(&theta, &s).unwrap());
        d[0].layer(0).scaled(-1.0).sub(&theta).l2_norm()
    };
    let order = (err(33) / err(65)).log2();
    assert!(order > 1.9, "order {order}");
}

#[test]
fn split_consistency_residuals() {
    let g = torus(16);
    let theta = random_field(g, 1, 1.0, 2);
    let res = |nz: usize| {
        let slab = SlabGrid::new(g, nz, 2.0 * PI).unwrap();
        let omega = LayeredField3D::from_fn(slab, |z, x1, x2| (-z * z).exp() * (x1 + x2).cos()).unwrap();
        let split = EllipticSplit::new(&theta, &omega).unwrap();
        let psi = split.total();
        let gr = gradient(&psi);
        let zz = gradient(&gr[0])[0].clone();
        let mut lap = psi.map_layers(|l| l.derivative(0).derivative(0).add(&l.derivative(1).derivative(1)));
        lap.axpy(1.0, &zz);
        // Interior levels only: the one-sided second difference is first order.
        let interior: f64 = (2..nz - 2)
            .map(|i| lap.layer(i).sub(omega.layer(i)).l2_norm())
            .fold(0.0, f64::max);
        let bdry = gr[0].layer(0).scaled(-1.0).sub(&theta).l2_norm();
        (interior, bdry)
    };
    let (a1, b1) = res(65);
    let (a2, b2) = res(129);
    assert!((a1 / a2).log2() > 1.8, "{a1} {a2}");
    assert!((b1 / b2).log2() > 1.8, "{b1} {b2}");
}

#[test]
fn neumann_fd_matches_split_at_second_order() {
    let g = torus(16);
    let theta = random_field(g, 3, 1.0, 5);
    let err = |nz: usize| {
        let slab = SlabGrid::new(g, nz, 2.0 * PI).unwrap();
        let omega = LayeredField3D::from_fn(slab, |z, x1, _| (-z).exp() * x1.sin()).unwrap();
        let fd = solve_neumann_fd(&theta, &omega).unwrap();
        let exact = EllipticSplit::new(&theta, &omega).unwrap().total();
        fd.layer(0).sub(exact.layer(0)).l2_norm()
    };
    let order = (err(65) / err(129)).log2();
    assert!(order > 1.9, "order {order}");
}

fn random_layered(slab: SlabGrid, seed: u64) -> LayeredField3D {
    let layers = (0..slab.nz())
        .map(|i| {
            let z = slab.z(i);
            random_field(*slab.torus(), 6, 1.0, seed).scaled((-z).exp() * (1.0 + z.sin()))
        })
        .collect();
    let mut f = LayeredField3D::from_layers(slab, layers).unwrap();
    let extra = LayeredField3D::from_fn(slab, |z, x1, x2| (z * x1.cos()).sin() + x2.sin() * z).unwrap();
    f.axpy(0.5, &extra);
    f
}

#[test]
fn hodge_projection_properties() {
    let g = torus(64);
    let slab = SlabGrid::new(g, 64, PI).unwrap();
    let v = [random_layered(slab, 1), random_layered(slab, 2), random_layered(slab, 3)];
    let p = hodge_project(&v).unwrap();
    let pp = hodge_project(&p).unwrap();
    let norm = vector_inner(&v, &v).sqrt();
    let diff: f64 = (0..3)
        .map(|c| {
            let mut d = pp[c].clone();
            d.axpy(-1.0, &p[c]);
            d.inner(&d)
        })
        .sum::<f64>()
        .sqrt();
    assert!(diff <= 1e-8 * norm, "idempotence defect {diff}");
    for seed in 10..20 {
        let phi = gradient(&random_layered(slab, seed));
        let a = vector_inner(&phi, &v);
        let b = vector_inner(&phi, &p);
        assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-300), "{a} vs {b}");
    }
}

#[test]
fn hodge_on_gradients_and_curls() {
    let g = torus(16);
    let err = |nz: usize| {
        let slab = SlabGrid::new(g, nz, PI).unwrap();
        // Exact gradient of w0 = exp(-z) cos(x1 + x2) + z^2 sin(x1).
        let exact = [
            LayeredField3D::from_fn(slab, |z, x1, x2| -(-z).exp() * (x1 + x2).cos() + 2.0 * z * x1.sin()).unwrap(),
            LayeredField3D::from_fn(slab, |z, x1, x2| -(-z).exp() * (x1 + x2).sin() + z * z * x1.cos()).unwrap(),
            LayeredField3D::from_fn(slab, |z, x1, x2| -(-z).exp() * (x1 + x2).sin()).unwrap(),
        ];
        let p = hodge_project(&exact).unwrap();
        let ge: f64 = (0..3)
            .map(|c| {
                let mut d = p[c].clone();
                d.axpy(-1.0, &exact[c]);
                d.inner(&d)
            })
            .sum::<f64>()
            .sqrt();
        // Curl of (0, 0, b(z) cos x1) with b vanishing at both ends.
        let b = |z: f64| z.sin().powi(2);
        let db = |z: f64| 2.0 * z.sin() * z.cos();
        let curl = [
            LayeredField3D::from_fn(slab, |z, x1, _| -b(z) * x1.sin()).unwrap(),
            LayeredField3D::from_fn(slab, |z, x1, _| -db(z) * x1.cos()).unwrap(),
            LayeredField3D::zeros(slab),
        ];
        let pc = hodge_project(&curl).unwrap();
        let ce = vector_inner(&pc, &pc).sqrt() / vector_inner(&curl, &curl).sqrt();
        (ge, ce)
    };
    let (g1, c1) = err(33);
    let (g2, c2) = err(65);
    assert!((g1 / g2).log2() > 1.8, "gradient errors {g1} {g2}");
    assert!((c1 / c2).log2() > 1.8, "curl errors {c1} {c2}");
    assert!(c2 < 1e-2);
}

#[test]
fn trace_inequality_ratio_is_stable() {
    let g = torus(64);
    let slab = SlabGrid::new(g, 33, PI).unwrap();
    let q = 2.0;
    let r = trace_exponent(q).unwrap();
    let ratio = |seed: u64| {
        let u = solve_psi1(&random_field(g, 6, 1.5, seed), &slab).unwrap();
        let gr = gradient(&u);
        let phys: Vec<Vec<PhysField2D>> = gr.iter().map(|c| c.to_phys()).collect();
        let mags: Vec<PhysField2D> = (0..slab.nz())
            .map(|i| {
                let vals = (0..g.len())
                    .map(|idx| phys.iter().map(|c| c[i].values()[idx].powi(2)).sum::<f64>().sqrt())
                    .collect();
                PhysField2D::from_values(g, vals).unwrap()
            })
            .collect();
        boundary_trace(&u).lp_norm(r) / lq_norm_phys(&slab, &mags, q)
    };
    let calib = (0..20).map(ratio).fold(0.0, f64::max);
    let c_test = 2.0 * calib;
    for seed in 100..120 {
        assert!(ratio(seed) <= c_test);
    }
}

#[test]
fn weak_to_strong_convergence_of_extension_gradient() {
    let g = torus(128);
    let slab = SlabGrid::new(g, 129, PI).unwrap();
    let diffs: Vec<f64> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|&m| {
            let osc = PhysField2D::from_fn(g, |x1, _| (m * x1).cos() / m).forward_transform().unwrap();
            let gr = gradient(&solve_psi1(&osc, &slab).unwrap());
            vector_inner(&gr, &gr).sqrt()
        })
        .collect();
    assert!(diffs.windows(2).all(|p| p[1] < p[0]), "{diffs:?}");
    assert!(diffs[3] < 0.2 * diffs[0]);
}

#[test]
fn exponent_arithmetic() {
    assert!((sobolev_lift(1.2).unwrap() - 2.0).abs() < 1e-14);
    assert!((neumann_lift(4.0 / 3.0).unwrap() - 2.0).abs() < 1e-14);
    assert!((trace_exponent(1.2).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    assert!((commutator_threshold(1.5).unwrap() - 2.0).abs() < 1e-14);
    assert!((commutator_threshold(2.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    assert!((commutator_threshold(3.0).unwrap() - 1.0).abs() < 1e-14);
    assert!(sobolev_lift(3.0).is_err());
    assert!(neumann_lift(f64::INFINITY).is_err());
    assert!(commutator_threshold(1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solves_are_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = torus(16);
        let slab = SlabGrid::new(g, 17, PI).unwrap();
        let t1 = random_field(g, 5, 1.0, seed);
        let t2 = random_field(g, 5, 1.0, seed ^ 1);
        let mut comb = t1.scaled(a);
        comb.axpy(b, &t2);
        let mut lin = solve_psi1(&t1, &slab).unwrap().scaled(a);
        lin.axpy(b, &solve_psi1(&t2, &slab).unwrap());
        let mut d = solve_psi1(&comb, &slab).unwrap();
        d.axpy(-1.0, &lin);
        prop_assert!(d.inner(&d).sqrt() <= 1e-12 * (1.0 + lin.inner(&lin).sqrt()));

        let w1 = random_layered(slab, seed);
        let w2 = random_layered(slab, seed ^ 7);
        let mut wc = w1.scaled(a);
        wc.axpy(b, &w2);
        let mut lin = solve_psi2(&w1).scaled(a);
        lin.axpy(b, &solve_psi2(&w2));
        let mut d = solve_psi2(&wc);
        d.axpy(-1.0, &lin);
        prop_assert!(d.inner(&d).sqrt() <= 1e-12 * (1.0 + lin.inner(&lin).sqrt()));
    }
}
