use std::f64::consts::PI;

use proptest::prelude::*;
use qg_halfspace::commutator::*;
use qg_halfspace::spectral::*;

fn torus(n: usize) -> TorusGrid {
    TorusGrid::new(n, 2.0 * PI).unwrap()
}

fn max_diff(a: &PhysField2D, b: &PhysField2D) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn calderon_trivial_cases() {
    let g = torus(32);
    let theta = random_field(g, 8, 1.0, 1);
    let c = calderon_commutator(&theta, &PhysField2D::from_fn(g, |_, _| 3.0)).unwrap();
    assert!(c.iter().all(|f| f.max_abs() < 1e-14));
    let phi = PhysField2D::from_fn(g, |x1, x2| (x1 + x2).sin());
    let c = calderon_commutator(&SpectralField2D::zeros(g), &phi).unwrap();
    assert!(c.iter().all(|f| f.max_abs() == 0.0));
    assert_eq!(nonlinear_flux_commutator(&SpectralField2D::zeros(g), &phi).unwrap(), 0.0);
    assert_eq!(nonlinear_flux_direct(&SpectralField2D::zeros(g), &phi).unwrap(), 0.0);
    assert!(nonlinear_flux_direct(&theta, &PhysField2D::from_fn(g, |_, _| 1.0)).unwrap().abs() < 1e-14);
    let shifted = PhysField2D::from_fn(g, |x1, _| 1.0 + x1.cos()).forward_transform().unwrap();
    assert!(calderon_commutator(&shifted, &phi).is_err());
}

#[test]
fn calderon_two_mode_closed_form() {
    // theta = cos(3 x1), phi = sin(x2): Lambda^{-1} theta = cos(3 x1)/3 and the
    // product with d_2 phi = cos(x2) sits on |k| = sqrt(10).
    let g = torus(32);
    let theta = PhysField2D::from_fn(g, |x1, _| (3.0 * x1).cos()).forward_transform().unwrap();
    let phi = PhysField2D::from_fn(g, |_, x2| x2.sin());
    let c = calderon_commutator(&theta, &phi).unwrap();
    assert!(c[1].max_abs() < 1e-10);
    let f = 10f64.sqrt() / 3.0 - 1.0;
    let want = PhysField2D::from_fn(g, |x1, x2| f * (3.0 * x1).cos() * x2.cos());
    assert!(max_diff(&c[2], &want) < 1e-10);
}

#[test]
fn flux_forms_agree_on_seeded_family() {
    let g = torus(64);
    for seed in 0..10u64 {
        let theta = random_field(g, 12, 1.0, seed);
        for t in 0..4u64 {
            let phi = random_field(g, 3, 0.0, 1000 + t).inverse_transform().unwrap();
            let d = nonlinear_flux_direct(&theta, &phi).unwrap();
            let c = nonlinear_flux_commutator(&theta, &phi).unwrap();
            assert!((d + c).abs() <= 1e-9 * (d.abs() + c.abs() + 1e-30), "{d} vs {c}");
        }
    }
}

#[test]
fn mollifier_commutator_identity() {
    let g = torus(64);
    let f = random_field(g, 6, 1.0, 3).inverse_transform().unwrap();
    let h = random_field(g, 6, 1.0, 4).inverse_transform().unwrap();
    let gamma = Mollifier::new(8.0 * g.dx()).unwrap();
    let check = mollifier_commutator_check(&f, &h, &gamma).unwrap();
    assert!(check.max_deviation <= 1e-8, "{}", check.max_deviation);
    assert!(check.direct.max_abs() > 1e-3);
    let one = PhysField2D::from_fn(g, |_, _| 2.0);
    let c1 = mollifier_commutator_check(&one, &h, &gamma).unwrap();
    assert!(c1.direct.max_abs() < 1e-12 && c1.double.max_abs() < 1e-12);
    let c2 = mollifier_commutator_check(&f, &one, &gamma).unwrap();
    assert!(c2.direct.max_abs() < 1e-12 && c2.double.max_abs() < 1e-12);
}

#[test]
fn band_examples() {
    let g = torus(32);
    let u = PhysField2D::from_fn(g, |x1, _| (4.0 * x1).cos()).forward_transform().unwrap();
    for b in DyadicBand::all(&g) {
        let e = lp_project(&u, b).l2_norm();
        if b.j == 2 {
            assert!((e - u.l2_norm()).abs() < 1e-14);
        } else {
            assert!(e < 1e-14);
        }
    }
    assert_eq!(besov_norm(&SpectralField2D::zeros(g), 0.5, 3.0), 0.0);
    let a = u.to_phys_lp3();
    assert!((besov_norm(&u, 0.7, 3.0) - 2f64.powf(1.4) * a).abs() < 1e-12);
}

trait Lp3 {
    fn to_phys_lp3(&self) -> f64;
}

impl Lp3 for SpectralField2D {
    fn to_phys_lp3(&self) -> f64 {
        self.inverse_transform().unwrap().lp_norm(3.0)
    }
}

fn shift(f: &PhysField2D, s: usize) -> PhysField2D {
    let n = f.grid().n();
    let vals = (0..n * n).map(|idx| f.values()[((idx / n + n - s) % n) * n + idx % n]).collect();
    PhysField2D::from_values(*f.grid(), vals).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[test]
fn translation_modulus_and_mollified_gradient_rates() {
    let g = torus(512);
    for &alpha in &[0.4, 0.6, 0.8] {
        let mut c_trans: f64 = 0.0;
        let mut c_grad: f64 = 0.0;
        for seed in 0..2u64 {
            let u = lacunary(g, alpha, seed);
            let b = besov_norm(&u, alpha, 3.0);
            let up = u.inverse_transform().unwrap();
            let ys = [2usize, 4, 8, 16];
            let tm: Vec<f64> = ys
                .iter()
                .map(|&s| {
                    let mut d = shift(&up, s);
                    d.values_mut().iter_mut().zip(up.values()).for_each(|(a, b)| *a -= b);
                    d.lp_norm(3.0)
                })
                .collect();
            let yv: Vec<f64> = ys.iter().map(|&s| s as f64 * g.dx()).collect();
            let st = slope(&yv, &tm);
            assert!((st - alpha).abs() <= 0.1, "alpha {alpha}: translation slope {st}");
            let eps = [4.0, 8.0, 16.0].map(|w| w * g.dx());
            let gm: Vec<f64> = eps.iter().map(|&e| mollified_gradient_l3(&u, e)).collect();
            let sg = slope(&eps, &gm);
            assert!((sg - (alpha - 1.0)).abs() <= 0.1, "alpha {alpha}: gradient slope {sg}");
            for (y, t) in yv.iter().zip(&tm) {
                c_trans = c_trans.max(t / (y.powf(alpha) * b));
            }
            for (e, m) in eps.iter().zip(&gm) {
                c_grad = c_grad.max(m / (e.powf(alpha - 1.0) * b));
            }
        }
        assert!(c_trans.is_finite() && c_grad.is_finite());
    }
}

fn lacunary(g: TorusGrid, alpha: f64, seed: u64) -> SpectralField2D {
    let mut u = SpectralField2D::zeros(g);
    let n = g.n();
    for j in 0..8u32 {
        let m = 1usize << j;
        let phase = 2.0 * PI * (((seed * 7919 + j as u64 * 104729) % 1000) as f64 / 1000.0);
        let c = Complex64::from_polar(0.5 * 2f64.powf(-(j as f64) * alpha), phase);
        u.coeffs_mut()[m * n] = c;
        u.coeffs_mut()[(n - m) * n] = c.conj();
    }
    u
}

fn mollified_gradient_l3(u: &SpectralField2D, eps: f64) -> f64 {
    let s = Mollifier::new(eps).unwrap().smooth(u).unwrap();
    let a = s.derivative(0).inverse_transform().unwrap();
    let b = s.derivative(1).inverse_transform().unwrap();
    let m: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x.hypot(*y)).collect();
    PhysField2D::from_values(*u.grid(), m).unwrap().lp_norm(3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bands_partition_the_field(seed in any::<u64>()) {
        let g = torus(32);
        let u = PhysField2D::from_fn(g, |x1, x2| (x1 * 3.0).sin() + (seed % 5) as f64 + x2.cos())
            .forward_transform()
            .unwrap();
        let mut u = u;
        u.axpy(1.0, &random_field(g, 15, 0.0, seed));
        let mut sum = SpectralField2D::zeros(g);
        let mut energy = 0.0;
        for b in DyadicBand::all(&g) {
            let p = lp_project(&u, b);
            energy += p.inner(&p);
            sum.axpy(1.0, &p);
        }
        let mut centered = u.clone();
        centered.zero_mean();
        prop_assert!(sum.sub(&centered).l2_norm() <= 1e-12 * centered.l2_norm());
        prop_assert!((energy - centered.inner(&centered)).abs() <= 1e-12 * energy);
    }

    #[test]
    fn besov_scaling_and_translation_invariance(seed in any::<u64>(), lambda in 0.1f64..10.0, s in 0usize..32) {
        let g = torus(32);
        let u = random_field(g, 12, 0.5, seed);
        let b = besov_norm(&u, 0.6, 3.0);
        prop_assert!((besov_norm(&u.scaled(lambda), 0.6, 3.0) - lambda * b).abs() <= 1e-12 * lambda * b);
        let shifted = shift(&u.inverse_transform().unwrap(), s).forward_transform().unwrap();
        prop_assert!((besov_norm(&shifted, 0.6, 3.0) - b).abs() <= 1e-12 * b);
    }
}
