use std::f64::consts::PI;

use qg_halfspace::dynamics::*;
use qg_halfspace::harmonic::riesz_perp;
use qg_halfspace::spectral::*;
use qg_halfspace::Error;

fn torus(n: usize) -> TorusGrid {
    TorusGrid::new(n, 2.0 * PI).unwrap()
}

fn slab(n: usize, nz: usize) -> SlabGrid {
    SlabGrid::new(torus(n), nz, PI).unwrap()
}

fn field(g: TorusGrid, f: impl Fn(f64, f64) -> f64) -> SpectralField2D {
    PhysField2D::from_fn(g, f).forward_transform().unwrap()
}

fn sup(a: &SpectralField2D) -> f64 {
    // Differences of nearly equal fields are pure rounding noise, which is
    // not Hermitian to relative precision.
    let mut a = a.clone();
    a.hermitian_project();
    a.inverse_transform().unwrap().max_abs()
}

fn max_diff(a: &SpectralField2D, b: &SpectralField2D) -> f64 {
    sup(&a.sub(b))
}

#[test]
fn velocity_of_single_mode() {
    let s = slab(32, 17);
    let g = *s.torus();
    let state = SimState::surface_only(0.0, field(g, |x1, _| x1.cos()), s).unwrap();
    let v = velocity_from_state(&state).unwrap();
    let sin = field(g, |x1, _| x1.sin());
    assert!(sup(&v.surface[0]) < 1e-14);
    assert!(max_diff(&v.surface[1], &sin) < 1e-14);
    for (i, u) in v.layers.iter().enumerate() {
        let want = sin.scaled((-s.z(i)).exp());
        assert!(sup(&u[0]) < 1e-14);
        assert!(max_diff(&u[1], &want) < 1e-14);
    }
}

#[test]
fn zero_state_has_zero_velocity_and_tendency() {
    let s = slab(16, 17);
    let state = SimState::new(0.0, SpectralField2D::zeros(*s.torus()), LayeredField3D::zeros(s)).unwrap();
    let v = velocity_from_state(&state).unwrap();
    assert_eq!(v.max_speed([0.0, 0.0]), 0.0);
    let (a, b) = rhs(&state, &ForcingSpec::zero(), &StepParams::default()).unwrap();
    assert!(a.is_zero() && b.is_zero());
}

#[test]
fn surface_velocity_is_rotated_riesz_without_interior() {
    let s = slab(64, 17);
    let theta = random_field(*s.torus(), 10, 1.0, 5);
    let state = SimState::surface_only(0.0, theta.clone(), s).unwrap();
    let v = velocity_from_state(&state).unwrap();
    let r = riesz_perp(&theta).unwrap();
    assert!(max_diff(&v.surface[0], &r[1]) < 1e-10);
    assert!(max_diff(&v.surface[1], &r[2]) < 1e-10);
}

#[test]
fn sweep_tendency_is_uniform_transport() {
    let s = slab(32, 17);
    let g = *s.torus();
    // theta depends on x1 only, so its own velocity is parallel to the level sets.
    let theta = field(g, |x1, _| (2.0 * x1).sin());
    let state = SimState::surface_only(0.0, theta.clone(), s).unwrap();
    let p = StepParams { sweep: [0.7, -0.3], ..StepParams::default() };
    let (dt, _) = rhs(&state, &ForcingSpec::zero(), &p).unwrap();
    let want = field(g, |x1, _| -0.7 * 2.0 * (2.0 * x1).cos());
    assert!(max_diff(&dt, &want) < 1e-12);
}

#[test]
fn interior_bump_leaves_quiet_surface_unforced() {
    let s = slab(32, 33);
    let omega = LayeredField3D::from_fn(s, |z, x1, x2| {
        let r2 = (x1 - PI).powi(2) + (x2 - PI).powi(2) + (z - 1.5).powi(2);
        (-4.0 * r2).exp() * (x1 - PI)
    })
    .unwrap();
    let state = SimState::new(0.0, SpectralField2D::zeros(*s.torus()), omega).unwrap();
    let (dth, dom) = rhs(&state, &ForcingSpec::zero(), &StepParams::default()).unwrap();
    assert!(dth.is_zero());
    assert!(!dom.is_zero());
}

#[test]
fn integrating_factor_is_exact_for_dissipation() {
    let s = slab(32, 17);
    let g = *s.torus();
    // The self-induced velocity sin(x1) is parallel to the level sets, so only
    // the dissipation acts; the step size is not limited by accuracy.
    let state = SimState::surface_only(0.0, field(g, |x1, _| x1.cos()), s).unwrap();
    let p = StepParams { dt: 0.1, eps_diss: 1.0, cfl: 10.0, ..StepParams::default() };
    let next = step_rk4(&state, &p, &ForcingSpec::zero()).unwrap();
    let want = field(g, |x1, _| (-0.1f64).exp() * x1.cos());
    assert!(max_diff(next.theta(), &want) < 1e-14);
    assert!((next.t() - 0.1).abs() < 1e-15);
}

fn manufactured_error(steps: usize) -> f64 {
    let u = 1.0;
    let s = slab(32, 17);
    let g = *s.torus();
    let exact = move |t: f64| field(g, move |x1, _| (x1 - u * t).cos() + t.sin() * (2.0 * x1).cos());
    let forcing = ForcingSpec::zero()
        .with_surface(move |t| field(g, move |x1, _| t.cos() * (2.0 * x1).cos() - 2.0 * u * t.sin() * (2.0 * x1).sin()));
    let t_end = 1.0;
    let p = StepParams { dt: t_end / steps as f64, cfl: 10.0, dt_cap: 1.0, sweep: [u, 0.0], ..StepParams::default() };
    let mut state = SimState::surface_only(0.0, exact(0.0), s).unwrap();
    for _ in 0..steps {
        state = step_rk4(&state, &p, &forcing).unwrap();
    }
    max_diff(state.theta(), &exact(t_end))
}

#[test]
fn manufactured_forced_advection_is_fourth_order() {
    let e: Vec<f64> = [4, 8, 16].iter().map(|&n| manufactured_error(n)).collect();
    for w in e.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!(slope >= 3.8, "errors {e:?}");
    }
}

#[test]
fn l2_is_conserved_per_step_without_dissipation() {
    let s = slab(64, 17);
    let theta = random_field(*s.torus(), 6, 1.0, 11);
    let mut state = SimState::surface_only(0.0, theta, s).unwrap();
    let mut p = StepParams::default();
    p.dt = 0.5 * cfl_dt(&state, &p).unwrap();
    for _ in 0..5 {
        let next = step_rk4(&state, &p, &ForcingSpec::zero()).unwrap();
        let (a, b) = (state.theta().l2_norm(), next.theta().l2_norm());
        assert!((a - b).abs() <= 1e-10 * a, "{a} {b}");
        state = next;
    }
}

#[test]
fn cfl_examples() {
    let s = slab(32, 17);
    let g = *s.torus();
    let p = StepParams { dt_cap: 0.05, ..StepParams::default() };
    let zero = SimState::surface_only(0.0, SpectralField2D::zeros(g), s).unwrap();
    assert_eq!(cfl_dt(&zero, &p).unwrap(), 0.05);
    let p = StepParams { dt_cap: 1.0, ..StepParams::default() };
    let one = SimState::surface_only(0.0, field(g, |x1, _| x1.cos()), s).unwrap();
    let dt1 = cfl_dt(&one, &p).unwrap();
    assert!((dt1 - p.cfl * g.dx()).abs() < 1e-14);
    let two = SimState::surface_only(0.0, field(g, |x1, _| 2.0 * x1.cos()), s).unwrap();
    assert!((cfl_dt(&two, &p).unwrap() - 0.5 * dt1).abs() < 1e-14);
    let big = StepParams { dt: 2.0 * dt1, dt_cap: 1.0, ..StepParams::default() };
    match step_rk4(&one, &big, &ForcingSpec::zero()) {
        Err(Error::Cfl { recommended, .. }) => assert!((recommended - dt1).abs() < 1e-14),
        other => panic!("expected a CFL rejection, got {other:?}"),
    }
}

#[test]
fn forcing_potential_examples() {
    let s = slab(16, 17);
    let g = *s.torus();
    let theta = field(g, |x1, _| x1.cos());
    let state = SimState::surface_only(0.0, theta, s).unwrap();
    let p = StepParams::default();
    assert!(solve_forcing_potential(&state, &ForcingSpec::zero(), &p).unwrap().is_zero());

    let f = ForcingSpec::zero().with_surface(move |_| field(g, |x1, _| x1.cos()));
    let pot = solve_forcing_potential(&state, &f, &p).unwrap();
    let diss = StepParams { eps_diss: 0.3, ..p };
    let pot_d = solve_forcing_potential(&state, &ForcingSpec::zero(), &diss).unwrap();
    for i in 0..s.nz() {
        let e = (-s.z(i)).exp();
        let want = field(g, |x1, _| e * x1.cos());
        assert!(max_diff(pot.layer(i), &want) < 1e-13);
        assert!(max_diff(pot_d.layer(i), &want.scaled(-0.3)) < 1e-13);
    }
}

#[test]
fn surface_only_run_keeps_interior_zero() {
    let s = slab(32, 17);
    let theta = random_field(*s.torus(), 4, 1.0, 3);
    let setup = RunSetup {
        initial: SimState::surface_only(0.0, theta, s).unwrap(),
        params: StepParams::default(),
        forcing: ForcingSpec::zero(),
        t_end: 0.5,
        auto_dt: true,
        snapshot_every: 2,
        diag_every: 1,
        diagnostics: Default::default(),
        blowup_factor: 1e3,
    };
    let traj = run(&setup).unwrap();
    assert!(traj.halted.is_none());
    assert!(traj.snapshots.len() >= 2);
    assert!(traj.snapshots.iter().all(|s| s.omega().is_zero()));
    assert!((traj.snapshots.last().unwrap().t() - 0.5).abs() < 1e-12);
    assert_eq!(traj.records.len(), 2 * (traj.snapshots.len() - 1) + 1);
    traj.cadence().unwrap();
}

#[test]
fn zero_length_run_is_one_snapshot() {
    let s = slab(16, 17);
    let setup = RunSetup {
        initial: SimState::surface_only(0.0, random_field(*s.torus(), 3, 1.0, 1), s).unwrap(),
        params: StepParams::default(),
        forcing: ForcingSpec::zero(),
        t_end: 0.0,
        auto_dt: false,
        snapshot_every: 1,
        diag_every: 1,
        diagnostics: Default::default(),
        blowup_factor: 1e3,
    };
    let traj = run(&setup).unwrap();
    assert_eq!(traj.snapshots.len(), 1);
    assert_eq!(traj.records.len(), 1);
    assert_eq!(traj.snapshots[0], setup.initial.dealiased());
}

#[test]
fn interior_lq_norms_drift_slowly_without_forcing() {
    let s = slab(128, 17);
    let g = *s.torus();
    let omega = LayeredField3D::from_layers(
        s,
        (0..s.nz()).map(|i| random_field(g, 3, 1.0, 100 + i as u64).scaled(0.5)).collect(),
    )
    .unwrap();
    let theta = random_field(g, 3, 1.0, 7);
    let mut state = SimState::new(0.0, theta, omega).unwrap();
    let mut p = StepParams::default();
    p.dt = 0.5 * cfl_dt(&state, &p).unwrap();
    let q0: Vec<f64> = [2.0, 3.0].iter().map(|&q| state.omega().lq_norm(q)).collect();
    let steps = 10;
    for _ in 0..steps {
        state = step_rk4(&state, &p, &ForcingSpec::zero()).unwrap();
    }
    let elapsed = steps as f64 * p.dt;
    for (k, q) in [2.0, 3.0].iter().enumerate() {
        let drift = (state.omega().lq_norm(*q) - q0[k]).abs() / q0[k] / elapsed;
        assert!(drift <= 1e-6, "q = {q}: drift {drift:e}");
    }
}

#[test]
fn blowup_guard_halts_with_flag() {
    let s = slab(32, 17);
    let theta = random_field(*s.torus(), 4, 1.0, 9).scaled(5.0);
    let setup = RunSetup {
        initial: SimState::surface_only(0.0, theta, s).unwrap(),
        params: StepParams { dt: 1e-3, ..StepParams::default() },
        forcing: ForcingSpec::zero(),
        t_end: 0.01,
        auto_dt: false,
        snapshot_every: 1,
        diag_every: 1,
        diagnostics: Default::default(),
        blowup_factor: 1e-3,
    };
    let traj = run(&setup).unwrap();
    assert!(traj.halted.is_some());
    assert_eq!(traj.snapshots.len(), 1);
}

#[test]
fn state_rejects_mean_and_mismatch() {
    let s = slab(16, 17);
    let mut theta = random_field(*s.torus(), 3, 1.0, 1);
    theta.coeffs_mut()[0].re = 1.0;
    assert!(SimState::surface_only(0.0, theta, s).is_err());
    let other = slab(32, 17);
    assert!(SimState::new(0.0, SpectralField2D::zeros(*s.torus()), LayeredField3D::zeros(other)).is_err());
}
