use electroconvection::dynamics::{GalerkinSystem, RunSettings, SimState, Toggles};
use electroconvection::eigensolver::lowest_eigenpairs;
use electroconvection::measure::random_coeffs;
use electroconvection::mesh::{assemble_laplacian, MeshSpec};
use electroconvection::stokes::stokes_basis;
use electroconvection::Error;

fn system(n: usize, m: usize, nq: usize, toggles: Toggles) -> GalerkinSystem {
    let mesh = MeshSpec::unit_square(n).build().unwrap();
    let sb = stokes_basis(&mesh, m).unwrap();
    let cb = lowest_eigenpairs(&assemble_laplacian(&mesh), nq).unwrap();
    GalerkinSystem::new(mesh, sb, cb, toggles).unwrap()
}

fn distance(x: &SimState, y: &SimState) -> f64 {
    x.a.iter()
        .chain(&x.b)
        .zip(y.a.iter().chain(&y.b))
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn richardson_order_is_two() {
    let sys = system(16, 8, 8, Toggles::default());
    let s0 = SimState {
        t: 0.0,
        a: random_coeffs(21, 0, 8, 8),
        b: random_coeffs(21, 1, 8, 8).iter().map(|v| v * 5.0).collect(),
    };
    let finals: Vec<SimState> = [8e-3, 4e-3, 2e-3]
        .iter()
        .map(|&dt| {
            sys.run(&s0, &RunSettings::new(dt, 0.24))
                .unwrap()
                .final_state
        })
        .collect();
    let ratio = distance(&finals[0], &finals[1]) / distance(&finals[1], &finals[2]);
    let order = ratio.log2();
    assert!((1.8..=2.2).contains(&order), "order {order}");
}

#[test]
fn single_velocity_mode_decays_exactly() {
    // B(w₁, w₁) has no component along w₁, so one mode is linear
    let sys = system(16, 1, 4, Toggles::default());
    let s0 = SimState {
        t: 0.0,
        a: vec![1.0],
        b: vec![0.0; 4],
    };
    let tr = sys.run(&s0, &RunSettings::new(0.005, 0.5)).unwrap();
    let want = (-0.5 * sys.stokes().values()[0]).exp();
    assert!((tr.final_state.a[0] - want).abs() <= 1e-12 * want);
    assert!(tr.final_state.b.iter().all(|&v| v == 0.0));
}

#[test]
fn zero_data_stays_zero() {
    let sys = system(12, 4, 4, Toggles::default());
    let tr = sys
        .run(&SimState::zeros(4, 4), &RunSettings::new(0.05, 0.5))
        .unwrap();
    assert_eq!(tr.records.len(), 11);
    for r in &tr.records {
        assert!(r.values()[1..].iter().all(|&v| v == 0.0), "{r:?}");
    }
}

#[test]
fn grid_sup_norm_matches_the_eigenfunction_peak() {
    // discrete orthogonality makes the normalized φ₁ exactly
    // 2 sin(πx) sin(πy) at the nodes, with its peak on the centre node
    for n in [32, 64] {
        let sys = system(n, 2, 3, Toggles::default());
        let mut s = SimState::zeros(2, 3);
        s.b[0] = 1.0;
        let rec = sys.diagnostics(&s, &Default::default());
        assert!((rec.q_linf - 2.0).abs() < 1e-10, "{}", rec.q_linf);
        assert!((rec.q_l2 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn charge_drives_the_fluid_and_loses_l2() {
    let sys = system(16, 6, 6, Toggles::default());
    let s0 = SimState {
        t: 0.0,
        a: vec![0.0; 6],
        b: random_coeffs(4, 0, 6, 6).iter().map(|v| v * 20.0).collect(),
    };
    let tr = sys.run(&s0, &RunSettings::new(2e-3, 0.2)).unwrap();
    assert!(tr.records.iter().any(|r| r.u_h > 0.0));
    let l2: Vec<f64> = tr.records.iter().map(|r| r.q_l2).collect();
    assert!(l2.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
}

#[test]
fn oversized_step_is_rejected() {
    let sys = system(16, 4, 4, Toggles::default());
    let s0 = SimState {
        t: 0.0,
        a: vec![50.0, 0.0, 0.0, 0.0],
        b: vec![0.0; 4],
    };
    let err = sys.run(&s0, &RunSettings::new(0.05, 0.5)).unwrap_err();
    assert!(matches!(err, Error::Cfl { .. }), "{err}");
}

#[test]
fn snapshots_land_on_requested_times() {
    let sys = system(12, 4, 4, Toggles::default());
    let mut settings = RunSettings::new(0.01, 0.1);
    settings.snapshot_times = vec![0.0, 0.05];
    let s0 = SimState {
        t: 0.0,
        a: vec![0.1; 4],
        b: vec![1.0; 4],
    };
    let tr = sys.run(&s0, &settings).unwrap();
    let times: Vec<f64> = tr.snapshots.iter().map(|s| s.time).collect();
    assert_eq!(tr.snapshots.len(), 4, "{times:?}");
    assert!(times
        .iter()
        .all(|t| (t - 0.0).abs() < 1e-12 || (t - 0.05).abs() < 1e-12));
}
