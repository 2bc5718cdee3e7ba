use chaoscs::dynamics::{extract_scalar, integrate, Coordinate, IntegratorConfig, State3, SystemKind};
use chaoscs::ensembles::sample_stats;

fn endpoint(kind: SystemKind, start: State3, horizon: f64, step: f64) -> State3 {
    let config = IntegratorConfig {
        step,
        burn_in: horizon,
        initial_state: start,
        tau: step,
    };
    integrate(&kind.with_default_params(), &config, 1).unwrap().samples()[0].1
}

#[test]
fn chua_attractor_is_bounded() {
    let kind = SystemKind::Chua;
    let traj = integrate(&kind.with_default_params(), &IntegratorConfig::for_system(kind), 10_000).unwrap();
    let x1 = extract_scalar(&traj, Coordinate::X1);
    assert_eq!(x1.len(), 10_000);
    assert!(x1.values().iter().all(|v| v.abs() < 10.0));
    let (_, var) = sample_stats(x1.values()).unwrap();
    assert!(var > 0.0);
}

#[test]
fn lorenz_x3_mean_is_positive() {
    let kind = SystemKind::Lorenz;
    let traj = integrate(&kind.with_default_params(), &IntegratorConfig::for_system(kind), 10_000).unwrap();
    let x3 = extract_scalar(&traj, Coordinate::X3);
    let (mean, _) = sample_stats(x3.values()).unwrap();
    assert!(mean > 0.0, "mean x3 = {mean}");
}

#[test]
fn rk4_is_fourth_order_on_lorenz() {
    let start = State3::new(1.0, 1.0, 1.0);
    let reference = endpoint(SystemKind::Lorenz, start, 1.0, 1e-6);
    let coarse = endpoint(SystemKind::Lorenz, start, 1.0, 1e-3).max_abs_diff(&reference);
    let fine = endpoint(SystemKind::Lorenz, start, 1.0, 5e-4).max_abs_diff(&reference);
    let ratio = coarse / fine;
    assert!((12.0..=20.0).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn every_system_integrates_from_defaults() {
    for kind in SystemKind::ALL {
        let traj = integrate(&kind.with_default_params(), &IntegratorConfig::for_system(kind), 2_000).unwrap();
        assert!(traj.states().all(|s| s.is_finite()));
    }
}
