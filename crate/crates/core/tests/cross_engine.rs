//! The engines checked against each other on random models.

use num_complex::Complex;
use proptest::prelude::*;
use spinbath_core::closed_form::{BesselIntegrals, CharacteristicFunctionSpec, IntegralSettings};
use spinbath_core::configsum::ConfigSumEngine;
use spinbath_core::model::{InverseTemperature, SpinState};
use spinbath_core::oracle::{partial_trace_bath, thermal_bath_state, HilbertOracle, initial_full_state};
use spinbath_core::trajectory::uniform_grid;
use spinbath_core::{Mode, Model};

fn model_strategy(max_modes: usize) -> impl Strategy<Value = Model> {
    (
        -2.0..2.0f64,
        prop::sample::select(vec![0.0, 0.5, 2.0]),
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=max_modes),
    )
        .prop_map(|(delta, beta, modes)| {
            let modes = modes.into_iter().map(|(w, g)| Mode::new(w, g)).collect();
            Model::new(delta, InverseTemperature::Finite(beta), modes).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn configsum_reproduces_full_evolution(model in model_strategy(5), theta in 0.0..3.2f64, phi in -3.2..3.2f64) {
        let model = model.with_initial_state(SpinState { theta, phi }).unwrap();
        let times = uniform_grid(8.0, 12);
        let oracle = HilbertOracle::new(&model).unwrap().time_series(&model, &times, 0).unwrap();
        let sum = ConfigSumEngine::new(&model).unwrap().time_series(&times, 0).unwrap();
        for (a, b) in oracle.points.iter().zip(&sum.points) {
            prop_assert!(a.state.max_abs_diff(&b.state) <= 1e-10);
        }
    }

    #[test]
    fn bath_state_never_changes(model in model_strategy(4), t in 0.0..10.0f64) {
        let oracle = HilbertOracle::new(&model).unwrap();
        let rho = oracle.evolve(&initial_full_state(&model).unwrap(), t).unwrap();
        let diff = partial_trace_bath(&rho) - thermal_bath_state(&model);
        prop_assert!(diff.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-12);
    }
}

#[test]
fn integral_engine_reproduces_configsum() {
    let cases = [
        (0.7, 0.0, vec![(1.0, 0.4), (-0.5, 0.9), (2.0, -0.3)]),
        (-1.3, 0.5, vec![(0.2, 1.1), (1.5, 0.6), (-1.0, -0.8), (0.4, 0.2), (1.9, -1.4)]),
        (1.0, 2.0, vec![(0.3, 0.5); 7]),
    ];
    let times = uniform_grid(10.0, 19);
    for (delta, beta, modes) in cases {
        let modes = modes.into_iter().map(|(w, g)| Mode::new(w, g)).collect();
        let model = Model::new(delta, InverseTemperature::Finite(beta), modes).unwrap();
        let exact = ConfigSumEngine::new(&model).unwrap().time_series(&times, 0).unwrap();
        let spec = CharacteristicFunctionSpec::ExactProduct(model.clone());
        let run = BesselIntegrals::new(&spec, delta, 20.0, IntegralSettings::default())
            .unwrap()
            .trajectory(&times, String::new())
            .unwrap();
        for ((a, b), printed) in exact.points.iter().zip(&run.trajectory.points).zip(&run.printed) {
            assert!((a.sz - b.sz).abs() <= 1e-6, "sz at t = {}", a.t);
            assert!((a.rho10 - b.rho10).norm() <= 1e-6, "rho10 at t = {}", a.t);
            // the printed convention doubles only the real part
            assert!((printed - Complex::new(2.0 * b.rho10.re, b.rho10.im)).norm() <= 1e-12);
        }
    }
}

#[test]
fn stationary_value_flips_with_initial_state() {
    let modes = (0..8).map(|k| Mode::new(1.0, 0.3 + 0.05 * k as f64)).collect();
    let up = Model::new(0.9, InverseTemperature::Finite(0.7), modes).unwrap();
    let down = up.clone().with_initial_state(SpinState::ground()).unwrap();
    let (a, _) = ConfigSumEngine::new(&up).unwrap().stationary_time_average(100.0, 300.0, 10_000).unwrap();
    let (b, _) = ConfigSumEngine::new(&down).unwrap().stationary_time_average(100.0, 300.0, 10_000).unwrap();
    assert!(a > 0.1);
    assert!((a + b).abs() < 1e-12, "{a} vs {b}");
}
