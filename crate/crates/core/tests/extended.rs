use std::io::Write;

use proptest::prelude::*;
use ves_core::extended::{
    extended_derivatives, extended_rte_vs_n, initial_state, run_extended_rte, ExtendedConfig,
    ExtendedState, RecoveryPolicy, Weather, WeatherSample, WeatherSeries,
};
use ves_core::ode::rk4_step;
use ves_core::{
    rte_vs_n, ChargeDischargeFlows, Phase, Plant, ScheduleSpec, Temperature, VesCoefficients,
};

fn reduced() -> (Plant, ExtendedConfig, Weather, ChargeDischargeFlows) {
    let plant = Plant::reference();
    let cfg = ExtendedConfig::reduced(&plant);
    let weather = Weather::constant(plant.ambient.t_oa, 0.0);
    let flows =
        ChargeDischargeFlows::new(&VesCoefficients::new(&plant), 0.2 * plant.baseline.p_hvac_b)
            .unwrap();
    (plant, cfg, weather, flows)
}

fn max_relative_gap(
    cfg: &ExtendedConfig,
    weather: &Weather,
    flows: &ChargeDischargeFlows,
    ns: &[u32],
) -> f64 {
    let mut worst: f64 = 0.0;
    for phase in [Phase::UpDown, Phase::DownUp] {
        for t_p in [600.0, 1800.0] {
            let spec = ScheduleSpec::new(flows.delta_p, t_p, 1, phase).unwrap();
            let ext = extended_rte_vs_n(&spec, ns, weather, cfg).unwrap();
            let exact = rte_vs_n(&spec, ns, flows).unwrap();
            for ((_, e), (_, x)) in ext.iter().zip(&exact) {
                worst = worst.max((e.eta_rt - x.eta_rt).abs() / x.eta_rt);
            }
        }
    }
    worst
}

#[test]
fn reduced_model_matches_closed_form_efficiency() {
    let (_, mut cfg, weather, flows) = reduced();
    cfg.recovery = RecoveryPolicy::SquareWave;
    let ns: Vec<u32> = (1..=20).collect();
    let gap = max_relative_gap(&cfg, &weather, &flows, &ns);
    assert!(gap < 0.02, "{gap}");
}

#[test]
fn controller_recovery_converges_to_closed_form() {
    // Set-point recovery differs from recovery at the schedule amplitude
    // for short runs; the difference fades as n grows.
    let (_, cfg, weather, flows) = reduced();
    let ns: Vec<u32> = (10..=20).collect();
    let gap = max_relative_gap(&cfg, &weather, &flows, &ns);
    assert!(gap < 0.02, "{gap}");
}

#[test]
fn reduced_model_respects_temperature_bound() {
    let (_, cfg, weather, flows) = reduced();
    let bound = flows.temperature_bound();
    for phase in [Phase::UpDown, Phase::DownUp] {
        for (t_p, n) in [(600.0, 12), (1800.0, 6), (7200.0, 2)] {
            let spec = ScheduleSpec::new(flows.delta_p, t_p, n, phase).unwrap();
            let run = run_extended_rte(&spec, &weather, &cfg).unwrap();
            let worst = run
                .trace
                .samples
                .iter()
                .filter(|s| s.t <= spec.duration())
                .map(|s| s.t_tilde.abs())
                .fold(0.0, f64::max);
            assert!(
                worst <= bound + 1e-6,
                "{phase:?} t_p={t_p}: {worst} > {bound}"
            );
        }
    }
}

#[test]
fn energy_bookkeeping_under_diurnal_weather() {
    let cfg = ExtendedConfig::from_plant(&Plant::reference());
    let weather = Weather::synthetic_diurnal();
    for phase in [Phase::UpDown, Phase::DownUp] {
        let spec = ScheduleSpec::new(4500.0, 1800.0, 4, phase).unwrap();
        let r = run_extended_rte(&spec, &weather, &cfg).unwrap().result;
        assert!(r.energy_charged >= 0.0 && r.energy_discharged >= 0.0);
        assert!((r.eta_rt - r.eta_from_energy()).abs() <= 1e-12 * r.eta_rt);
    }
}

#[test]
fn weather_file_drives_the_model() {
    let mut path = std::env::temp_dir();
    path.push(format!("ves-weather-{}.csv", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "time_s,t_oa_f,w_oa").unwrap();
    for h in 0..=24 {
        let t_f = 80.0 + 10.0 * (std::f64::consts::TAU * (h as f64 - 15.0) / 24.0).cos();
        writeln!(f, "{},{t_f},0.010", h * 3600).unwrap();
    }
    drop(f);
    let series = WeatherSeries::from_csv_path(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(series.len(), 25);
    let weather = Weather::Series(series);
    let cfg = ExtendedConfig::from_plant(&Plant::reference());
    let spec = ScheduleSpec::new(4500.0, 1800.0, 2, Phase::DownUp).unwrap();
    let r = run_extended_rte(&spec, &weather, &cfg).unwrap().result;
    assert!(r.eta_rt.is_finite() && r.eta_rt > 0.0);
}

#[test]
fn missing_weather_file_is_reported() {
    assert!(
        WeatherSeries::from_csv_path(std::path::Path::new("/nonexistent/weather.csv")).is_err()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn humidity_stays_nonnegative(
        w_sa in 0.0f64..0.012,
        omega_x in 0.0f64..2e-3,
        w0 in 0.0f64..0.02,
        w_oa in 0.0f64..0.02,
        m in 0.0f64..4.5,
        t_oa_f in 60.0f64..105.0,
    ) {
        let mut cfg = ExtendedConfig::from_plant(&Plant::reference());
        cfg.w_sa = w_sa;
        cfg.omega_x = omega_x;
        let wx = WeatherSample { t_oa: Temperature::from_fahrenheit(t_oa_f).unwrap().kelvin(), w_oa };
        let (s, _) = initial_state(&cfg, &Weather::Constant(wx));
        let f = |_: f64, y: &[f64; 3]| {
            let s = ExtendedState { t_zone: y[0], t_wall: y[1], w_zone: y[2] };
            extended_derivatives(&s, m, &wx, &cfg)
        };
        let mut y = [s.t_zone, s.t_wall, w0];
        for k in 0..1440 {
            y = rk4_step(f, k as f64 * cfg.dt, &y, cfg.dt);
            prop_assert!(y[2] >= 0.0, "W = {} after {} steps", y[2], k + 1);
        }
    }
}
