//! Acceptance criteria, one line per criterion. Exits nonzero if any fail.

use std::time::{Duration, Instant};

use ves_core::analytic::Mode;
use ves_core::extended::{extended_rte_vs_n, ExtendedConfig, Weather};
use ves_core::ode::rk4_step;
use ves_core::rte::{rte_vs_n_numeric, rte_vs_tp_numeric, NumericOptions};
use ves_core::verify::{run_claim, VerifyOptions};
use ves_core::{
    critical_half_period, recovery_bound, rte_vs_n, ChargeDischargeFlows, Phase, Plant,
    ScheduleSpec, VesCoefficients,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn reference() -> (VesCoefficients, ChargeDischargeFlows) {
    let plant = Plant::reference();
    let v = VesCoefficients::new(&plant);
    let flows = ChargeDischargeFlows::new(&v, 0.2 * plant.baseline.p_hvac_b).unwrap();
    (v, flows)
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("runtime {elapsed:?} exceeds {limit:?}"))
    }
}

fn claims(names: &[&str], opts: &VerifyOptions) -> Result<Vec<String>, String> {
    let mut lines = Vec::new();
    for name in names {
        let o = run_claim(name, opts).ok_or(format!("no claim {name}"))?;
        if let Some((i, msg)) = &o.first_failure {
            return Err(format!(
                "{name}: {}/{} failed, trial {i}: {msg}",
                o.failures, o.trials
            ));
        }
        lines.push(format!("{name} {}/{}", o.trials, o.trials));
    }
    Ok(lines)
}

fn critical_half_period_reproduction() -> Outcome {
    let (_, flows) = reference();
    let start = Instant::now();
    let t_star = critical_half_period(&flows);
    within(Duration::from_millis(1), start.elapsed())?;
    let minutes = t_star / 60.0;
    if (minutes - 12.0).abs() <= 1.0 {
        Ok(format!("t_p* = {minutes:.3} min"))
    } else {
        Err(format!("t_p* = {minutes:.3} min, expected 12 ± 1"))
    }
}

fn single_cycle_criterion() -> Outcome {
    let start = Instant::now();
    let lines = claims(&["single-cycle-signs"], &VerifyOptions::default())?;
    within(Duration::from_secs(5), start.elapsed())?;
    Ok(lines.join(", "))
}

fn convergence_criterion() -> Outcome {
    let (_, flows) = reference();
    let start = Instant::now();
    let t_bar = recovery_bound(&flows).map_err(|e| e.to_string())?;
    let ns: Vec<u32> = (1..=200).collect();
    let mut last = Vec::new();
    for phase in [Phase::UpDown, Phase::DownUp] {
        let spec = ScheduleSpec::new(flows.delta_p, 1800.0, 1, phase).unwrap();
        let curve = rte_vs_n(&spec, &ns, &flows).map_err(|e| e.to_string())?;
        for (n, r) in &curve {
            let bound = t_bar / (*n as f64 * 1800.0);
            if (r.eta_rt - 1.0).abs() > bound {
                return Err(format!(
                    "{phase:?} n = {n}: |eta - 1| = {} > {bound}",
                    (r.eta_rt - 1.0).abs()
                ));
            }
        }
        let eta_200 = curve[199].1.eta_rt;
        if !(0.99..=1.01).contains(&eta_200) {
            return Err(format!("{phase:?} eta(200) = {eta_200}"));
        }
        last.push(eta_200);
    }
    within(Duration::from_secs(1), start.elapsed())?;
    Ok(format!(
        "eta(200) = {:.5} up/down, {:.5} down/up",
        last[0], last[1]
    ))
}

fn algebraic_criterion() -> Outcome {
    let start = Instant::now();
    let lines = claims(
        &[
            "flow-deviations",
            "alpha-dominance",
            "steady-states",
            "a-positive",
            "discriminant",
            "a-over-d",
            "baseline-root",
        ],
        &VerifyOptions::default(),
    )?;
    within(Duration::from_secs(10), start.elapsed())?;
    Ok(lines.join(", "))
}

fn temperature_bound_criterion() -> Outcome {
    let start = Instant::now();
    let lines = claims(&["temperature-bound"], &VerifyOptions::default())?;
    within(Duration::from_secs(10), start.elapsed())?;
    Ok(lines.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let (v, flows) = reference();
    let dt = 10.0;
    let mut worst: f64 = 0.0;
    for mode in [Mode::Charging, Mode::Discharging] {
        let m = flows.airflow(mode);
        let mut y = [0.0];
        for k in 0..8640 {
            y = rk4_step(
                |_, y: &[f64; 1]| [v.temperature_rate(y[0], m)],
                k as f64 * dt,
                &y,
                dt,
            );
            worst = worst.max((y[0] - flows.lti_step(0.0, (k + 1) as f64 * dt, mode)).abs());
        }
    }
    if worst >= 1e-7 {
        return Err(format!("RK4 vs closed-form step deviates by {worst} K"));
    }
    let ns: Vec<u32> = (1..=20).collect();
    let opts = NumericOptions {
        record_trace: false,
        ..NumericOptions::default()
    };
    let mut rel: f64 = 0.0;
    for phase in [Phase::UpDown, Phase::DownUp] {
        for t_p in [300.0, 1800.0] {
            let spec = ScheduleSpec::new(flows.delta_p, t_p, 1, phase).unwrap();
            let exact = rte_vs_n(&spec, &ns, &flows).map_err(|e| e.to_string())?;
            let num = rte_vs_n_numeric(&spec, &ns, &v, &opts).map_err(|e| e.to_string())?;
            for ((_, a), (_, b)) in exact.iter().zip(&num) {
                rel = rel.max((a.eta_rt - b.eta_rt).abs() / a.eta_rt);
            }
        }
    }
    if rel >= 1e-3 {
        return Err(format!("numeric efficiency deviates by {rel:.3e} relative"));
    }
    claims(
        &["lti-vs-rk4", "numeric-vs-closed"],
        &VerifyOptions::default(),
    )?;
    Ok(format!(
        "max |dT| = {worst:.2e} K, max eta deviation = {rel:.2e}"
    ))
}

fn half_outside_air_criterion() -> Outcome {
    let plant = Plant::reference()
        .with_r_oa(0.5)
        .map_err(|e| e.to_string())?;
    let v = VesCoefficients::new(&plant);
    let delta_p = 0.2 * plant.baseline.p_hvac_b;
    let grid: Vec<f64> = (1..=60).map(|m| m as f64 * 60.0).collect();
    let opts = NumericOptions {
        record_trace: false,
        ..NumericOptions::default()
    };
    let up =
        rte_vs_tp_numeric(&grid, delta_p, Phase::UpDown, &v, &opts).map_err(|e| e.to_string())?;
    if let Some(p) = up.iter().find(|p| p.result.eta_rt >= 1.0) {
        return Err(format!(
            "up/down eta = {} at t_p = {} s",
            p.result.eta_rt, p.x
        ));
    }
    let down =
        rte_vs_tp_numeric(&grid, delta_p, Phase::DownUp, &v, &opts).map_err(|e| e.to_string())?;
    let crossing = down
        .windows(2)
        .find(|w| (w[0].result.eta_rt - 1.0) * (w[1].result.eta_rt - 1.0) <= 0.0)
        .map(|w| (w[0].x, w[1].x));
    match crossing {
        Some((a, b)) if a >= 300.0 && b <= 1800.0 => Ok(format!(
            "down/up crosses eta = 1 between {} and {} min",
            a / 60.0,
            b / 60.0
        )),
        Some((a, b)) => Err(format!(
            "crossing between {a} and {b} s lies outside [5, 30] min"
        )),
        None => Err("down/up curve never crosses eta = 1".into()),
    }
}

/// Largest |eta - 1| over consecutive blocks of ten cycle counts.
fn block_maxima(curve: &[(u32, f64)]) -> Vec<f64> {
    curve
        .chunks(10)
        .map(|c| c.iter().map(|(_, e)| (e - 1.0).abs()).fold(0.0, f64::max))
        .collect()
}

fn extended_criterion() -> Outcome {
    let cfg = ExtendedConfig::from_plant(&Plant::reference());
    let weather = Weather::synthetic_diurnal();
    let ns: Vec<u32> = (1..=30).collect();
    let start = Instant::now();
    let mut summary = Vec::new();
    for phase in [Phase::UpDown, Phase::DownUp] {
        let spec = ScheduleSpec::new(4500.0, 1800.0, 1, phase).unwrap();
        let curve: Vec<(u32, f64)> = extended_rte_vs_n(&spec, &ns, &weather, &cfg)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|(n, r)| (n, r.eta_rt))
            .collect();
        let blocks = block_maxima(&curve);
        if blocks.windows(2).any(|w| w[1] > w[0]) {
            return Err(format!("{phase:?} envelope increases: {blocks:?}"));
        }
        let eta_30 = curve[29].1;
        if (eta_30 - 1.0).abs() >= 0.05 {
            return Err(format!("{phase:?} eta(30) = {eta_30}"));
        }
        summary.push(format!(
            "{phase:?} eta(1) = {:.3}, eta(30) = {eta_30:.4}",
            curve[0].1
        ));
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(summary.join("; "))
}

fn energy_consistency() -> Outcome {
    let (_, flows) = reference();
    let ns: Vec<u32> = (1..=200).collect();
    for phase in [Phase::UpDown, Phase::DownUp] {
        for t_p in [60.0, 722.0, 1800.0, 7200.0] {
            let spec = ScheduleSpec::new(flows.delta_p, t_p, 1, phase).unwrap();
            for (n, r) in rte_vs_n(&spec, &ns, &flows).map_err(|e| e.to_string())? {
                let e = r.eta_from_energy();
                if (e - r.eta_rt).abs() > 1e-9 * r.eta_rt {
                    return Err(format!(
                        "{phase:?} t_p = {t_p}, n = {n}: {e} vs {}",
                        r.eta_rt
                    ));
                }
            }
        }
    }
    let lines = claims(
        &["energy-definition", "soc-closure"],
        &VerifyOptions::default(),
    )?;
    Ok(format!("1600 reference runs, {}", lines.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("critical half-period", critical_half_period_reproduction),
        ("single-cycle signs", single_cycle_criterion),
        ("convergence in n", convergence_criterion),
        ("coefficient inequalities", algebraic_criterion),
        ("temperature bound", temperature_bound_criterion),
        ("oracle equivalence", oracle_equivalence),
        ("partial outside air curve", half_outside_air_criterion),
        ("extended model trend", extended_criterion),
        ("energy definition", energy_consistency),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({elapsed:.2?})"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({elapsed:.2?})");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
