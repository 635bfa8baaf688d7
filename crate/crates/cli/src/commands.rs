use std::path::PathBuf;

use ves_core::extended::{extended_rte_vs_n, run_extended_rte};
use ves_core::rte::{rte_vs_n_numeric, run_square_wave_numeric, NumericOptions};
use ves_core::verify::{run_all, Fault, VerifyOptions};
use ves_core::{
    critical_half_period, rte_vs_n, run_square_wave, square_wave_result, ChargeDischargeFlows,
    Phase, Plant, RteResult, RunOptions, ScheduleSpec, SimTrace, VesCoefficients,
};

use crate::config::{Method, Model, ScenarioConfig, SweepVariable};
use crate::error::CliError;
use crate::output;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
}

pub fn load(g: &Globals) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &g.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    cfg.override_with(g.out.clone(), g.dt);
    if !(cfg.integrator.dt > 0.0 && cfg.integrator.dt.is_finite()) {
        return Err(CliError::Config(format!(
            "dt must be positive, got {}",
            cfg.integrator.dt
        )));
    }
    Ok(cfg)
}

fn out_path(cfg: &ScenarioConfig, name: &str) -> Result<PathBuf, CliError> {
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::UpDown => "up-down",
        Phase::DownUp => "down-up",
    }
}

enum Engine {
    ClosedForm(ChargeDischargeFlows),
    Numeric(NumericOptions),
}

fn engine(
    cfg: &ScenarioConfig,
    v: &VesCoefficients,
    delta_p: f64,
    record_trace: bool,
) -> Result<Engine, CliError> {
    let closed = match cfg.integrator.method {
        Method::Auto => v.r_oa == 1.0,
        Method::ClosedForm => true,
        Method::Numeric => false,
    };
    if closed {
        Ok(Engine::ClosedForm(ChargeDischargeFlows::new(v, delta_p)?))
    } else {
        Ok(Engine::Numeric(NumericOptions {
            dt: cfg.integrator.dt,
            recovery_cap: cfg.integrator.recovery_cap_h * 3600.0,
            record_trace,
            strict_comfort: cfg.strict_comfort(),
        }))
    }
}

fn run_one(
    cfg: &ScenarioConfig,
    model: Model,
    plant: &Plant,
    spec: &ScheduleSpec,
    record_trace: bool,
) -> Result<(SimTrace, RteResult), CliError> {
    match model {
        Model::Analytic => {
            let v = VesCoefficients::new(plant);
            match engine(cfg, &v, spec.delta_p, record_trace)? {
                Engine::ClosedForm(flows) => {
                    if !record_trace {
                        return Ok((SimTrace::default(), square_wave_result(spec, &flows)?));
                    }
                    let opts = RunOptions {
                        sample_dt: Some(cfg.integrator.trace_dt),
                        strict_comfort: cfg.strict_comfort(),
                    };
                    Ok(run_square_wave(spec, &v, &flows, &opts)?)
                }
                Engine::Numeric(opts) => Ok(run_square_wave_numeric(spec, &v, &opts)?),
            }
        }
        Model::Extended => {
            let ext = cfg.extended_config(plant)?;
            let weather = cfg.weather(plant)?;
            let run = run_extended_rte(spec, &weather, &ext)?;
            if run.saturated_steps > 0 {
                eprintln!(
                    "warning: tracker saturated on {} steps; delivered power differs from the schedule",
                    run.saturated_steps
                );
            }
            Ok((run.trace, run.result))
        }
    }
}

pub fn baseline(g: &Globals) -> Result<(), CliError> {
    let cfg = load(g)?;
    let plant = cfg.plant()?;
    let v = VesCoefficients::new(&plant);
    let b = &plant.baseline;
    println!(
        "baseline temperature  {:.4} K ({:.2} F)",
        b.t_b.kelvin(),
        b.t_b.fahrenheit()
    );
    println!("baseline airflow      {:.6} kg/s", b.m_a_b);
    println!("exogenous heat gain   {:.3} W", b.q_x);
    println!("baseline power        {:.3} W", b.p_hvac_b);
    println!(
        "a = {:.6}  b = {:.6}  c = {:.6}  d = {:.6}",
        v.a, v.b, v.c, v.d
    );
    println!(
        "alpha = {:.6e}  beta = {:.6e}  gamma = {:.6e}",
        v.alpha, v.beta, v.gamma
    );
    if v.r_oa == 1.0 {
        if let Ok(spec) = cfg.schedule(&plant) {
            if let Ok(flows) = ChargeDischargeFlows::new(&v, spec.delta_p) {
                println!(
                    "critical half-period  {:.3} s at delta_p = {:.3} W",
                    critical_half_period(&flows),
                    spec.delta_p
                );
            }
        }
    }
    let path = out_path(&cfg, "baseline.csv")?;
    output::write_baseline(&path, &plant, &v)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn report(r: &RteResult) {
    println!(
        "eta_rt = {:.6}  t_c = {:.1} s  t_d = {:.1} s  recovery = {} ({:.1} s)",
        r.eta_rt,
        r.t_c,
        r.t_d,
        r.recovery.as_str(),
        r.t_recov
    );
    if r.comfort_violation {
        eprintln!("warning: zone temperature left the comfort band");
    }
}

pub fn rte(g: &Globals, force: Option<Model>) -> Result<(), CliError> {
    let cfg = load(g)?;
    let model = force.unwrap_or(cfg.model);
    let plant = cfg.plant()?;
    let spec = cfg.schedule(&plant)?;
    let (trace, r) = run_one(&cfg, model, &plant, &spec, true)?;
    report(&r);
    let rte_path = out_path(&cfg, "rte.csv")?;
    output::write_rte(&rte_path, &spec, &r)?;
    let trace_path = out_path(&cfg, "trace.csv")?;
    output::write_trace(&trace_path, &trace)?;
    println!("wrote {} and {}", rte_path.display(), trace_path.display());
    Ok(())
}

/// Runs every grid point; `n` sweeps share one pass where the model allows.
fn sweep_points(
    cfg: &ScenarioConfig,
    var: SweepVariable,
    grid: &[f64],
) -> Result<Vec<(f64, RteResult)>, CliError> {
    let plant = cfg.plant()?;
    let spec = cfg.schedule(&plant)?;
    if var == SweepVariable::N {
        let ns: Vec<u32> = grid.iter().map(|x| *x as u32).collect();
        let results = match cfg.model {
            Model::Analytic => {
                let v = VesCoefficients::new(&plant);
                match engine(cfg, &v, spec.delta_p, false)? {
                    Engine::ClosedForm(flows) => rte_vs_n(&spec, &ns, &flows)?,
                    Engine::Numeric(opts) => rte_vs_n_numeric(&spec, &ns, &v, &opts)?,
                }
            }
            Model::Extended => {
                let ext = cfg.extended_config(&plant)?;
                extended_rte_vs_n(&spec, &ns, &cfg.weather(&plant)?, &ext)?
            }
        };
        return Ok(results.into_iter().map(|(n, r)| (n as f64, r)).collect());
    }
    let point = |x: &f64| -> Result<RteResult, CliError> {
        let (p, s) = match var {
            SweepVariable::TP => (plant, spec.with_half_period(*x)?),
            SweepVariable::DeltaP => (
                plant,
                ScheduleSpec::new(*x, spec.half_period, spec.n_cycles, spec.phase)?,
            ),
            SweepVariable::ROa => {
                let p = cfg.plant_with_r_oa(Some(*x))?;
                let s = cfg.schedule(&p)?;
                (p, s)
            }
            SweepVariable::N => unreachable!("handled above"),
        };
        run_one(cfg, cfg.model, &p, &s, false)
            .map(|(_, r)| r)
            .map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{} = {x}: {m}", var.column())),
                other => other,
            })
    };
    let results = ves_core::sweep::map(grid, point);
    grid.iter()
        .copied()
        .zip(results)
        .map(|(x, r)| r.map(|r| (x, r)))
        .collect()
}

/// Grid intervals where `eta - 1` changes sign.
fn crossings(points: &[(f64, RteResult)]) -> Vec<(f64, f64)> {
    points
        .windows(2)
        .filter(|w| (w[0].1.eta_rt - 1.0) * (w[1].1.eta_rt - 1.0) < 0.0)
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

pub fn sweep(g: &Globals) -> Result<(), CliError> {
    let cfg = load(g)?;
    let (var, grid) = cfg.grid()?;
    let points = sweep_points(&cfg, var, &grid)?;
    let csv_path = out_path(&cfg, "curve.csv")?;
    output::write_curve(&csv_path, var.column(), &points)?;
    let plant = cfg.plant()?;
    let phase = cfg.schedule(&plant)?.phase;
    let model = match cfg.model {
        Model::Analytic => "analytic",
        Model::Extended => "extended",
    };
    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        });
    let log_x = var == SweepVariable::TP && lo > 0.0 && hi / lo >= 20.0;
    let xy: Vec<(f64, f64)> = points.iter().map(|(x, r)| (*x, r.eta_rt)).collect();
    let title = format!(
        "eta_rt vs {} ({model}, {})",
        var.column(),
        phase_name(phase)
    );
    let svg_path = out_path(&cfg, "curve.svg")?;
    std::fs::write(
        &svg_path,
        output::svg_chart(&title, var.column(), &xy, log_x),
    )?;
    for (a, b) in crossings(&points) {
        println!("eta_rt crosses 1 between {} = {a} and {b}", var.column());
    }
    let violations = points.iter().filter(|(_, r)| r.comfort_violation).count();
    if violations > 0 {
        eprintln!("warning: {violations} grid points left the comfort band");
    }
    println!(
        "{} points; wrote {} and {}",
        points.len(),
        csv_path.display(),
        svg_path.display()
    );
    Ok(())
}

pub fn verify(g: &Globals, fault: Option<Fault>) -> Result<(), CliError> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: g.seed.unwrap_or(defaults.seed),
        fault,
        ..defaults
    };
    println!("seed = {}", opts.seed);
    if let Some(f) = fault {
        println!("fault injected: {f:?}");
    }
    let outcomes = run_all(&opts);
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<23} {:>6}/{:<6} {:>9.2?}  {}",
            o.name,
            o.trials - o.failures,
            o.trials,
            o.elapsed,
            o.description
        );
        if let Some((i, msg)) = &o.first_failure {
            println!("     first failure (trial {i}): {msg}");
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        println!("all {} claims passed", outcomes.len());
        Ok(())
    } else {
        Err(CliError::Property(failed))
    }
}
