//! Randomized checks of the analytic claims over valid parameter draws.
//!
//! Every trial draws from its own ChaCha stream derived from the seed, the
//! claim index and the trial index, so results do not depend on thread
//! scheduling.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{ChargeDischargeFlows, Mode, Phase, VesCoefficients};
use crate::hvac::{AssumptionChecks, BaselineInput, Plant};
use crate::ode::rk4_step;
use crate::rte::{
    critical_half_period, recovery_bound, run_square_wave, run_square_wave_numeric,
    square_wave_result, NumericOptions, RunOptions, ScheduleSpec,
};
use crate::sweep;
use crate::units::{BuildingParams, HvacParams, PhysicalConstants, Temperature};

/// Deliberate corruption used to check that the harness reports failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    NegateA,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negate-a" => Ok(Fault::NegateA),
            other => Err(format!("unknown fault `{other}` (expected `negate-a`)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Draws for the algebraic coefficient checks.
    pub algebraic_draws: usize,
    pub signs_draws: usize,
    pub schedule_draws: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            algebraic_draws: 10_000,
            signs_draws: 1_000,
            schedule_draws: 100,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimOutcome {
    pub name: &'static str,
    pub description: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Lowest-index failing trial and what went wrong.
    pub first_failure: Option<(usize, String)>,
    pub elapsed: Duration,
}

impl ClaimOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Check = fn(&mut ChaCha8Rng, Option<Fault>) -> Result<(), String>;

struct Claim {
    name: &'static str,
    description: &'static str,
    check: Check,
}

const CLAIMS: &[Claim] = &[
    Claim {
        name: "a-positive",
        description: "a > 0",
        check: a_positive,
    },
    Claim {
        name: "discriminant",
        description: "a^2 > 4 d dP for dP <= P_b (r_oa = 1)",
        check: discriminant,
    },
    Claim {
        name: "a-over-d",
        description: "a / d > m_b (r_oa = 1)",
        check: a_over_d,
    },
    Claim {
        name: "baseline-root",
        description: "m_b <= (a + sqrt(a^2 - 4 d dP)) / 2d, closed form at dP = P_b",
        check: baseline_root,
    },
    Claim {
        name: "flow-deviations",
        description: "dm_d > dm_c > 0 and forward substitution gives +-dP",
        check: flow_deviations,
    },
    Claim {
        name: "alpha-dominance",
        description: "alpha > gamma dm_d > gamma dm_c",
        check: alpha_dominance,
    },
    Claim {
        name: "steady-states",
        description: "T_c_ss < 0 < T_d_ss and |T_c_ss| < |T_d_ss|",
        check: steady_states,
    },
    Claim {
        name: "single-cycle-signs",
        description: "single-cycle efficiency signs around t_p*",
        check: single_cycle_signs,
    },
    Claim {
        name: "temperature-bound",
        description: "|T~| bounded by the larger steady state on every trace",
        check: temperature_bound,
    },
    Claim {
        name: "multi-cycle-convergence",
        description: "|eta(n) - 1| n t_p <= recovery bound",
        check: multi_cycle_convergence,
    },
    Claim {
        name: "lti-vs-rk4",
        description: "closed-form step matches RK4 within 1e-7 K over 24 h",
        check: lti_vs_rk4,
    },
    Claim {
        name: "numeric-vs-closed",
        description: "numeric efficiency matches closed form within 0.1% for n <= 20",
        check: numeric_vs_closed,
    },
    Claim {
        name: "energy-definition",
        description: "energy-integral efficiency equals t_d / t_c within 1e-9",
        check: energy,
    },
    Claim {
        name: "soc-closure",
        description: "SoC at end of the complete interval equals SoC at start",
        check: soc_closure,
    },
];

/// Names of all claims in reporting order.
pub fn claim_names() -> Vec<&'static str> {
    CLAIMS.iter().map(|c| c.name).collect()
}

fn trials_for(name: &str, opts: &VerifyOptions) -> usize {
    match name {
        "a-positive" | "discriminant" | "a-over-d" | "baseline-root" | "flow-deviations"
        | "alpha-dominance" | "steady-states" => opts.algebraic_draws,
        "single-cycle-signs" => opts.signs_draws,
        "lti-vs-rk4" | "numeric-vs-closed" => (opts.schedule_draws / 10).max(1),
        _ => opts.schedule_draws,
    }
}

/// RNG for one trial of one claim.
pub fn trial_rng(seed: u64, claim: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((claim as u64) << 40) | trial as u64);
    rng
}

pub fn run_claim(name: &str, opts: &VerifyOptions) -> Option<ClaimOutcome> {
    let (idx, claim) = CLAIMS.iter().enumerate().find(|(_, c)| c.name == name)?;
    let start = Instant::now();
    let trials = trials_for(name, opts);
    let indices: Vec<usize> = (0..trials).collect();
    let results = sweep::map(&indices, |&i| {
        let mut rng = trial_rng(opts.seed, idx, i);
        (claim.check)(&mut rng, opts.fault)
    });
    let failures = results.iter().filter(|r| r.is_err()).count();
    let first_failure = results
        .into_iter()
        .enumerate()
        .find_map(|(i, r)| r.err().map(|e| (i, e)));
    Some(ClaimOutcome {
        name: claim.name,
        description: claim.description,
        trials,
        failures,
        first_failure,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<ClaimOutcome> {
    CLAIMS
        .iter()
        .filter_map(|c| run_claim(c.name, opts))
        .collect()
}

/// Random valid plant. Temperatures are drawn in °F so the comfort band and
/// supply/outdoor offsets stay in realistic ranges.
pub fn draw_plant(rng: &mut ChaCha8Rng, full_outside_air: bool) -> Plant {
    loop {
        if let Some(p) = try_draw_plant(rng, full_outside_air) {
            return p;
        }
    }
}

fn try_draw_plant(rng: &mut ChaCha8Rng, full_outside_air: bool) -> Option<Plant> {
    let f = |x: f64| Temperature::from_fahrenheit(x).ok();
    let r_th = rng.random_range(5e-4..3e-3);
    let c_th = rng.random_range(1e7..1e8);
    let m_b = rng.random_range(0.5..5.0);
    let alpha_1f = rng.random_range(100.0..1500.0);
    let alpha_2f = rng.random_range(-0.5..0.5) * alpha_1f * m_b;
    let cop = rng.random_range(2.5..5.5);
    let t_l = rng.random_range(66.0..72.0);
    let t_h = t_l + rng.random_range(2.0..8.0);
    let t_b = t_l + rng.random_range(0.01..0.99) * (t_h - t_l);
    let t_sa = t_b - rng.random_range(3.0..15.0);
    let t_oa = t_h + rng.random_range(0.5..15.0);
    let r_oa = if full_outside_air {
        1.0
    } else {
        rng.random_range(0.0..=1.0)
    };
    let building = BuildingParams::new(r_th, c_th, f(t_l)?, f(t_h)?).ok()?;
    let hvac = HvacParams::new(alpha_1f, alpha_2f, cop, f(t_sa)?, r_oa).ok()?;
    Plant::new(
        building,
        hvac,
        f(t_oa)?,
        f(t_b)?,
        BaselineInput::Airflow(m_b),
        PhysicalConstants::default(),
        AssumptionChecks::Enforce,
    )
    .ok()
}

fn coefficients(plant: &Plant, fault: Option<Fault>) -> VesCoefficients {
    let mut v = VesCoefficients::new(plant);
    if fault == Some(Fault::NegateA) {
        v.a = -v.a;
    }
    v
}

/// Plant, coefficients and a feasible amplitude drawn as a fraction of the
/// baseline power.
fn draw_flows(
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
    frac: std::ops::Range<f64>,
) -> Result<(Plant, VesCoefficients, ChargeDischargeFlows), String> {
    let plant = draw_plant(rng, true);
    let v = coefficients(&plant, fault);
    let dp = rng.random_range(frac) * plant.baseline.p_hvac_b;
    let flows = ChargeDischargeFlows::new(&v, dp).map_err(|e| e.to_string())?;
    Ok((plant, v, flows))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

fn a_positive(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let plant = draw_plant(rng, false);
    let v = coefficients(&plant, fault);
    ensure(v.a > 0.0, || format!("a = {} (r_oa = {})", v.a, v.r_oa))
}

fn discriminant(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let plant = draw_plant(rng, true);
    let v = coefficients(&plant, fault);
    let p_b = plant.baseline.p_hvac_b;
    for dp in [rng.random_range(0.0..=1.0) * p_b, p_b] {
        ensure(v.a * v.a > 4.0 * v.d * dp, || {
            format!(
                "a^2 = {} <= 4 d dP = {} at dP = {dp}",
                v.a * v.a,
                4.0 * v.d * dp
            )
        })?;
    }
    Ok(())
}

fn a_over_d(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let plant = draw_plant(rng, true);
    let v = coefficients(&plant, fault);
    ensure(v.a / v.d > plant.baseline.m_a_b, || {
        format!("a/d = {} <= m_b = {}", v.a / v.d, plant.baseline.m_a_b)
    })
}

fn baseline_root(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let plant = draw_plant(rng, true);
    let v = coefficients(&plant, fault);
    let m_b = plant.baseline.m_a_b;
    let p_b = plant.baseline.p_hvac_b;
    let root = |dp: f64| (v.a + (v.a * v.a - 4.0 * v.d * dp).sqrt()) / (2.0 * v.d);
    let dp = rng.random_range(0.0..=1.0) * p_b;
    ensure(m_b <= root(dp) * (1.0 + 1e-12), || {
        format!("root {} < m_b {m_b} at dP = {dp}", root(dp))
    })?;
    // At dP = P_b the discriminant is a perfect square, leaving
    // m_b + max(X, 0) / alpha_1 with X the linear coefficient of P_b(m_b).
    let h = &plant.hvac;
    let x =
        h.alpha_2f + plant.constants.c_pa * (plant.ambient.t_oa.kelvin() - h.t_sa.kelvin()) / h.cop;
    let expected = m_b + x.max(0.0) / h.alpha_1f;
    ensure(rel_close(root(p_b), expected, 1e-9), || {
        format!(
            "root at P_b = {} but closed form gives {expected}",
            root(p_b)
        )
    })
}

fn flow_deviations(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, f) = draw_flows(rng, fault, 1e-6..1.0)?;
    ensure(f.delta_m_d > f.delta_m_c && f.delta_m_c > 0.0, || {
        format!("dm_c = {}, dm_d = {}", f.delta_m_c, f.delta_m_d)
    })?;
    let up = v.delta_p(f.delta_m_c, 0.0);
    let down = v.delta_p(-f.delta_m_d, 0.0);
    ensure(
        rel_close(up, f.delta_p, 1e-9) && rel_close(down, -f.delta_p, 1e-9),
        || {
            format!(
                "forward substitution gives {up} / {down} for dP = {}",
                f.delta_p
            )
        },
    )
}

fn alpha_dominance(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, f) = draw_flows(rng, fault, 1e-6..1.0)?;
    let (hd, hc) = (v.gamma * f.delta_m_d, v.gamma * f.delta_m_c);
    ensure(v.alpha > hd && hd > hc, || {
        format!("alpha = {}, gamma dm_d = {hd}, gamma dm_c = {hc}", v.alpha)
    })
}

fn steady_states(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, _, f) = draw_flows(rng, fault, 1e-6..1.0)?;
    ensure(
        f.t_c_ss < 0.0 && 0.0 < f.t_d_ss && f.t_c_ss.abs() < f.t_d_ss.abs(),
        || format!("T_c_ss = {}, T_d_ss = {}", f.t_c_ss, f.t_d_ss),
    )
}

fn single_cycle_signs(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    // Rejection sampling keeps draws in the small-period regime.
    let mut accepted = None;
    for _ in 0..200 {
        let (_, _, f) = draw_flows(rng, fault, 0.001..0.3)?;
        let t_star = critical_half_period(&f);
        if f.rate_c * 2.0 * t_star < 0.05 {
            accepted = Some((f, t_star));
            break;
        }
    }
    let (flows, t_star) = accepted.ok_or("no draw reached the small-period regime")?;
    let eta = |t_p: f64, phase| -> Result<f64, String> {
        let spec = ScheduleSpec::new(flows.delta_p, t_p, 1, phase).map_err(|e| e.to_string())?;
        square_wave_result(&spec, &flows)
            .map(|r| r.eta_rt)
            .map_err(|e| e.to_string())
    };
    for t_p in [0.5 * t_star, 2.0 * t_star] {
        let e = eta(t_p, Phase::UpDown)?;
        ensure(e < 1.0, || format!("up/down eta = {e} at t_p = {t_p}"))?;
    }
    let below = eta(0.5 * t_star, Phase::DownUp)?;
    ensure(below < 1.0, || {
        format!("down/up eta = {below} at t_p = t_p*/2 = {}", 0.5 * t_star)
    })?;
    let above = eta(2.0 * t_star, Phase::DownUp)?;
    ensure(above > 1.0, || {
        format!("down/up eta = {above} at t_p = 2 t_p* = {}", 2.0 * t_star)
    })
}

fn random_schedule(
    rng: &mut ChaCha8Rng,
    flows: &ChargeDischargeFlows,
    max_n: u32,
) -> Result<ScheduleSpec, String> {
    let t_p = 10f64.powf(rng.random_range(1.0..4.5));
    let n = rng.random_range(1..=max_n);
    let phase = if rng.random_bool(0.5) {
        Phase::UpDown
    } else {
        Phase::DownUp
    };
    ScheduleSpec::new(flows.delta_p, t_p, n, phase).map_err(|e| e.to_string())
}

fn temperature_bound(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, flows) = draw_flows(rng, fault, 0.01..0.95)?;
    let spec = random_schedule(rng, &flows, 20)?;
    let opts = RunOptions {
        sample_dt: Some(spec.half_period / 25.0),
        strict_comfort: false,
    };
    let (trace, _) = run_square_wave(&spec, &v, &flows, &opts).map_err(|e| e.to_string())?;
    let bound = flows.temperature_bound();
    let worst = trace.max_abs_t_tilde();
    ensure(worst <= bound + 1e-9, || {
        format!("max |T~| = {worst} exceeds bound {bound}")
    })
}

fn multi_cycle_convergence(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, _, flows) = draw_flows(rng, fault, 0.01..0.95)?;
    let spec = random_schedule(rng, &flows, 1)?;
    let t_bar = recovery_bound(&flows).map_err(|e| e.to_string())?;
    for n in [1u32, 2, 5, 10, 50, 200] {
        let s = spec.with_cycles(n).map_err(|e| e.to_string())?;
        let r = square_wave_result(&s, &flows).map_err(|e| e.to_string())?;
        let lhs = (r.eta_rt - 1.0).abs() * n as f64 * spec.half_period;
        ensure(lhs <= t_bar * (1.0 + 1e-9) + 1e-9, || {
            format!("n = {n}: |eta - 1| n t_p = {lhs} > {t_bar}")
        })?;
    }
    Ok(())
}

fn lti_vs_rk4(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, flows) = draw_flows(rng, fault, 0.01..0.95)?;
    let mode = if rng.random_bool(0.5) {
        Mode::Charging
    } else {
        Mode::Discharging
    };
    let m = flows.airflow(mode);
    let f = |_: f64, y: &[f64; 1]| [v.temperature_rate(y[0], m)];
    let dt = 10.0;
    let mut y = [0.0];
    let mut worst: f64 = 0.0;
    for k in 0..8640 {
        y = rk4_step(f, k as f64 * dt, &y, dt);
        worst = worst.max((y[0] - flows.lti_step(0.0, (k + 1) as f64 * dt, mode)).abs());
    }
    ensure(worst < 1e-7, || {
        format!("{mode:?}: max deviation {worst} K")
    })
}

fn numeric_vs_closed(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, flows) = draw_flows(rng, fault, 0.01..0.5)?;
    let t_p = (rng.random_range(6.0..360.0f64)).round() * 10.0;
    let phase = if rng.random_bool(0.5) {
        Phase::UpDown
    } else {
        Phase::DownUp
    };
    let opts = NumericOptions {
        record_trace: false,
        ..NumericOptions::default()
    };
    for n in [1u32, 2, 5, 10, 20] {
        let spec = ScheduleSpec::new(flows.delta_p, t_p, n, phase).map_err(|e| e.to_string())?;
        let exact = square_wave_result(&spec, &flows).map_err(|e| e.to_string())?;
        let (_, num) = run_square_wave_numeric(&spec, &v, &opts).map_err(|e| e.to_string())?;
        ensure(rel_close(num.eta_rt, exact.eta_rt, 1e-3), || {
            format!(
                "n = {n}, t_p = {t_p}: numeric {} vs closed form {}",
                num.eta_rt, exact.eta_rt
            )
        })?;
    }
    Ok(())
}

fn energy(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, flows) = draw_flows(rng, fault, 0.01..0.95)?;
    let spec = random_schedule(rng, &flows, 50)?;
    let opts = RunOptions {
        sample_dt: None,
        strict_comfort: false,
    };
    let (_, r) = run_square_wave(&spec, &v, &flows, &opts).map_err(|e| e.to_string())?;
    let net = r.energy_charged - r.energy_discharged;
    let expected = flows.delta_p * (r.t_c - r.t_d);
    let scale = flows.delta_p * (r.t_c + r.t_d);
    ensure((net - expected).abs() <= 1e-9 * scale, || {
        format!("net energy {net} vs {expected}")
    })?;
    ensure(rel_close(r.eta_from_energy(), r.eta_rt, 1e-9), || {
        format!(
            "energy eta {} vs time eta {}",
            r.eta_from_energy(),
            r.eta_rt
        )
    })
}

fn soc_closure(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<(), String> {
    let (_, v, flows) = draw_flows(rng, fault, 0.01..0.95)?;
    let spec = random_schedule(rng, &flows, 50)?;
    let opts = RunOptions {
        sample_dt: None,
        strict_comfort: false,
    };
    let (trace, _) = run_square_wave(&spec, &v, &flows, &opts).map_err(|e| e.to_string())?;
    let (first, last) = (trace.samples[0], *trace.last().ok_or("empty trace")?);
    ensure((first.soc - last.soc).abs() <= 1e-9, || {
        format!("SoC {} at start vs {} at end", first.soc, last.soc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            algebraic_draws: 300,
            signs_draws: 50,
            schedule_draws: 20,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn all_claims_pass_on_small_suite() {
        for o in run_all(&small()) {
            assert!(o.passed(), "{}: {:?}", o.name, o.first_failure);
        }
    }

    #[test]
    fn negated_a_is_caught() {
        let opts = VerifyOptions {
            fault: Some(Fault::NegateA),
            ..small()
        };
        let a_positive = run_claim("a-positive", &opts).unwrap();
        assert_eq!(a_positive.failures, a_positive.trials);
        assert!(a_positive.first_failure.unwrap().1.contains("a = -"));
    }

    #[test]
    fn outcomes_are_reproducible() {
        let a = run_claim("temperature-bound", &small()).unwrap();
        let b = run_claim("temperature-bound", &small()).unwrap();
        assert_eq!((a.trials, a.failures), (b.trials, b.failures));
        let mut r1 = trial_rng(7, 3, 11);
        let mut r2 = trial_rng(7, 3, 11);
        assert_eq!(draw_plant(&mut r1, true), draw_plant(&mut r2, true));
        let mut r3 = trial_rng(7, 3, 12);
        assert_ne!(
            draw_plant(&mut trial_rng(7, 3, 11), true),
            draw_plant(&mut r3, true)
        );
    }

    #[test]
    fn unknown_claims_and_faults() {
        assert!(run_claim("nope", &small()).is_none());
        assert!("negate-a".parse::<Fault>().is_ok());
        assert!("other".parse::<Fault>().is_err());
    }
}
