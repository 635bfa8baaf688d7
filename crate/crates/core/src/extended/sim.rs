//! Fixed-step integration and the three-pass RTE procedure.
//!
//! 1. Baseline: the climate controller alone, recording power and the
//!    controller integrator at every step.
//! 2. VES: the tracker follows baseline power plus the square wave from the
//!    same initial state; state and energy totals are snapshotted at the end
//!    of each requested cycle count.
//! 3. Recovery: from each snapshot, the zone is driven back to the setpoint.
//!    Recoveries are independent and run in parallel.

use super::{
    extended_derivatives, AirflowController, ClimateController, ExtendedConfig, ExtendedState,
    VesTracker, WallModel, Weather, WeatherSample,
};
use crate::error::{finite, positive, Result, VesError};
use crate::ode::rk4_step;
use crate::rte::{result_from_times, Recovery, RteResult, ScheduleSpec, RECOVERY_TIE_K};
use crate::sweep;
use crate::trace::{SimTrace, TraceSample};
use crate::units::soc_raw;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecoveryPolicy {
    /// Climate controller on until `|T - setpoint| < tolerance_k` has held
    /// for `hold_s`; the interval ends where that window starts.
    ClimateController { tolerance_k: f64, hold_s: f64 },
    /// Keep charging or discharging at the schedule amplitude until the zone
    /// temperature crosses the setpoint.
    SquareWave,
}

impl Default for RecoveryPolicy {
    fn default() -> Self {
        RecoveryPolicy::ClimateController {
            tolerance_k: 0.005,
            hold_s: 600.0,
        }
    }
}

impl RecoveryPolicy {
    pub fn validate(&self) -> Result<()> {
        if let RecoveryPolicy::ClimateController {
            tolerance_k,
            hold_s,
        } = *self
        {
            positive("recovery_tolerance", tolerance_k)?;
            finite("recovery_hold", hold_s)?;
            if hold_s < 0.0 {
                return Err(VesError::InvalidParameter {
                    name: "recovery_hold",
                    reason: format!("must be nonnegative, got {hold_s}"),
                });
            }
        }
        Ok(())
    }
}

/// Per-step record of the baseline pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepRecord {
    /// Baseline HVAC power at the start of each step, W.
    pub power: Vec<f64>,
    /// Climate controller integrator at the start of each step, kg/s.
    pub integral: Vec<f64>,
    pub states: Vec<ExtendedState>,
    pub airflow: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedRun {
    pub trace: SimTrace,
    pub result: RteResult,
    /// Steps where the tracker could not reach the requested power.
    pub saturated_steps: usize,
}

fn step(
    cfg: &ExtendedConfig,
    weather: &Weather,
    t: f64,
    s: &ExtendedState,
    m_a: f64,
    h: f64,
) -> Result<ExtendedState> {
    let f = |tt: f64, y: &[f64; 3]| {
        extended_derivatives(&ExtendedState::from_array(*y), m_a, &weather.at(tt), cfg)
    };
    let mut next = ExtendedState::from_array(rk4_step(f, t, &s.to_array(), h));
    if cfg.wall == WallModel::Static {
        next.t_wall = cfg
            .building
            .static_wall(next.t_zone, weather.at(t + h).t_oa);
    }
    if !next.is_finite() {
        return Err(VesError::NonFiniteState { t: t + h });
    }
    Ok(next)
}

fn sample(
    cfg: &ExtendedConfig,
    t: f64,
    s: &ExtendedState,
    m_a: f64,
    p_hvac: f64,
    p_base: f64,
) -> TraceSample {
    TraceSample {
        t,
        t_tilde: s.t_zone - cfg.setpoint.kelvin(),
        t_zone: s.t_zone,
        t_wall: Some(s.t_wall),
        w_zone: cfg.humidity.then_some(s.w_zone),
        m_a,
        p_hvac,
        p_tilde: p_hvac - p_base,
        soc: soc_raw(s.t_zone, &cfg.comfort),
    }
}

fn steps_for(duration: f64, dt: f64, what: &str) -> Result<usize> {
    let k = (duration / dt).round();
    if (k * dt - duration).abs() > 1e-9 * duration.max(dt) {
        return Err(VesError::InvalidSchedule(format!(
            "{what} ({duration} s) must be a multiple of the step ({dt} s)"
        )));
    }
    Ok(k as usize)
}

/// Zone at the setpoint, wall at its static relation, humidity at
/// equilibrium, and the integrator holding the equilibrium airflow.
pub fn initial_state(cfg: &ExtendedConfig, weather: &Weather) -> (ExtendedState, f64) {
    let t = cfg.setpoint.kelvin();
    let t_oa = weather.at(0.0).t_oa;
    let t_wall = cfg.building.static_wall(t, t_oa);
    let m_eq = ((t_wall - t) / cfg.building.r_w + cfg.q_x)
        / (cfg.constants.c_pa * (t - cfg.hvac.t_sa.kelvin()));
    let state = ExtendedState {
        t_zone: t,
        t_wall,
        w_zone: cfg.humidity_equilibrium(m_eq),
    };
    (state, m_eq - cfg.m_a_ff)
}

/// Integrates for `horizon` seconds with the controller's command held over
/// each step. Without a baseline the run is its own reference (`P~ = 0`).
pub fn integrate(
    initial: ExtendedState,
    controller: &mut dyn AirflowController,
    horizon: f64,
    dt: f64,
    weather: &Weather,
    cfg: &ExtendedConfig,
    baseline: Option<&[f64]>,
) -> Result<SimTrace> {
    positive("dt", dt)?;
    if !(horizon >= dt) {
        return Err(VesError::InvalidSchedule(format!(
            "horizon {horizon} s is shorter than the step {dt} s"
        )));
    }
    let steps = steps_for(horizon, dt, "horizon")?;
    let mut s = initial;
    let mut trace = SimTrace::default();
    let mut last = (0.0, 0.0);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let wx = weather.at(t);
        let m = if k < steps {
            controller.command(t, &s, &wx, dt)
        } else {
            last.0
        };
        let p = cfg.power(m, &s, &wx)?;
        let p_base = baseline.and_then(|b| b.get(k).copied()).unwrap_or(p);
        trace.samples.push(sample(cfg, t, &s, m, p, p_base));
        last = (m, p);
        if k < steps {
            s = step(cfg, weather, t, &s, m, dt)?;
        }
    }
    Ok(trace)
}

/// Baseline pass over `steps` steps.
pub fn baseline_pass(cfg: &ExtendedConfig, weather: &Weather, steps: usize) -> Result<StepRecord> {
    let (mut s, integral) = initial_state(cfg, weather);
    let mut ctrl = ClimateController::new(cfg).with_integral(integral);
    let mut rec = StepRecord::default();
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let wx = weather.at(t);
        rec.integral.push(ctrl.integral());
        rec.states.push(s);
        let m = ctrl.command(t, &s, &wx, cfg.dt);
        rec.airflow.push(m);
        rec.power.push(cfg.power(m, &s, &wx)?);
        if k < steps {
            s = step(cfg, weather, t, &s, m, cfg.dt)?;
        }
    }
    Ok(rec)
}

/// Running totals over the charging (`P~ > 0`) and discharging (`P~ < 0`)
/// sets.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Ledger {
    e_c: f64,
    e_d: f64,
    t_c: f64,
    t_d: f64,
    violated: bool,
}

impl Ledger {
    fn add(&mut self, p_tilde: f64, h: f64) {
        if p_tilde > 0.0 {
            self.e_c += p_tilde * h;
            self.t_c += h;
        } else if p_tilde < 0.0 {
            self.e_d -= p_tilde * h;
            self.t_d += h;
        }
    }

    fn merge(&mut self, other: &Ledger) {
        self.e_c += other.e_c;
        self.e_d += other.e_d;
        self.t_c += other.t_c;
        self.t_d += other.t_d;
        self.violated |= other.violated;
    }

    fn check_comfort(&mut self, cfg: &ExtendedConfig, s: &ExtendedState) {
        if s.t_zone < cfg.comfort.comfort_low.kelvin()
            || s.t_zone > cfg.comfort.comfort_high.kelvin()
        {
            self.violated = true;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Snapshot {
    n: u32,
    k: usize,
    state: ExtendedState,
    ledger: Ledger,
}

struct Context<'a> {
    cfg: &'a ExtendedConfig,
    weather: &'a Weather,
    spec: &'a ScheduleSpec,
    base: StepRecord,
    period_steps: usize,
}

impl Context<'_> {
    fn p_base(&self, k: usize) -> Result<f64> {
        self.base
            .power
            .get(k)
            .copied()
            .ok_or(VesError::NoConvergence {
                cap_s: self.cfg.recovery_cap,
            })
    }

    fn power(&self, m: f64, s: &ExtendedState, wx: &WeatherSample) -> Result<f64> {
        self.cfg.power(m, s, wx)
    }

    /// VES pass up to the largest requested cycle count.
    fn ves_pass(&self, ns: &[u32], trace: &mut Option<SimTrace>) -> Result<(Vec<Snapshot>, usize)> {
        let n_max = ns.iter().copied().max().unwrap_or(0);
        let schedule = self.spec.with_cycles(n_max)?;
        let n_max = n_max as usize;
        let tracker = VesTracker::new(self.cfg);
        let (mut s, _) = initial_state(self.cfg, self.weather);
        let mut ledger = Ledger::default();
        let mut snaps = Vec::with_capacity(ns.len());
        let mut saturated = 0;
        for k in 0..n_max * self.period_steps {
            let t = k as f64 * self.cfg.dt;
            let wx = self.weather.at(t);
            let p_b = self.p_base(k)?;
            let cmd = tracker.command(p_b + schedule.reference(t), &s, &wx)?;
            saturated += usize::from(cmd.saturated);
            let p = self.power(cmd.m_a, &s, &wx)?;
            if let Some(tr) = trace.as_mut() {
                tr.samples.push(sample(self.cfg, t, &s, cmd.m_a, p, p_b));
            }
            ledger.add(p - p_b, self.cfg.dt);
            s = step(self.cfg, self.weather, t, &s, cmd.m_a, self.cfg.dt)?;
            ledger.check_comfort(self.cfg, &s);
            let done = k + 1;
            if done % self.period_steps == 0 {
                let n = (done / self.period_steps) as u32;
                if ns.contains(&n) {
                    snaps.push(Snapshot {
                        n,
                        k: done,
                        state: s,
                        ledger,
                    });
                }
            }
        }
        Ok((snaps, saturated))
    }

    fn cap_steps(&self) -> usize {
        (self.cfg.recovery_cap / self.cfg.dt).ceil() as usize
    }

    fn recover(&self, snap: &Snapshot, trace: &mut Option<SimTrace>) -> Result<(RteResult, usize)> {
        let t_end = snap.state.t_zone - self.cfg.setpoint.kelvin();
        let recovery = if t_end.abs() <= RECOVERY_TIE_K {
            Recovery::None
        } else if t_end > 0.0 {
            Recovery::Charge
        } else {
            Recovery::Discharge
        };
        let (ledger, t_recov, saturated) = match self.cfg.recovery {
            RecoveryPolicy::ClimateController {
                tolerance_k,
                hold_s,
            } => {
                let (l, t) = self.recover_climate(snap, tolerance_k, hold_s, trace)?;
                (l, t, 0)
            }
            RecoveryPolicy::SquareWave => self.recover_square(snap, t_end, trace)?,
        };
        let spec = self.spec.with_cycles(snap.n)?;
        let mut r = result_from_times(&spec, t_end, t_recov, recovery, ledger.e_c, ledger.e_d);
        r.t_c = ledger.t_c;
        r.t_d = ledger.t_d;
        r.eta_rt = ledger.e_d / ledger.e_c;
        r.comfort_violation = ledger.violated;
        Ok((r, saturated))
    }

    fn recover_climate(
        &self,
        snap: &Snapshot,
        tolerance: f64,
        hold: f64,
        trace: &mut Option<SimTrace>,
    ) -> Result<(Ledger, f64)> {
        let cfg = self.cfg;
        let sp = cfg.setpoint.kelvin();
        let hold_steps = (hold / cfg.dt).ceil() as usize;
        let mut ctrl = ClimateController::new(cfg).with_integral(self.base.integral[snap.k]);
        let mut committed = snap.ledger;
        let mut pending = Ledger::default();
        let mut window: Option<(usize, ExtendedState)> = None;
        let mut pending_samples = 0usize;
        let mut s = snap.state;
        let mut k = snap.k;
        loop {
            if (s.t_zone - sp).abs() < tolerance {
                let (start, _) = *window.get_or_insert((k, s));
                if k - start >= hold_steps {
                    break;
                }
            } else if window.take().is_some() {
                committed.merge(&pending);
                pending = Ledger::default();
                pending_samples = 0;
            }
            if k - snap.k > self.cap_steps() {
                return Err(VesError::NoConvergence {
                    cap_s: cfg.recovery_cap,
                });
            }
            let t = k as f64 * cfg.dt;
            let wx = self.weather.at(t);
            let p_b = self.p_base(k)?;
            let m = ctrl.command(t, &s, &wx, cfg.dt);
            let p = self.power(m, &s, &wx)?;
            if let Some(tr) = trace.as_mut() {
                tr.samples.push(sample(cfg, t, &s, m, p, p_b));
            }
            if window.is_some() {
                pending.add(p - p_b, cfg.dt);
                pending_samples += 1;
            } else {
                committed.add(p - p_b, cfg.dt);
            }
            s = step(cfg, self.weather, t, &s, m, cfg.dt)?;
            committed.check_comfort(cfg, &s);
            k += 1;
        }
        let (start, state) = window.unwrap_or((k, s));
        if let Some(tr) = trace.as_mut() {
            // The confirmation window is not part of the interval.
            let keep = tr.samples.len() - pending_samples;
            tr.samples.truncate(keep);
            let (m, p) = (self.base.airflow[start], self.base.power[start]);
            tr.samples
                .push(sample(cfg, start as f64 * cfg.dt, &state, m, p, p));
        }
        Ok((committed, (start - snap.k) as f64 * cfg.dt))
    }

    fn recover_square(
        &self,
        snap: &Snapshot,
        t_end: f64,
        trace: &mut Option<SimTrace>,
    ) -> Result<(Ledger, f64, usize)> {
        let cfg = self.cfg;
        let sp = cfg.setpoint.kelvin();
        let mut ledger = snap.ledger;
        if t_end.abs() <= RECOVERY_TIE_K {
            return Ok((ledger, 0.0, 0));
        }
        let sign = t_end.signum();
        let p_ref = sign * self.spec.delta_p;
        let tracker = VesTracker::new(cfg);
        let mut s = snap.state;
        let mut k = snap.k;
        let mut saturated = 0;
        loop {
            if k - snap.k > self.cap_steps() {
                return Err(VesError::NoConvergence {
                    cap_s: cfg.recovery_cap,
                });
            }
            let t = k as f64 * cfg.dt;
            let wx = self.weather.at(t);
            let p_b = self.p_base(k)?;
            let cmd = tracker.command(p_b + p_ref, &s, &wx)?;
            saturated += usize::from(cmd.saturated);
            let p = self.power(cmd.m_a, &s, &wx)?;
            if let Some(tr) = trace.as_mut() {
                tr.samples.push(sample(cfg, t, &s, cmd.m_a, p, p_b));
            }
            let next = step(cfg, self.weather, t, &s, cmd.m_a, cfg.dt)?;
            if (next.t_zone - sp) * sign > 0.0 {
                ledger.add(p - p_b, cfg.dt);
                ledger.check_comfort(cfg, &next);
                s = next;
                k += 1;
                continue;
            }
            let (mut lo, mut hi) = (0.0, cfg.dt);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (step(cfg, self.weather, t, &s, cmd.m_a, mid)?.t_zone - sp) * sign > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ledger.add(p - p_b, hi);
            let end = step(cfg, self.weather, t, &s, cmd.m_a, hi)?;
            if let Some(tr) = trace.as_mut() {
                tr.samples.push(sample(cfg, t + hi, &end, cmd.m_a, p, p_b));
            }
            return Ok((ledger, (k - snap.k) as f64 * cfg.dt + hi, saturated));
        }
    }
}

fn context<'a>(
    spec: &'a ScheduleSpec,
    ns: &[u32],
    weather: &'a Weather,
    cfg: &'a ExtendedConfig,
) -> Result<Context<'a>> {
    cfg.validate()?;
    let half = steps_for(spec.half_period, cfg.dt, "half-period")?;
    let n_max = ns.iter().copied().max().unwrap_or(0) as usize;
    let hold = match cfg.recovery {
        RecoveryPolicy::ClimateController { hold_s, .. } => (hold_s / cfg.dt).ceil() as usize,
        RecoveryPolicy::SquareWave => 0,
    };
    let steps = 2 * half * n_max + (cfg.recovery_cap / cfg.dt).ceil() as usize + hold + 2;
    Ok(Context {
        cfg,
        weather,
        spec,
        base: baseline_pass(cfg, weather, steps)?,
        period_steps: 2 * half,
    })
}

/// Runs one schedule through all three passes and returns the trace of the
/// VES and recovery passes.
pub fn run_extended_rte(
    spec: &ScheduleSpec,
    weather: &Weather,
    cfg: &ExtendedConfig,
) -> Result<ExtendedRun> {
    if spec.delta_p == 0.0 {
        cfg.validate()?;
        let steps = steps_for(spec.duration(), cfg.dt, "schedule")?;
        let base = baseline_pass(cfg, weather, steps)?;
        let trace = SimTrace {
            samples: base
                .states
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    sample(
                        cfg,
                        k as f64 * cfg.dt,
                        s,
                        base.airflow[k],
                        base.power[k],
                        base.power[k],
                    )
                })
                .collect(),
        };
        let result = result_from_times(spec, 0.0, 0.0, Recovery::None, 0.0, 0.0);
        return Ok(ExtendedRun {
            trace,
            result,
            saturated_steps: 0,
        });
    }
    let ctx = context(spec, &[spec.n_cycles], weather, cfg)?;
    let mut trace = Some(SimTrace::default());
    let (snaps, sat_ves) = ctx.ves_pass(&[spec.n_cycles], &mut trace)?;
    let (result, sat_rec) = ctx.recover(&snaps[0], &mut trace)?;
    Ok(ExtendedRun {
        trace: trace.unwrap_or_default(),
        result,
        saturated_steps: sat_ves + sat_rec,
    })
}

/// `(n, result)` for each requested cycle count, sharing one baseline and
/// one VES pass.
pub fn extended_rte_vs_n(
    spec: &ScheduleSpec,
    ns: &[u32],
    weather: &Weather,
    cfg: &ExtendedConfig,
) -> Result<Vec<(u32, RteResult)>> {
    if let Some(bad) = ns.iter().find(|n| **n == 0) {
        return Err(VesError::InvalidSchedule(format!(
            "cycle counts must be positive, got {bad}"
        )));
    }
    if spec.delta_p == 0.0 {
        return ns
            .iter()
            .map(|&n| {
                Ok((
                    n,
                    result_from_times(&spec.with_cycles(n)?, 0.0, 0.0, Recovery::None, 0.0, 0.0),
                ))
            })
            .collect();
    }
    let ctx = context(spec, ns, weather, cfg)?;
    let (snaps, _) = ctx.ves_pass(ns, &mut None)?;
    let results = sweep::map(&snaps, |snap| {
        ctx.recover(snap, &mut None).map(|(r, _)| (snap.n, r))
    });
    let by_n: Vec<(u32, RteResult)> = results.into_iter().collect::<Result<_>>()?;
    Ok(ns
        .iter()
        .filter_map(|n| by_n.iter().find(|(m, _)| m == n).copied())
        .collect())
}
