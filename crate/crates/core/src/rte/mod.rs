//! Square-wave schedules and round-trip efficiency.
//!
//! A run applies `n` periods of `±delta_p` starting from `T~ = 0`, then keeps
//! charging (if `T~ > 0`) or discharging (if `T~ < 0`) at the same amplitude
//! until `T~` is back at zero. Over that complete interval the efficiency of
//! a square wave is the ratio of discharging to charging time.

mod numeric;

pub use numeric::{rte_vs_n_numeric, rte_vs_tp_numeric, run_square_wave_numeric, NumericOptions};

use crate::analytic::{half_period, ChargeDischargeFlows, Mode, Phase, VesCoefficients};
use crate::error::{Result, VesError};
use crate::sweep;
use crate::trace::{SimTrace, TraceSample};
use crate::units::soc_raw;

/// `|T~|` at or below this counts as already recovered.
pub const RECOVERY_TIE_K: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    /// Amplitude of the power deviation, W. Zero gives a degenerate run.
    pub delta_p: f64,
    /// Half-period, s.
    pub half_period: f64,
    pub n_cycles: u32,
    pub phase: Phase,
}

impl ScheduleSpec {
    pub fn new(delta_p: f64, half_period: f64, n_cycles: u32, phase: Phase) -> Result<Self> {
        if !delta_p.is_finite() || delta_p < 0.0 {
            return Err(VesError::InvalidSchedule(format!(
                "amplitude must be finite and nonnegative, got {delta_p}"
            )));
        }
        half_period_checked(half_period)?;
        if n_cycles == 0 {
            return Err(VesError::InvalidSchedule(
                "at least one cycle is required".into(),
            ));
        }
        Ok(Self {
            delta_p,
            half_period,
            n_cycles,
            phase,
        })
    }

    pub fn with_cycles(self, n_cycles: u32) -> Result<Self> {
        Self::new(self.delta_p, self.half_period, n_cycles, self.phase)
    }

    pub fn with_half_period(self, half_period: f64) -> Result<Self> {
        Self::new(self.delta_p, half_period, self.n_cycles, self.phase)
    }

    /// Length of the square-wave portion, `2 n t_p`.
    pub fn duration(&self) -> f64 {
        2.0 * self.n_cycles as f64 * self.half_period
    }

    /// Reference power deviation at time `t` (zero past the schedule end).
    pub fn reference(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.duration() {
            return 0.0;
        }
        let half = (t / self.half_period).floor() as u64;
        let mode = if half.is_multiple_of(2) {
            self.phase.first()
        } else {
            self.phase.second()
        };
        match mode {
            Mode::Charging => self.delta_p,
            Mode::Discharging => -self.delta_p,
        }
    }
}

fn half_period_checked(t_p: f64) -> Result<f64> {
    half_period(t_p)
        .map_err(|_| VesError::InvalidSchedule(format!("half-period must be positive, got {t_p}")))
}

/// What had to happen after the schedule to return to the initial SoC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recovery {
    Charge,
    Discharge,
    None,
}

impl Recovery {
    pub fn as_str(self) -> &'static str {
        match self {
            Recovery::Charge => "charge",
            Recovery::Discharge => "discharge",
            Recovery::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RteResult {
    /// Total charging time, s.
    pub t_c: f64,
    /// Total discharging time, s.
    pub t_d: f64,
    pub t_recov: f64,
    pub recovery: Recovery,
    pub eta_rt: f64,
    /// Temperature deviation at the end of the square wave, K.
    pub t_tilde_end: f64,
    /// Energy drawn above baseline while charging, J.
    pub energy_charged: f64,
    /// Energy released below baseline while discharging, J.
    pub energy_discharged: f64,
    /// Set when the schedule has zero amplitude; `eta_rt` is then 1.
    pub zero_energy: bool,
    pub comfort_violation: bool,
}

impl RteResult {
    /// Efficiency from the energy integrals, `E_d / E_c`.
    pub fn eta_from_energy(&self) -> f64 {
        if self.zero_energy {
            1.0
        } else {
            self.energy_discharged / self.energy_charged
        }
    }

    /// Length of the complete charge-discharge interval.
    pub fn interval(&self) -> f64 {
        self.t_c + self.t_d
    }
}

/// Half-period at which the first-order one-cycle analysis of the down/up
/// schedule flips from `eta < 1` to `eta > 1`.
pub fn critical_half_period(flows: &ChargeDischargeFlows) -> f64 {
    if flows.delta_m_c == flows.delta_m_d {
        return 0.0;
    }
    (flows.delta_m_d / flows.delta_m_c).ln() / flows.rate_c
}

/// Time to return a deviation `t_end` to zero at the schedule amplitude.
pub fn recovery_time(t_end: f64, flows: &ChargeDischargeFlows) -> Result<(f64, Recovery)> {
    if t_end.abs() <= RECOVERY_TIE_K {
        return Ok((0.0, Recovery::None));
    }
    let (mode, recovery) = if t_end > 0.0 {
        (Mode::Charging, Recovery::Charge)
    } else {
        (Mode::Discharging, Recovery::Discharge)
    };
    let (rate, ss) = flows.dynamics(mode);
    let ratio = (t_end - ss) / (-ss);
    if !(ratio.is_finite() && ratio > 0.0) || rate <= 0.0 {
        return Err(VesError::NoRecoveryPossible { t_end });
    }
    Ok((ratio.ln() / rate, recovery))
}

/// Upper bound on the recovery time of any run started from `T~ = 0`:
/// recovery from either edge of the temperature bound.
pub fn recovery_bound(flows: &ChargeDischargeFlows) -> Result<f64> {
    let bound = flows.temperature_bound();
    if bound == 0.0 {
        return Ok(0.0);
    }
    let (up, _) = recovery_time(bound, flows)?;
    let (down, _) = recovery_time(-bound, flows)?;
    Ok(up.max(down))
}

/// One constant-power piece of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub mode: Mode,
    /// `T~` at the start of the segment.
    pub t0_tilde: f64,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Trace sampling interval; `None` records only segment boundaries.
    pub sample_dt: Option<f64>,
    /// Fail with `ComfortViolation` instead of flagging it.
    pub strict_comfort: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            sample_dt: Some(60.0),
            strict_comfort: false,
        }
    }
}

/// Piecewise-constant segments of a closed-form run, including recovery.
pub fn plan_segments(
    spec: &ScheduleSpec,
    flows: &ChargeDischargeFlows,
) -> Result<(Vec<Segment>, f64, f64, Recovery)> {
    let mut segments = Vec::with_capacity(2 * spec.n_cycles as usize + 1);
    let mut t = 0.0;
    let mut temp = 0.0;
    for _ in 0..spec.n_cycles {
        for mode in [spec.phase.first(), spec.phase.second()] {
            segments.push(Segment {
                start: t,
                duration: spec.half_period,
                mode,
                t0_tilde: temp,
            });
            temp = flows.lti_step(temp, spec.half_period, mode);
            t += spec.half_period;
        }
    }
    let t_end = temp;
    let (t_recov, recovery) = recovery_time(t_end, flows)?;
    let mode = match recovery {
        Recovery::Charge => Some(Mode::Charging),
        Recovery::Discharge => Some(Mode::Discharging),
        Recovery::None => None,
    };
    if let Some(mode) = mode {
        segments.push(Segment {
            start: t,
            duration: t_recov,
            mode,
            t0_tilde: t_end,
        });
    }
    Ok((segments, t_end, t_recov, recovery))
}

pub(crate) fn result_from_times(
    spec: &ScheduleSpec,
    t_end: f64,
    t_recov: f64,
    recovery: Recovery,
    energy_charged: f64,
    energy_discharged: f64,
) -> RteResult {
    let base = spec.n_cycles as f64 * spec.half_period;
    let (t_c, t_d) = match recovery {
        Recovery::Charge => (base + t_recov, base),
        Recovery::Discharge => (base, base + t_recov),
        Recovery::None => (base, base),
    };
    let zero_energy = spec.delta_p == 0.0;
    RteResult {
        t_c,
        t_d,
        t_recov,
        recovery,
        eta_rt: if zero_energy { 1.0 } else { t_d / t_c },
        t_tilde_end: t_end,
        energy_charged,
        energy_discharged,
        zero_energy,
        comfort_violation: false,
    }
}

fn degenerate_result(spec: &ScheduleSpec) -> RteResult {
    result_from_times(spec, 0.0, 0.0, Recovery::None, 0.0, 0.0)
}

/// Efficiency of a closed-form run without building a trace.
pub fn square_wave_result(spec: &ScheduleSpec, flows: &ChargeDischargeFlows) -> Result<RteResult> {
    if spec.delta_p == 0.0 {
        return Ok(degenerate_result(spec));
    }
    check_amplitude(spec, flows)?;
    let (segments, t_end, t_recov, recovery) = plan_segments(spec, flows)?;
    let (e_c, e_d) = segment_energy(&segments, flows, None);
    Ok(result_from_times(spec, t_end, t_recov, recovery, e_c, e_d))
}

fn check_amplitude(spec: &ScheduleSpec, flows: &ChargeDischargeFlows) -> Result<()> {
    if spec.delta_p != flows.delta_p {
        return Err(VesError::InvalidSchedule(format!(
            "schedule amplitude {} W does not match the flows computed for {} W",
            spec.delta_p, flows.delta_p
        )));
    }
    Ok(())
}

/// Charged and discharged energy of the segments. Segment power comes from
/// the forward power relation when coefficients are supplied.
fn segment_energy(
    segments: &[Segment],
    flows: &ChargeDischargeFlows,
    v: Option<&VesCoefficients>,
) -> (f64, f64) {
    let mut charged = 0.0;
    let mut discharged = 0.0;
    for seg in segments {
        let p = match v {
            Some(v) => v.delta_p(flows.airflow(seg.mode), seg.t0_tilde),
            None => flows.power(seg.mode),
        };
        if p > 0.0 {
            charged += p * seg.duration;
        } else {
            discharged -= p * seg.duration;
        }
    }
    (charged, discharged)
}

/// Closed-form simulation of a square-wave schedule with recovery.
pub fn run_square_wave(
    spec: &ScheduleSpec,
    v: &VesCoefficients,
    flows: &ChargeDischargeFlows,
    opts: &RunOptions,
) -> Result<(SimTrace, RteResult)> {
    let t_b = v.baseline.t_b.kelvin();
    let sample = |t: f64, t_tilde: f64, m_tilde: f64, p_tilde: f64| {
        let t_zone = t_b + t_tilde;
        TraceSample {
            t,
            t_tilde,
            t_zone,
            t_wall: None,
            w_zone: None,
            m_a: v.baseline.m_a_b + m_tilde,
            p_hvac: v.baseline.p_hvac_b + p_tilde,
            p_tilde,
            soc: soc_raw(t_zone, &v.building),
        }
    };
    if spec.delta_p == 0.0 {
        let mut trace = SimTrace::default();
        for t in sample_times(spec.duration(), opts.sample_dt) {
            trace.samples.push(sample(t, 0.0, 0.0, 0.0));
        }
        return Ok((trace, degenerate_result(spec)));
    }
    check_amplitude(spec, flows)?;
    let (segments, t_end, t_recov, recovery) = plan_segments(spec, flows)?;
    let (e_c, e_d) = segment_energy(&segments, flows, Some(v));
    let mut result = result_from_times(spec, t_end, t_recov, recovery, e_c, e_d);

    let total = segments.last().map_or(0.0, Segment::end);
    let mut trace = SimTrace::default();
    for t in sample_times(total, opts.sample_dt).chain(segments.iter().map(|s| s.start)) {
        let seg = segments[segments.partition_point(|s| s.start <= t).saturating_sub(1)];
        let m = flows.airflow(seg.mode);
        let temp = flows.lti_step(seg.t0_tilde, t - seg.start, seg.mode);
        trace.samples.push(sample(t, temp, m, v.delta_p(m, temp)));
    }
    trace.samples.sort_by(|a, b| a.t.total_cmp(&b.t));
    trace.samples.dedup_by(|a, b| a.t == b.t);

    let (lo, hi) = (
        v.building.comfort_low.kelvin() - t_b,
        v.building.comfort_high.kelvin() - t_b,
    );
    let mut extremes = segments
        .iter()
        .map(|s| s.t0_tilde)
        .chain(std::iter::once(0.0));
    if let Some(bad) = extremes.find(|x| *x < lo || *x > hi) {
        result.comfort_violation = true;
        if opts.strict_comfort {
            return Err(VesError::ComfortViolation {
                temperature_k: t_b + bad,
                low_k: v.building.comfort_low.kelvin(),
                high_k: v.building.comfort_high.kelvin(),
            });
        }
    }
    Ok((trace, result))
}

/// Uniform sample times `0, dt, 2 dt, ...` plus the end time.
pub(crate) fn sample_times(total: f64, dt: Option<f64>) -> Box<dyn Iterator<Item = f64>> {
    match dt {
        Some(dt) if dt > 0.0 => {
            let n = (total / dt).floor() as u64;
            Box::new(
                (0..=n)
                    .map(move |k| k as f64 * dt)
                    .chain(std::iter::once(total)),
            )
        }
        _ => Box::new([0.0, total].into_iter()),
    }
}

/// One `(n, result)` per requested cycle count.
pub fn rte_vs_n(
    spec: &ScheduleSpec,
    ns: &[u32],
    flows: &ChargeDischargeFlows,
) -> Result<Vec<(u32, RteResult)>> {
    let results = sweep::map(ns, |&n| {
        spec.with_cycles(n)
            .and_then(|s| square_wave_result(&s, flows))
    });
    ns.iter()
        .copied()
        .zip(results)
        .map(|(n, r)| r.map(|r| (n, r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub result: RteResult,
}

/// Single-cycle efficiency for each half-period in `grid`.
pub fn rte_vs_tp(
    grid: &[f64],
    delta_p: f64,
    phase: Phase,
    flows: &ChargeDischargeFlows,
) -> Result<Vec<CurvePoint>> {
    let results = sweep::map(grid, |&t_p| {
        ScheduleSpec::new(delta_p, t_p, 1, phase).and_then(|s| square_wave_result(&s, flows))
    });
    grid.iter()
        .copied()
        .zip(results)
        .map(|(x, r)| r.map(|result| CurvePoint { x, result }))
        .collect()
}

/// Grid cells `[x_i, x_{i+1}]` over which `eta - 1` changes sign.
pub fn eta_crossings(curve: &[CurvePoint]) -> Vec<(f64, f64)> {
    curve
        .windows(2)
        .filter(|w| {
            let (a, b) = (w[0].result.eta_rt - 1.0, w[1].result.eta_rt - 1.0);
            a * b <= 0.0 && !(a == 0.0 && b == 0.0)
        })
        .map(|w| (w[0].x, w[1].x))
        .collect()
}
