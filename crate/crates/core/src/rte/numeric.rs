//! Square-wave runs for any outside air ratio.
//!
//! With recirculation the temperature dynamics are not LTI, so the
//! differential-algebraic system is integrated directly: at every RK4 stage
//! the airflow deviation is solved from the commanded power and the current
//! temperature deviation.

use super::{result_from_times, CurvePoint, Recovery, RteResult, ScheduleSpec, RECOVERY_TIE_K};
use crate::analytic::{airflow_for_power, Mode, Phase, VesCoefficients};
use crate::error::{positive, Result, VesError};
use crate::sweep;
use crate::trace::{SimTrace, TraceSample};
use crate::units::soc_raw;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Maximum integration step, s.
    pub dt: f64,
    /// Give up on recovery after this long, s.
    pub recovery_cap: f64,
    pub record_trace: bool,
    pub strict_comfort: bool,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            dt: 10.0,
            recovery_cap: 48.0 * 3600.0,
            record_trace: true,
            strict_comfort: false,
        }
    }
}

fn rate(p: f64, temp: f64, v: &VesCoefficients) -> Result<f64> {
    let m = airflow_for_power(p, temp, v)?;
    Ok(v.temperature_rate(temp, m))
}

fn rk4(p: f64, temp: f64, h: f64, v: &VesCoefficients) -> Result<f64> {
    let k1 = rate(p, temp, v)?;
    let k2 = rate(p, temp + 0.5 * h * k1, v)?;
    let k3 = rate(p, temp + 0.5 * h * k2, v)?;
    let k4 = rate(p, temp + h * k3, v)?;
    Ok(temp + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

struct Integrator<'a> {
    v: &'a VesCoefficients,
    opts: &'a NumericOptions,
    t: f64,
    temp: f64,
    charged: f64,
    discharged: f64,
    lo: f64,
    hi: f64,
    violation: Option<f64>,
    trace: SimTrace,
}

impl<'a> Integrator<'a> {
    fn new(v: &'a VesCoefficients, opts: &'a NumericOptions) -> Self {
        let t_b = v.baseline.t_b.kelvin();
        let mut s = Self {
            v,
            opts,
            t: 0.0,
            temp: 0.0,
            charged: 0.0,
            discharged: 0.0,
            lo: v.building.comfort_low.kelvin() - t_b,
            hi: v.building.comfort_high.kelvin() - t_b,
            violation: None,
            trace: SimTrace::default(),
        };
        s.record(0.0);
        s
    }

    fn record(&mut self, p: f64) {
        if self.temp < self.lo || self.temp > self.hi {
            self.violation.get_or_insert(self.temp);
        }
        if !self.opts.record_trace {
            return;
        }
        let m = airflow_for_power(p, self.temp, self.v).unwrap_or(f64::NAN);
        let t_zone = self.v.baseline.t_b.kelvin() + self.temp;
        self.trace.samples.push(TraceSample {
            t: self.t,
            t_tilde: self.temp,
            t_zone,
            t_wall: None,
            w_zone: None,
            m_a: self.v.baseline.m_a_b + m,
            p_hvac: self.v.baseline.p_hvac_b + p,
            p_tilde: p,
            soc: soc_raw(t_zone, &self.v.building),
        });
    }

    /// Advances by `h` at commanded power `p`, accumulating energy from the
    /// forward power relation at the step start.
    fn advance(&mut self, p: f64, h: f64) -> Result<()> {
        let m = airflow_for_power(p, self.temp, self.v)?;
        let realized = self.v.delta_p(m, self.temp);
        if realized > 0.0 {
            self.charged += realized * h;
        } else {
            self.discharged -= realized * h;
        }
        let next = rk4(p, self.temp, h, self.v)?;
        self.t += h;
        if !next.is_finite() {
            return Err(VesError::NonFiniteState { t: self.t });
        }
        self.temp = next;
        Ok(())
    }

    fn hold(&mut self, p: f64, duration: f64) -> Result<()> {
        let steps = (duration / self.opts.dt).ceil().max(1.0) as u64;
        let h = duration / steps as f64;
        for _ in 0..steps {
            self.advance(p, h)?;
            self.record(p);
        }
        Ok(())
    }

    /// Holds `p` until `T~` reaches zero; the last step is shortened by
    /// bisection so it lands on the crossing.
    fn recover(&mut self, p: f64) -> Result<f64> {
        let start = self.t;
        let sign = self.temp.signum();
        loop {
            if self.t - start > self.opts.recovery_cap {
                return Err(VesError::NoConvergence {
                    cap_s: self.opts.recovery_cap,
                });
            }
            let next = rk4(p, self.temp, self.opts.dt, self.v)?;
            if next * sign > 0.0 {
                self.advance(p, self.opts.dt)?;
                self.record(p);
                continue;
            }
            let (mut lo, mut hi) = (0.0, self.opts.dt);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if rk4(p, self.temp, mid, self.v)? * sign > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            self.advance(p, hi)?;
            self.record(p);
            return Ok(self.t - start);
        }
    }
}

/// Numeric square-wave run with recovery. Agrees with the closed form when
/// the outside air ratio is 1.
pub fn run_square_wave_numeric(
    spec: &ScheduleSpec,
    v: &VesCoefficients,
    opts: &NumericOptions,
) -> Result<(SimTrace, RteResult)> {
    positive("dt", opts.dt)?;
    positive("recovery_cap", opts.recovery_cap)?;
    let mut run = Integrator::new(v, opts);
    if spec.delta_p == 0.0 {
        run.hold(0.0, spec.duration())?;
        return Ok((
            run.trace,
            result_from_times(spec, 0.0, 0.0, Recovery::None, 0.0, 0.0),
        ));
    }
    for _ in 0..spec.n_cycles {
        for mode in [spec.phase.first(), spec.phase.second()] {
            let p = match mode {
                Mode::Charging => spec.delta_p,
                Mode::Discharging => -spec.delta_p,
            };
            run.hold(p, spec.half_period)?;
        }
    }
    let t_end = run.temp;
    let (t_recov, recovery) = if t_end.abs() <= RECOVERY_TIE_K {
        (0.0, Recovery::None)
    } else if t_end > 0.0 {
        (run.recover(spec.delta_p)?, Recovery::Charge)
    } else {
        (run.recover(-spec.delta_p)?, Recovery::Discharge)
    };
    let mut result = result_from_times(spec, t_end, t_recov, recovery, run.charged, run.discharged);
    if let Some(bad) = run.violation {
        result.comfort_violation = true;
        if opts.strict_comfort {
            return Err(VesError::ComfortViolation {
                temperature_k: v.baseline.t_b.kelvin() + bad,
                low_k: v.building.comfort_low.kelvin(),
                high_k: v.building.comfort_high.kelvin(),
            });
        }
    }
    Ok((run.trace, result))
}

fn result_only(
    spec: &ScheduleSpec,
    v: &VesCoefficients,
    opts: &NumericOptions,
) -> Result<RteResult> {
    let opts = NumericOptions {
        record_trace: false,
        ..*opts
    };
    run_square_wave_numeric(spec, v, &opts).map(|(_, r)| r)
}

pub fn rte_vs_n_numeric(
    spec: &ScheduleSpec,
    ns: &[u32],
    v: &VesCoefficients,
    opts: &NumericOptions,
) -> Result<Vec<(u32, RteResult)>> {
    let results = sweep::map(ns, |&n| {
        spec.with_cycles(n).and_then(|s| result_only(&s, v, opts))
    });
    ns.iter()
        .copied()
        .zip(results)
        .map(|(n, r)| r.map(|r| (n, r)))
        .collect()
}

pub fn rte_vs_tp_numeric(
    grid: &[f64],
    delta_p: f64,
    phase: Phase,
    v: &VesCoefficients,
    opts: &NumericOptions,
) -> Result<Vec<CurvePoint>> {
    let results = sweep::map(grid, |&t_p| {
        ScheduleSpec::new(delta_p, t_p, 1, phase).and_then(|s| result_only(&s, v, opts))
    });
    grid.iter()
        .copied()
        .zip(results)
        .map(|(x, r)| r.map(|result| CurvePoint { x, result }))
        .collect()
}
