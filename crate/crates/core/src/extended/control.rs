use super::{ExtendedConfig, ExtendedState, WeatherSample};
use crate::error::{finite, Result, VesError};

/// Supplies the airflow held over the next integration step.
pub trait AirflowController {
    fn command(&mut self, t: f64, s: &ExtendedState, wx: &WeatherSample, dt: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantAirflow(pub f64);

impl AirflowController for ConstantAirflow {
    fn command(&mut self, _: f64, _: &ExtendedState, _: &WeatherSample, _: f64) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiGains {
    /// Proportional gain, (kg/s)/K.
    pub kp: f64,
    /// Integral gain, (kg/s)/(K·s).
    pub ki: f64,
}

impl Default for PiGains {
    fn default() -> Self {
        Self { kp: 10.0, ki: 0.05 }
    }
}

impl PiGains {
    pub fn validate(&self) -> Result<()> {
        finite("kp", self.kp)?;
        finite("ki", self.ki)?;
        if self.kp < 0.0 || self.ki < 0.0 {
            return Err(VesError::InvalidParameter {
                name: "kp",
                reason: "controller gains must be nonnegative".into(),
            });
        }
        Ok(())
    }
}

/// PI on zone temperature error with baseline feedforward. The integrator
/// is frozen whenever the output is clamped and the error would push it
/// further into the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimateController {
    pub gains: PiGains,
    /// Setpoint, K.
    pub setpoint: f64,
    pub m_ff: f64,
    pub m_max: f64,
    integral: f64,
}

impl ClimateController {
    pub fn new(cfg: &ExtendedConfig) -> Self {
        Self {
            gains: cfg.gains,
            setpoint: cfg.setpoint.kelvin(),
            m_ff: cfg.m_a_ff,
            m_max: cfg.m_a_max,
            integral: 0.0,
        }
    }

    pub fn with_integral(mut self, integral: f64) -> Self {
        self.integral = integral;
        self
    }

    /// Integrator contribution to the command, kg/s.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    fn unclamped(&self, error: f64) -> f64 {
        self.m_ff + self.gains.kp * error + self.integral
    }
}

impl AirflowController for ClimateController {
    fn command(&mut self, _: f64, s: &ExtendedState, _: &WeatherSample, dt: f64) -> f64 {
        let error = s.t_zone - self.setpoint;
        let raw = self.unclamped(error);
        let out = raw.clamp(0.0, self.m_max);
        let winding = (raw > self.m_max && error > 0.0) || (raw < 0.0 && error < 0.0);
        if !winding {
            self.integral += self.gains.ki * error * dt;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerCommand {
    pub m_a: f64,
    /// Set when the target was unreachable and the airflow was clamped.
    pub saturated: bool,
}

/// Inverts the instantaneous power map for a requested total power.
#[derive(Debug, Clone, Copy)]
pub struct VesTracker<'a> {
    cfg: &'a ExtendedConfig,
}

impl<'a> VesTracker<'a> {
    pub fn new(cfg: &'a ExtendedConfig) -> Self {
        Self { cfg }
    }

    /// Airflow drawing `target` W, on the branch through the baseline
    /// airflow (the larger root of `alpha_1 m^2 + B m = target`).
    pub fn solve(&self, target: f64, s: &ExtendedState, wx: &WeatherSample) -> Result<f64> {
        let (b, _) = self.cfg.power_coefficients(s, wx)?;
        let a1 = self.cfg.hvac.alpha_1f;
        let disc = b * b + 4.0 * a1 * target;
        if disc < 0.0 {
            return Err(VesError::DiscriminantNegative { discriminant: disc });
        }
        let sq = disc.sqrt();
        let m = if b > 0.0 {
            2.0 * target / (b + sq)
        } else {
            (sq - b) / (2.0 * a1)
        };
        if m <= 0.0 {
            return Err(VesError::InfeasiblePower {
                p_tilde: target,
                reason: "no positive airflow draws this power".into(),
            });
        }
        if m > self.cfg.m_a_max {
            return Err(VesError::InfeasiblePower {
                p_tilde: target,
                reason: format!(
                    "airflow {m} kg/s exceeds the limit {} kg/s",
                    self.cfg.m_a_max
                ),
            });
        }
        Ok(m)
    }

    /// Like [`solve`](Self::solve), but clamps to the nearest feasible
    /// airflow instead of failing.
    pub fn command(
        &self,
        target: f64,
        s: &ExtendedState,
        wx: &WeatherSample,
    ) -> Result<TrackerCommand> {
        match self.solve(target, s, wx) {
            Ok(m_a) => Ok(TrackerCommand {
                m_a,
                saturated: false,
            }),
            Err(VesError::InfeasiblePower { .. } | VesError::DiscriminantNegative { .. }) => {
                let (b, _) = self.cfg.power_coefficients(s, wx)?;
                let a1 = self.cfg.hvac.alpha_1f;
                let vertex = (-b / (2.0 * a1)).clamp(0.0, self.cfg.m_a_max);
                let at_max = a1 * self.cfg.m_a_max.powi(2) + b * self.cfg.m_a_max;
                let m_a = if target >= at_max {
                    self.cfg.m_a_max
                } else {
                    vertex
                };
                Ok(TrackerCommand {
                    m_a,
                    saturated: true,
                })
            }
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hvac::Plant;
    use approx::assert_relative_eq;

    fn setup() -> (ExtendedConfig, ExtendedState, WeatherSample) {
        let cfg = ExtendedConfig::from_plant(&Plant::reference());
        let t = cfg.setpoint.kelvin();
        let s = ExtendedState {
            t_zone: t,
            t_wall: t + 2.0,
            w_zone: 0.0085,
        };
        let wx = WeatherSample {
            t_oa: 300.0,
            w_oa: 0.010,
        };
        (cfg, s, wx)
    }

    #[test]
    fn climate_controller_feedforward_and_sign() {
        let (cfg, mut s, wx) = setup();
        let mut c = ClimateController::new(&cfg);
        assert_eq!(c.command(0.0, &s, &wx, 10.0), cfg.m_a_ff);
        assert_eq!(c.integral(), 0.0);
        s.t_zone += 0.01;
        let mut c = ClimateController::new(&cfg);
        assert!(c.command(0.0, &s, &wx, 10.0) > cfg.m_a_ff);
        assert!(c.integral() > 0.0);
    }

    #[test]
    fn anti_windup_freezes_integrator_at_limits() {
        let (cfg, mut s, wx) = setup();
        s.t_zone += 5.0;
        let mut c = ClimateController::new(&cfg);
        for _ in 0..100 {
            assert_eq!(c.command(0.0, &s, &wx, 10.0), cfg.m_a_max);
        }
        assert_eq!(c.integral(), 0.0);
        s.t_zone -= 10.0;
        assert_eq!(c.command(0.0, &s, &wx, 10.0), 0.0);
        assert_eq!(c.integral(), 0.0);
    }

    #[test]
    fn tracker_round_trip() {
        let (cfg, s, wx) = setup();
        let tracker = VesTracker::new(&cfg);
        let base = cfg.power(cfg.m_a_ff, &s, &wx).unwrap();
        assert_relative_eq!(
            tracker.solve(base, &s, &wx).unwrap(),
            cfg.m_a_ff,
            max_relative = 1e-12
        );
        for p_ref in [-4500.0, -1000.0, 0.0, 2000.0, 4500.0] {
            let m = tracker.solve(base + p_ref, &s, &wx).unwrap();
            let back = cfg.power(m, &s, &wx).unwrap() - base;
            assert!((back - p_ref).abs() < 1e-6, "{p_ref} -> {back}");
        }
    }

    #[test]
    fn tracker_reports_and_saturates_infeasible_targets() {
        let (cfg, s, wx) = setup();
        let tracker = VesTracker::new(&cfg);
        assert!(matches!(
            tracker.solve(0.0, &s, &wx),
            Err(VesError::InfeasiblePower { .. })
        ));
        let low = tracker.command(-10.0, &s, &wx).unwrap();
        assert!(low.saturated);
        assert_eq!(low.m_a, 0.0);
        let high = tracker.command(1e7, &s, &wx).unwrap();
        assert!(high.saturated);
        assert_eq!(high.m_a, cfg.m_a_max);
        assert!(!tracker.command(10_000.0, &s, &wx).unwrap().saturated);
    }
}
