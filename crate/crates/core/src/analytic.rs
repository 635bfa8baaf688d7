//! Linearization constants of the virtual battery and the closed-form
//! temperature response for 100% outside air.
//!
//! Around a baseline `(T_b, m_a_b)` the power deviation obeys
//!
//! ```text
//! P~ = a m~ + b T~ + c m~ T~ + d m~^2
//! dT~/dt = -alpha T~ - beta m~ - gamma T~ m~
//! ```
//!
//! With `r_oa = 1` the coefficients `b` and `c` vanish, so a constant power
//! deviation fixes a constant airflow deviation and the temperature deviation
//! follows a first-order LTI step response.

use crate::error::{positive, Result, VesError};
use crate::hvac::{BaselinePoint, Plant};
use crate::units::BuildingParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesCoefficients {
    /// W/(kg/s)
    pub a: f64,
    /// W/K
    pub b: f64,
    /// W/(K·kg/s)
    pub c: f64,
    /// W/(kg/s)²
    pub d: f64,
    /// 1/s
    pub alpha: f64,
    /// K/kg
    pub beta: f64,
    /// 1/kg
    pub gamma: f64,
    pub r_oa: f64,
    pub baseline: BaselinePoint,
    pub building: BuildingParams,
}

impl VesCoefficients {
    pub fn new(plant: &Plant) -> Self {
        let base = &plant.baseline;
        let h = &plant.hvac;
        let k = &plant.constants;
        let b = &plant.building;
        let r = h.r_oa;
        let t_oa = plant.ambient.t_oa.kelvin();
        let t_b = base.t_b.kelvin();
        let t_sa = h.t_sa.kelvin();
        Self {
            a: 2.0 * h.alpha_1f * base.m_a_b
                + h.alpha_2f
                + k.c_pa * (r * t_oa + (1.0 - r) * t_b - t_sa) / h.cop,
            b: k.c_pa * base.m_a_b * (1.0 - r) / h.cop,
            c: k.c_pa * (1.0 - r) / h.cop,
            d: h.alpha_1f,
            alpha: (b.r_th * k.c_pa * base.m_a_b + 1.0) / (b.r_th * b.c_th),
            beta: k.c_pa * (t_b - t_sa) / b.c_th,
            gamma: k.c_pa / b.c_th,
            r_oa: r,
            baseline: *base,
            building: *b,
        }
    }

    /// Power deviation produced by an airflow and temperature deviation.
    pub fn delta_p(&self, m_tilde: f64, t_tilde: f64) -> f64 {
        self.a * m_tilde
            + self.b * t_tilde
            + self.c * m_tilde * t_tilde
            + self.d * m_tilde * m_tilde
    }

    /// Time derivative of the temperature deviation, K/s.
    pub fn temperature_rate(&self, t_tilde: f64, m_tilde: f64) -> f64 {
        -self.alpha * t_tilde - self.beta * m_tilde - self.gamma * t_tilde * m_tilde
    }

    pub fn is_full_outside_air(&self) -> bool {
        self.r_oa == 1.0
    }
}

pub fn ves_coefficients(plant: &Plant) -> VesCoefficients {
    VesCoefficients::new(plant)
}

/// Airflow deviation that realizes power deviation `p_tilde` at temperature
/// deviation `t_tilde`.
///
/// Takes the root of `d m^2 + (a + c T~) m + (b T~ - P~) = 0` that passes
/// through zero at `P~ = 0`; the other root drives total airflow negative.
pub fn airflow_for_power(p_tilde: f64, t_tilde: f64, v: &VesCoefficients) -> Result<f64> {
    let lin = v.a + v.c * t_tilde;
    let constant = v.b * t_tilde - p_tilde;
    let disc = lin * lin - 4.0 * v.d * constant;
    if disc < 0.0 {
        return Err(VesError::DiscriminantNegative { discriminant: disc });
    }
    let sq = disc.sqrt();
    // Rationalized form avoids cancellation when lin > 0 and |constant| is small.
    let m = if lin > 0.0 {
        -2.0 * constant / (lin + sq)
    } else {
        (-lin + sq) / (2.0 * v.d)
    };
    if v.baseline.m_a_b + m <= 0.0 {
        return Err(VesError::InfeasiblePower {
            p_tilde,
            reason: format!(
                "total airflow {} kg/s would not be positive",
                v.baseline.m_a_b + m
            ),
        });
    }
    Ok(m)
}

/// Steady-state temperature deviations under sustained charging and
/// discharging at airflow deviations `+delta_m_c` and `-delta_m_d`.
pub fn steady_state_temps(
    v: &VesCoefficients,
    delta_m_c: f64,
    delta_m_d: f64,
) -> Result<(f64, f64)> {
    let rate = v.gamma * delta_m_d;
    if v.alpha <= rate {
        return Err(VesError::UnstableDischarge {
            alpha: v.alpha,
            rate,
        });
    }
    let t_c_ss = -v.beta * delta_m_c / (v.alpha + v.gamma * delta_m_c);
    let t_d_ss = v.beta * delta_m_d / (v.alpha - rate);
    Ok((t_c_ss, t_d_ss))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Charging,
    Discharging,
}

impl Mode {
    pub fn opposite(self) -> Self {
        match self {
            Mode::Charging => Mode::Discharging,
            Mode::Discharging => Mode::Charging,
        }
    }
}

/// Order of the two half-periods in each square-wave period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Power raised above baseline first.
    UpDown,
    /// Power lowered below baseline first.
    DownUp,
}

impl Phase {
    pub fn first(self) -> Mode {
        match self {
            Phase::UpDown => Mode::Charging,
            Phase::DownUp => Mode::Discharging,
        }
    }

    pub fn second(self) -> Mode {
        self.first().opposite()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::UpDown => "up_down",
            Phase::DownUp => "down_up",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = VesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up_down" | "up-down" | "updown" => Ok(Phase::UpDown),
            "down_up" | "down-up" | "downup" => Ok(Phase::DownUp),
            other => Err(VesError::InvalidSchedule(format!(
                "unknown phase `{other}` (expected up_down or down_up)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Constant airflow deviations and first-order dynamics for a square wave
/// of amplitude `delta_p` with 100% outside air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeDischargeFlows {
    pub delta_p: f64,
    pub delta_m_c: f64,
    pub delta_m_d: f64,
    /// Charging steady state, K (negative).
    pub t_c_ss: f64,
    /// Discharging steady state, K (positive).
    pub t_d_ss: f64,
    /// `alpha + gamma * delta_m_c`, 1/s.
    pub rate_c: f64,
    /// `alpha - gamma * delta_m_d`, 1/s.
    pub rate_d: f64,
    pub beta: f64,
}

impl ChargeDischargeFlows {
    pub fn new(v: &VesCoefficients, delta_p: f64) -> Result<Self> {
        if !v.is_full_outside_air() {
            return Err(VesError::RequiresFullOutsideAir(v.r_oa));
        }
        if !delta_p.is_finite() || delta_p < 0.0 {
            return Err(VesError::InvalidSchedule(format!(
                "power amplitude must be finite and nonnegative, got {delta_p}"
            )));
        }
        if delta_p >= v.baseline.p_hvac_b {
            return Err(VesError::InfeasiblePower {
                p_tilde: -delta_p,
                reason: format!(
                    "discharging amplitude must be below the baseline power {} W",
                    v.baseline.p_hvac_b
                ),
            });
        }
        let nu = 4.0 * v.d * delta_p;
        let a2 = v.a * v.a;
        if a2 < nu {
            return Err(VesError::DiscriminantNegative {
                discriminant: a2 - nu,
            });
        }
        let delta_m_c = 2.0 * delta_p / (v.a + (a2 + nu).sqrt());
        let delta_m_d = 2.0 * delta_p / (v.a + (a2 - nu).sqrt());
        let (t_c_ss, t_d_ss) = steady_state_temps(v, delta_m_c, delta_m_d)?;
        Ok(Self {
            delta_p,
            delta_m_c,
            delta_m_d,
            t_c_ss,
            t_d_ss,
            rate_c: v.alpha + v.gamma * delta_m_c,
            rate_d: v.alpha - v.gamma * delta_m_d,
            beta: v.beta,
        })
    }

    /// Decay rate and steady state of the mode's LTI system.
    pub fn dynamics(&self, mode: Mode) -> (f64, f64) {
        match mode {
            Mode::Charging => (self.rate_c, self.t_c_ss),
            Mode::Discharging => (self.rate_d, self.t_d_ss),
        }
    }

    pub fn airflow(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Charging => self.delta_m_c,
            Mode::Discharging => -self.delta_m_d,
        }
    }

    pub fn power(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Charging => self.delta_p,
            Mode::Discharging => -self.delta_p,
        }
    }

    /// Exact temperature deviation after holding `mode` for `duration` seconds.
    pub fn lti_step(&self, t0_tilde: f64, duration: f64, mode: Mode) -> f64 {
        let (rate, ss) = self.dynamics(mode);
        ss + (t0_tilde - ss) * (-rate * duration).exp()
    }

    /// Temperature deviation after one full period starting from zero.
    pub fn after_one_period(&self, phase: Phase, t_p: f64) -> f64 {
        let mid = self.lti_step(0.0, t_p, phase.first());
        self.lti_step(mid, t_p, phase.second())
    }

    /// The same one-period value written out as a single expression.
    pub fn one_period_closed_form(&self, phase: Phase, t_p: f64) -> f64 {
        let (b, mc, md) = (self.beta, self.delta_m_c, self.delta_m_d);
        let (rc, rd) = (self.rate_c, self.rate_d);
        let ec = (-rc * t_p).exp();
        let ed = (-rd * t_p).exp();
        match phase {
            Phase::UpDown => -b * mc * ed * (1.0 - ec) / rc + b * md * (1.0 - ed) / rd,
            Phase::DownUp => b * md * ec * (1.0 - ed) / rd - b * mc * (1.0 - ec) / rc,
        }
    }

    /// First-order small-period approximation of the one-period deviation.
    pub fn taylor_one_period(&self, phase: Phase, t_p: f64) -> f64 {
        let (b, mc, md) = (self.beta, self.delta_m_c, self.delta_m_d);
        match phase {
            Phase::UpDown => t_p * b * (md - mc * (-self.rate_d * t_p).exp()),
            Phase::DownUp => t_p * b * ((-self.rate_c * t_p).exp() * md - mc),
        }
    }

    pub fn taylor_sign_prediction(&self, phase: Phase, t_p: f64) -> Sign {
        Sign::of(self.taylor_one_period(phase, t_p))
    }

    /// Bound on `|T~(t)|` for any square wave started at `T~ = 0`.
    pub fn temperature_bound(&self) -> f64 {
        self.t_c_ss.abs().max(self.t_d_ss.abs())
    }
}

/// Validates that a duration is usable as a half-period.
pub(crate) fn half_period(t_p: f64) -> Result<f64> {
    positive("t_p", t_p)
}
