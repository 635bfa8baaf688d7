use thiserror::Error;

/// Errors raised by the models, solvers and simulators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VesError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "temperature {temperature_k:.6} K is outside the comfort band [{low_k:.6}, {high_k:.6}] K"
    )]
    ComfortViolation {
        temperature_k: f64,
        low_k: f64,
        high_k: f64,
    },

    #[error("airflow must be nonnegative, got {0} kg/s")]
    NegativeAirflow(f64),

    #[error("outside air ratio must lie in [0, 1], got {0}")]
    RatioOutOfRange(f64),

    #[error("mixed-air enthalpy {h_ma} J/kg is below supply enthalpy {h_sa} J/kg (heating in a cooling-only model)")]
    NegativeCooling { h_ma: f64, h_sa: f64 },

    #[error("modeling assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("baseline is infeasible: computed airflow {m_a_b} kg/s is not positive")]
    InfeasibleBaseline { m_a_b: f64 },

    #[error("power deviation {p_tilde} W is infeasible: {reason}")]
    InfeasiblePower { p_tilde: f64, reason: String },

    #[error("airflow quadratic has negative discriminant {discriminant}")]
    DiscriminantNegative { discriminant: f64 },

    #[error("discharging dynamics are unstable: alpha {alpha} <= gamma * delta_m_d {rate}")]
    UnstableDischarge { alpha: f64, rate: f64 },

    #[error("temperature deviation {t_end} K cannot be driven back to zero")]
    NoRecoveryPossible { t_end: f64 },

    #[error("closed-form analysis requires r_oa = 1, got {0}")]
    RequiresFullOutsideAir(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("state became non-finite at t = {t} s")]
    NonFiniteState { t: f64 },

    #[error("recovery did not converge within {cap_s} s")]
    NoConvergence { cap_s: f64 },

    #[error("weather data: {0}")]
    Weather(String),
}

impl VesError {
    /// True for errors caused by bad inputs (parameters, schedules, files)
    /// rather than by the model hitting an infeasible operating point.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            VesError::NonFinite { .. }
                | VesError::InvalidParameter { .. }
                | VesError::RatioOutOfRange(_)
                | VesError::AssumptionViolated(_)
                | VesError::InvalidSchedule(_)
                | VesError::RequiresFullOutsideAir(_)
                | VesError::Weather(_)
        )
    }
}

pub type Result<T, E = VesError> = std::result::Result<T, E>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(VesError::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(VesError::InvalidParameter {
            name,
            reason: format!("must be strictly positive, got {value}"),
        })
    }
}
