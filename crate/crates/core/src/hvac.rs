//! Fan and chiller power, moist-air enthalpy and the baseline equilibrium.

use crate::error::{finite, positive, Result, VesError};
use crate::units::{BuildingParams, HvacParams, PhysicalConstants, Temperature};

/// Temperature and humidity ratio of an air stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirState {
    pub temperature: Temperature,
    /// kg water vapor per kg dry air.
    pub humidity_ratio: f64,
}

impl AirState {
    pub fn new(temperature: Temperature, humidity_ratio: f64) -> Result<Self> {
        finite("humidity_ratio", humidity_ratio)?;
        if humidity_ratio < 0.0 {
            return Err(VesError::InvalidParameter {
                name: "humidity_ratio",
                reason: format!("must be nonnegative, got {humidity_ratio}"),
            });
        }
        Ok(Self {
            temperature,
            humidity_ratio,
        })
    }

    pub fn dry(temperature: Temperature) -> Self {
        Self {
            temperature,
            humidity_ratio: 0.0,
        }
    }
}

/// Outdoor conditions and exogenous zone heat gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientConditions {
    pub t_oa: Temperature,
    /// Exogenous heat influx into the zone, W.
    pub q_x: f64,
    /// Outdoor humidity ratio; only the moist-air model reads it.
    pub w_oa: f64,
}

/// Baseline equilibrium: constant setpoint and airflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselinePoint {
    pub t_b: Temperature,
    /// Baseline supply airflow, kg/s.
    pub m_a_b: f64,
    /// Exogenous heat gain consistent with the equilibrium, W.
    pub q_x: f64,
    /// Baseline electrical power, W.
    pub p_hvac_b: f64,
}

/// The quantity fixed when solving for the baseline; the other is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineInput {
    Airflow(f64),
    HeatGain(f64),
}

/// Whether the cooling-only modeling assumptions are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssumptionChecks {
    #[default]
    Enforce,
    Skip,
}

pub fn fan_power(m_a: f64, h: &HvacParams) -> Result<f64> {
    finite("m_a", m_a)?;
    if m_a < 0.0 {
        return Err(VesError::NegativeAirflow(m_a));
    }
    Ok(h.alpha_1f * m_a * m_a + h.alpha_2f * m_a)
}

/// Specific enthalpy of moist air, J/kg, referenced to 0 °C.
pub fn moist_air_enthalpy(a: AirState, k: &PhysicalConstants) -> f64 {
    let t = a.temperature.celsius();
    k.c_pa * t + a.humidity_ratio * (k.g_h2o + k.c_pw * t)
}

/// Dry-air enthalpy `c_pa * T` (°C reference).
pub fn dry_air_enthalpy(t: Temperature, k: &PhysicalConstants) -> f64 {
    k.c_pa * t.celsius()
}

pub fn mixed_air_enthalpy(h_oa: f64, h_zone: f64, r_oa: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r_oa) {
        return Err(VesError::RatioOutOfRange(r_oa));
    }
    Ok(r_oa * h_oa + (1.0 - r_oa) * h_zone)
}

/// Chiller electrical power `m_a (h_ma - h_sa) / COP`.
///
/// With `cooling_only` set, an enthalpy rise across the coil is rejected.
pub fn chiller_power(m_a: f64, h_ma: f64, h_sa: f64, cop: f64, cooling_only: bool) -> Result<f64> {
    finite("m_a", m_a)?;
    if m_a < 0.0 {
        return Err(VesError::NegativeAirflow(m_a));
    }
    positive("cop", cop)?;
    if cooling_only && h_ma < h_sa {
        return Err(VesError::NegativeCooling { h_ma, h_sa });
    }
    Ok(m_a * (h_ma - h_sa) / cop)
}

/// Total HVAC power for the dry-air model.
pub fn hvac_power(
    m_a: f64,
    t_zone: Temperature,
    h: &HvacParams,
    amb: &AmbientConditions,
    k: &PhysicalConstants,
) -> Result<f64> {
    let fan = fan_power(m_a, h)?;
    let h_ma = mixed_air_enthalpy(
        dry_air_enthalpy(amb.t_oa, k),
        dry_air_enthalpy(t_zone, k),
        h.r_oa,
    )?;
    let chiller = chiller_power(m_a, h_ma, dry_air_enthalpy(h.t_sa, k), h.cop, true)?;
    Ok(fan + chiller)
}

/// Heat balance of the single-zone model at a fixed point, W.
pub fn baseline_residual(
    t_b: Temperature,
    m_a_b: f64,
    q_x: f64,
    b: &BuildingParams,
    h: &HvacParams,
    t_oa: Temperature,
    k: &PhysicalConstants,
) -> f64 {
    (t_oa.kelvin() - t_b.kelvin()) / b.r_th
        + q_x
        + m_a_b * k.c_pa * (h.t_sa.kelvin() - t_b.kelvin())
}

/// Solves the baseline heat balance for whichever of airflow or heat gain is
/// not given, then evaluates the baseline power.
pub fn solve_baseline(
    t_b: Temperature,
    given: BaselineInput,
    b: &BuildingParams,
    h: &HvacParams,
    t_oa: Temperature,
    k: &PhysicalConstants,
) -> Result<BaselinePoint> {
    let lift = t_b.kelvin() - h.t_sa.kelvin();
    if lift <= 0.0 {
        return Err(VesError::AssumptionViolated(format!(
            "supply air ({:.3} K) must be colder than the baseline temperature ({:.3} K)",
            h.t_sa.kelvin(),
            t_b.kelvin()
        )));
    }
    let envelope = (t_oa.kelvin() - t_b.kelvin()) / b.r_th;
    let (m_a_b, q_x) = match given {
        BaselineInput::Airflow(m) => {
            finite("m_a_b", m)?;
            (m, m * k.c_pa * lift - envelope)
        }
        BaselineInput::HeatGain(q) => {
            finite("q_x", q)?;
            ((envelope + q) / (k.c_pa * lift), q)
        }
    };
    if m_a_b <= 0.0 {
        return Err(VesError::InfeasibleBaseline { m_a_b });
    }
    let amb = AmbientConditions {
        t_oa,
        q_x,
        w_oa: 0.0,
    };
    let p_hvac_b = hvac_power(m_a_b, t_b, h, &amb, k)?;
    if p_hvac_b <= 0.0 {
        return Err(VesError::InfeasibleBaseline { m_a_b });
    }
    Ok(BaselinePoint {
        t_b,
        m_a_b,
        q_x,
        p_hvac_b,
    })
}

/// A fully specified single-zone plant at its baseline operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub building: BuildingParams,
    pub hvac: HvacParams,
    pub ambient: AmbientConditions,
    pub constants: PhysicalConstants,
    pub baseline: BaselinePoint,
}

impl Plant {
    pub fn new(
        building: BuildingParams,
        hvac: HvacParams,
        t_oa: Temperature,
        t_b: Temperature,
        given: BaselineInput,
        constants: PhysicalConstants,
        checks: AssumptionChecks,
    ) -> Result<Self> {
        if !(building.comfort_low < t_b && t_b < building.comfort_high) {
            return Err(VesError::InvalidParameter {
                name: "t_b",
                reason: "baseline temperature must lie strictly inside the comfort band".into(),
            });
        }
        if checks == AssumptionChecks::Enforce && t_oa <= building.comfort_high {
            return Err(VesError::AssumptionViolated(format!(
                "outdoor air ({:.3} K) must be warmer than the comfort ceiling ({:.3} K)",
                t_oa.kelvin(),
                building.comfort_high.kelvin()
            )));
        }
        let baseline = solve_baseline(t_b, given, &building, &hvac, t_oa, &constants)?;
        hvac.check_fan_range(0.5 * baseline.m_a_b, 2.0 * baseline.m_a_b)?;
        Ok(Self {
            building,
            hvac,
            ambient: AmbientConditions {
                t_oa,
                q_x: baseline.q_x,
                w_oa: 0.0,
            },
            constants,
            baseline,
        })
    }

    /// Auditorium zone served by a dedicated air handler: 55 °F supply,
    /// 72 °F setpoint in a 70–74 °F band, 80 °F outdoors, COP 3.5,
    /// 2.27 kg/s baseline airflow, C = 3.4e7 J/K, R = 1.3e-3 K/W, fan
    /// coefficients 662 W/(kg/s)² and -576 W/(kg/s), 100% outside air.
    pub fn reference() -> Self {
        let f = |v| Temperature::from_fahrenheit(v).expect("finite constant");
        let building =
            BuildingParams::new(1.3e-3, 3.4e7, f(70.0), f(74.0)).expect("valid constants");
        let hvac = HvacParams::new(662.0, -576.0, 3.5, f(55.0), 1.0).expect("valid constants");
        Self::new(
            building,
            hvac,
            f(80.0),
            f(72.0),
            BaselineInput::Airflow(2.27),
            PhysicalConstants::default(),
            AssumptionChecks::Enforce,
        )
        .expect("reference plant is feasible")
    }

    /// Same envelope and baseline airflow with a different outside air ratio.
    pub fn with_r_oa(&self, r_oa: f64) -> Result<Self> {
        let hvac = self.hvac.with_r_oa(r_oa)?;
        Self::new(
            self.building,
            hvac,
            self.ambient.t_oa,
            self.baseline.t_b,
            BaselineInput::Airflow(self.baseline.m_a_b),
            self.constants,
            AssumptionChecks::Enforce,
        )
    }

    pub fn power(&self, m_a: f64, t_zone: Temperature) -> Result<f64> {
        hvac_power(m_a, t_zone, &self.hvac, &self.ambient, &self.constants)
    }

    pub fn baseline_residual(&self) -> f64 {
        baseline_residual(
            self.baseline.t_b,
            self.baseline.m_a_b,
            self.baseline.q_x,
            &self.building,
            &self.hvac,
            self.ambient.t_oa,
            &self.constants,
        )
    }
}
