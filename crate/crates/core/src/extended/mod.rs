//! Higher-fidelity closed-loop zone model: zone and wall capacitances,
//! zone humidity, outdoor-dependent COP, a climate controller and a VES
//! power-tracking controller.

mod control;
mod sim;
mod weather;

pub use control::{
    AirflowController, ClimateController, ConstantAirflow, PiGains, TrackerCommand, VesTracker,
};
pub use sim::{
    baseline_pass, extended_rte_vs_n, initial_state, integrate, run_extended_rte, ExtendedRun,
    RecoveryPolicy, StepRecord,
};
pub use weather::{Weather, WeatherSample, WeatherSeries};

use crate::error::{finite, positive, Result, VesError};
use crate::hvac::{
    chiller_power, fan_power, mixed_air_enthalpy, moist_air_enthalpy, AirState, Plant,
};
use crate::units::{BuildingParams, HvacParams, PhysicalConstants, Temperature};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedBuildingParams {
    /// Zone air capacitance, J/K.
    pub c_z: f64,
    /// Wall capacitance, J/K.
    pub c_w: f64,
    /// Outdoor to wall resistance, K/W.
    pub r_z: f64,
    /// Wall to zone resistance, K/W.
    pub r_w: f64,
    /// Dry-air volume, m³.
    pub volume: f64,
    /// Partial pressure of dry air, Pa.
    pub p_da: f64,
}

impl ExtendedBuildingParams {
    pub fn new(c_z: f64, c_w: f64, r_z: f64, r_w: f64, volume: f64, p_da: f64) -> Result<Self> {
        Ok(Self {
            c_z: positive("c_z", c_z)?,
            c_w: positive("c_w", c_w)?,
            r_z: positive("r_z", r_z)?,
            r_w: positive("r_w", r_w)?,
            volume: positive("volume", volume)?,
            p_da: positive("p_da", p_da)?,
        })
    }

    /// Splits a lumped envelope so that series resistance and total
    /// capacitance are preserved: 30% of C in the zone, R halved each side.
    pub fn split_lumped(b: &BuildingParams) -> Self {
        Self {
            c_z: 0.3 * b.c_th,
            c_w: 0.7 * b.c_th,
            r_z: 0.5 * b.r_th,
            r_w: 0.5 * b.r_th,
            volume: 2790.0,
            p_da: 100_000.0,
        }
    }

    /// Wall temperature with the wall in quasi-steady state.
    pub fn static_wall(&self, t_zone: f64, t_oa: f64) -> f64 {
        (self.r_w * t_oa + self.r_z * t_zone) / (self.r_z + self.r_w)
    }
}

/// Zone temperature, wall temperature (both K) and zone humidity ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedState {
    pub t_zone: f64,
    pub t_wall: f64,
    pub w_zone: f64,
}

impl ExtendedState {
    pub fn new(t_zone: Temperature, t_wall: Temperature, w_zone: f64) -> Result<Self> {
        finite("w_zone", w_zone)?;
        if w_zone < 0.0 {
            return Err(VesError::InvalidParameter {
                name: "w_zone",
                reason: format!("humidity ratio must be nonnegative, got {w_zone}"),
            });
        }
        Ok(Self {
            t_zone: t_zone.kelvin(),
            t_wall: t_wall.kelvin(),
            w_zone,
        })
    }

    pub(crate) fn to_array(self) -> [f64; 3] {
        [self.t_zone, self.t_wall, self.w_zone]
    }

    pub(crate) fn from_array(y: [f64; 3]) -> Self {
        Self {
            t_zone: y[0],
            t_wall: y[1],
            w_zone: y[2],
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.t_zone.is_finite() && self.t_wall.is_finite() && self.w_zone.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WallModel {
    #[default]
    Dynamic,
    /// Wall held at its static relation; its capacitance is lumped into the
    /// zone so the envelope reduces to a single R and C.
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CopModel {
    #[default]
    LinearOutdoor,
    Constant(f64),
}

impl CopModel {
    pub fn at(self, t_oa: Temperature) -> f64 {
        match self {
            CopModel::LinearOutdoor => cop_model(t_oa),
            CopModel::Constant(c) => c,
        }
    }
}

/// `5.5 - 0.025 T_oa` with `T_oa` in °F, held at 4 below 60 °F and at 3
/// above 100 °F.
pub fn cop_model(t_oa: Temperature) -> f64 {
    let f = t_oa.fahrenheit();
    if f <= 60.0 {
        4.0
    } else if f >= 100.0 {
        3.0
    } else {
        5.5 - 0.025 * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedConfig {
    pub building: ExtendedBuildingParams,
    /// Comfort band used for SoC and violation checks.
    pub comfort: BuildingParams,
    pub hvac: HvacParams,
    pub constants: PhysicalConstants,
    pub setpoint: Temperature,
    /// Feedforward airflow of the climate controller, kg/s.
    pub m_a_ff: f64,
    /// Upper airflow limit, kg/s.
    pub m_a_max: f64,
    /// Exogenous sensible heat gain, W.
    pub q_x: f64,
    /// Supply air humidity ratio.
    pub w_sa: f64,
    /// Internal moisture generation, kg/s.
    pub omega_x: f64,
    pub wall: WallModel,
    pub humidity: bool,
    pub cop: CopModel,
    pub gains: PiGains,
    /// Integration step, s.
    pub dt: f64,
    pub recovery: RecoveryPolicy,
    /// Longest recovery simulated before giving up, s.
    pub recovery_cap: f64,
}

impl ExtendedConfig {
    /// Extended model around a single-zone plant: the lumped envelope is
    /// split, and the plant's baseline airflow and heat gain are reused.
    pub fn from_plant(plant: &Plant) -> Self {
        Self {
            building: ExtendedBuildingParams::split_lumped(&plant.building),
            comfort: plant.building,
            hvac: plant.hvac,
            constants: plant.constants,
            setpoint: plant.baseline.t_b,
            m_a_ff: plant.baseline.m_a_b,
            m_a_max: 2.0 * plant.baseline.m_a_b,
            q_x: plant.baseline.q_x,
            w_sa: 0.008,
            omega_x: 5e-4,
            wall: WallModel::Dynamic,
            humidity: true,
            cop: CopModel::LinearOutdoor,
            gains: PiGains::default(),
            dt: 10.0,
            recovery: RecoveryPolicy::default(),
            recovery_cap: 48.0 * 3600.0,
        }
    }

    /// Single-R/C, dry, constant-COP reduction that matches the analytic
    /// model of the same plant.
    pub fn reduced(plant: &Plant) -> Self {
        Self {
            wall: WallModel::Static,
            humidity: false,
            cop: CopModel::Constant(plant.hvac.cop),
            ..Self::from_plant(plant)
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("dt", self.dt)?;
        positive("recovery_cap", self.recovery_cap)?;
        positive("m_a_max", self.m_a_max)?;
        finite("m_a_ff", self.m_a_ff)?;
        finite("q_x", self.q_x)?;
        finite("w_sa", self.w_sa)?;
        finite("omega_x", self.omega_x)?;
        if self.w_sa < 0.0 || self.omega_x < 0.0 {
            return Err(VesError::InvalidParameter {
                name: "w_sa",
                reason: "supply humidity and moisture generation must be nonnegative".into(),
            });
        }
        if let CopModel::Constant(c) = self.cop {
            positive("cop", c)?;
        }
        self.gains.validate()?;
        self.recovery.validate()
    }

    /// Zone capacitance seen by the zone temperature equation.
    fn zone_capacitance(&self) -> f64 {
        match self.wall {
            WallModel::Dynamic => self.building.c_z,
            WallModel::Static => self.building.c_z + self.building.c_w,
        }
    }

    fn air(&self, t_k: f64, w: f64) -> Result<f64> {
        let state = AirState {
            temperature: Temperature::from_kelvin(t_k)?,
            humidity_ratio: if self.humidity { w } else { 0.0 },
        };
        Ok(moist_air_enthalpy(state, &self.constants))
    }

    /// HVAC electrical power at airflow `m_a`.
    pub fn power(&self, m_a: f64, s: &ExtendedState, wx: &WeatherSample) -> Result<f64> {
        let (lin, _) = self.power_coefficients(s, wx)?;
        let fan = fan_power(m_a, &self.hvac)?;
        Ok(fan + (lin - self.hvac.alpha_2f) * m_a)
    }

    /// `(B, COP)` with `P(m) = alpha_1 m^2 + B m`.
    pub(crate) fn power_coefficients(
        &self,
        s: &ExtendedState,
        wx: &WeatherSample,
    ) -> Result<(f64, f64)> {
        let h_ma = mixed_air_enthalpy(
            self.air(wx.t_oa, wx.w_oa)?,
            self.air(s.t_zone, s.w_zone)?,
            self.hvac.r_oa,
        )?;
        let h_sa = self.air(self.hvac.t_sa.kelvin(), self.w_sa)?;
        let cop = self.cop.at(Temperature::from_kelvin(wx.t_oa)?);
        // Per unit airflow; also rejects heating across the coil.
        let chiller = chiller_power(1.0, h_ma, h_sa, cop, true)?;
        Ok((self.hvac.alpha_2f + chiller, cop))
    }

    /// Equilibrium humidity for a constant airflow.
    pub fn humidity_equilibrium(&self, m_a: f64) -> f64 {
        if !self.humidity {
            return 0.0;
        }
        if m_a <= 0.0 {
            return self.w_sa;
        }
        self.w_sa + self.omega_x * (1.0 + self.w_sa) / m_a
    }
}

/// `(dT/dt, dT_w/dt, dW/dt)` of the zone, wall and humidity equations with
/// `q_hvac = m_a c_pa (T_sa - T)`.
pub fn extended_derivatives(
    s: &ExtendedState,
    m_a: f64,
    wx: &WeatherSample,
    cfg: &ExtendedConfig,
) -> [f64; 3] {
    let b = &cfg.building;
    let t_wall = match cfg.wall {
        WallModel::Dynamic => s.t_wall,
        WallModel::Static => b.static_wall(s.t_zone, wx.t_oa),
    };
    let q_hvac = m_a * cfg.constants.c_pa * (cfg.hvac.t_sa.kelvin() - s.t_zone);
    let d_zone = ((t_wall - s.t_zone) / b.r_w + cfg.q_x + q_hvac) / cfg.zone_capacitance();
    let d_wall = match cfg.wall {
        WallModel::Dynamic => {
            ((wx.t_oa - s.t_wall) / b.r_z + (s.t_zone - s.t_wall) / b.r_w) / b.c_w
        }
        WallModel::Static => 0.0,
    };
    let d_w = if cfg.humidity {
        cfg.constants.r_g * s.t_zone / (b.volume * b.p_da)
            * (cfg.omega_x + m_a * (cfg.w_sa - s.w_zone) / (1.0 + cfg.w_sa))
    } else {
        0.0
    };
    [d_zone, d_wall, d_w]
}
